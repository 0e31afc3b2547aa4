#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fairmiss/random.hpp"

namespace fairmiss {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

/// Binary decision tree over a row-major feature matrix. Rows go left when
/// row[feature] < threshold.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  double predict_row(const double* row) const {
    int i = 0;
    while (nodes[i].feature >= 0)
      i = row[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
  }
};

struct TreeParams {
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_leaf = 1;
  std::size_t mtry = 0;  // features sampled per split; 0 = all
};

namespace detail {

// Marks features whose observed values are all 0/1; those split without sorting.
inline std::vector<std::uint8_t> binary_feature_flags(const double* x, std::size_t n,
                                                      std::size_t p) {
  std::vector<std::uint8_t> flags(p, 1);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t f = 0; f < p; ++f) {
      const double v = x[r * p + f];
      if (v != 0.0 && v != 1.0) flags[f] = 0;
    }
  return flags;
}

}  // namespace detail

/// CART trainer. One instance per fit; build() may be called repeatedly (the
/// forest and the boosting ensemble reuse the per-feature presort across all
/// their trees).
class TreeBuilder {
 public:
  TreeBuilder(const double* x, std::size_t n, std::size_t p)
      : n_(n), p_(p), binary_(detail::binary_feature_flags(x, n, p)) {
    // column-major copy keeps the per-feature scans contiguous
    cols_.assign(p_, std::vector<double>(n_));
    for (std::size_t r = 0; r < n_; ++r)
      for (std::size_t f = 0; f < p_; ++f) cols_[f][r] = x[r * p_ + f];
    sorted_.resize(p_);
    for (std::size_t f = 0; f < p_; ++f) {
      if (binary_[f]) continue;
      auto& order = sorted_[f];
      order.resize(n_);
      for (std::size_t r = 0; r < n_; ++r) order[r] = r;
      const auto& col = cols_[f];
      std::sort(order.begin(), order.end(), [&col](std::size_t a, std::size_t b) {
        return col[a] < col[b] || (col[a] == col[b] && a < b);
      });
    }
    counts_.assign(n_, 0);
  }

  /// Gini-impurity classification tree on binary labels. `rows` may contain
  /// duplicates (bootstrap). Per-feature impurity decreases are accumulated
  /// into `importance` (scaled by node share of `importance_total` rows).
  DecisionTree build_classification(const std::vector<std::size_t>& rows,
                                    const std::vector<int>& y, const TreeParams& params,
                                    Rng* rng, std::vector<double>* importance,
                                    double importance_total) {
    y_ = &y;
    grad_ = nullptr;
    hess_ = nullptr;
    return build(rows, params, rng, importance, importance_total);
  }

  /// Least-squares regression tree on gradient targets; leaves hold the
  /// Newton step sum(grad)/sum(hess).
  DecisionTree build_regression(const std::vector<std::size_t>& rows,
                                const std::vector<double>& grad,
                                const std::vector<double>& hess,
                                const TreeParams& params) {
    y_ = nullptr;
    grad_ = &grad;
    hess_ = &hess;
    return build(rows, params, nullptr, nullptr, 0.0);
  }

 private:
  struct Frame {
    std::size_t lo, hi, depth;
    int node;
  };
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;  // impurity decrease, weighted by node size
    std::size_t n_left = 0;
  };

  DecisionTree build(const std::vector<std::size_t>& rows, const TreeParams& params,
                     Rng* rng, std::vector<double>* importance, double importance_total) {
    DecisionTree tree;
    idx_ = rows;
    std::vector<Frame> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, idx_.size(), 0, 0});

    while (!stack.empty()) {
      const Frame fr = stack.back();
      stack.pop_back();
      const std::size_t m = fr.hi - fr.lo;
      auto& node = tree.nodes[static_cast<std::size_t>(fr.node)];
      node.value = leaf_value(fr.lo, fr.hi);

      const bool depth_capped = params.max_depth > 0 && fr.depth >= params.max_depth;
      if (m < 2 || m < 2 * params.min_leaf || depth_capped || node_is_pure(fr.lo, fr.hi))
        continue;

      const Split split = best_split(fr.lo, fr.hi, params, rng);
      if (split.feature < 0 || split.gain <= 0.0) continue;

      if (importance)
        (*importance)[static_cast<std::size_t>(split.feature)] +=
            split.gain * static_cast<double>(m) / importance_total;

      // partition rows: x < threshold goes left
      const std::size_t f = static_cast<std::size_t>(split.feature);
      std::size_t i = fr.lo, j = fr.hi;
      while (i < j) {
        if (cols_[f][idx_[i]] < split.threshold) {
          ++i;
        } else {
          --j;
          std::swap(idx_[i], idx_[j]);
        }
      }

      const int left = static_cast<int>(tree.nodes.size());
      const int right = left + 1;
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();  // may reallocate: write via index, not `node`
      auto& parent = tree.nodes[static_cast<std::size_t>(fr.node)];
      parent.feature = split.feature;
      parent.threshold = split.threshold;
      parent.left = left;
      parent.right = right;
      stack.push_back({fr.lo, i, fr.depth + 1, left});
      stack.push_back({i, fr.hi, fr.depth + 1, right});
    }
    return tree;
  }

  bool classification() const { return y_ != nullptr; }

  double leaf_value(std::size_t lo, std::size_t hi) const {
    if (classification()) {
      std::size_t ones = 0;
      for (std::size_t i = lo; i < hi; ++i) ones += static_cast<std::size_t>((*y_)[idx_[i]]);
      return static_cast<double>(ones) / static_cast<double>(hi - lo);
    }
    double g = 0.0, h = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      g += (*grad_)[idx_[i]];
      h += (*hess_)[idx_[i]];
    }
    return g / std::max(h, 1e-12);
  }

  bool node_is_pure(std::size_t lo, std::size_t hi) const {
    if (classification()) {
      const int first = (*y_)[idx_[lo]];
      for (std::size_t i = lo + 1; i < hi; ++i)
        if ((*y_)[idx_[i]] != first) return false;
      return true;
    }
    const double first = (*grad_)[idx_[lo]];
    for (std::size_t i = lo + 1; i < hi; ++i)
      if ((*grad_)[idx_[i]] != first) return false;
    return true;
  }

  static double gini(double ones, double total) {
    const double p1 = ones / total;
    return 2.0 * p1 * (1.0 - p1);
  }

  Split best_split(std::size_t lo, std::size_t hi, const TreeParams& params, Rng* rng) {
    const std::size_t m = hi - lo;
    feat_order_.resize(p_);
    for (std::size_t f = 0; f < p_; ++f) feat_order_[f] = f;
    std::size_t n_feat = p_;
    if (params.mtry > 0 && params.mtry < p_ && rng) {
      for (std::size_t k = 0; k < params.mtry; ++k) {
        const std::size_t pick = k + rng->index(p_ - k);
        std::swap(feat_order_[k], feat_order_[pick]);
      }
      n_feat = params.mtry;
    }

    Split best;
    for (std::size_t fi = 0; fi < n_feat; ++fi) {
      const std::size_t f = feat_order_[fi];
      if (binary_[f])
        consider_binary(f, lo, hi, params, best);
      else
        consider_sorted(f, lo, hi, params, best);
    }
    (void)m;
    return best;
  }

  void consider_binary(std::size_t f, std::size_t lo, std::size_t hi,
                       const TreeParams& params, Split& best) {
    const double total = static_cast<double>(hi - lo);
    if (classification()) {
      double n_left = 0, ones_left = 0, ones = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t r = idx_[i];
        const double v = cols_[f][r];
        const double y = static_cast<double>((*y_)[r]);
        ones += y;
        if (v < 0.5) {
          n_left += 1.0;
          ones_left += y;
        }
      }
      const double n_right = total - n_left;
      if (n_left < params.min_leaf || n_right < params.min_leaf) return;
      const double parent = gini(ones, total);
      const double child = (n_left / total) * gini(ones_left, n_left) +
                           (n_right / total) * gini(ones - ones_left, n_right);
      accept(best, f, 0.5, parent - child, static_cast<std::size_t>(n_left));
    } else {
      double n_left = 0, s_left = 0, s = 0, ss = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        const std::size_t r = idx_[i];
        const double g = (*grad_)[r];
        s += g;
        ss += g * g;
        if (cols_[f][r] < 0.5) {
          n_left += 1.0;
          s_left += g;
        }
      }
      const double n_right = total - n_left;
      if (n_left < params.min_leaf || n_right < params.min_leaf) return;
      const double gain_abs = s_left * s_left / n_left + (s - s_left) * (s - s_left) / n_right -
                              s * s / total;
      accept(best, f, 0.5, gain_abs / total, static_cast<std::size_t>(n_left));
    }
  }

  void consider_sorted(std::size_t f, std::size_t lo, std::size_t hi,
                       const TreeParams& params, Split& best) {
    const std::size_t m = hi - lo;
    pairs_.resize(m);
    // Large nodes gather rows in global presorted order (one O(n) walk);
    // small nodes sort locally, which is cheaper deep in the tree.
    if (m * 8 >= n_) {
      for (std::size_t i = lo; i < hi; ++i) ++counts_[idx_[i]];
      std::size_t out = 0;
      for (const std::size_t r : sorted_[f]) {
        for (unsigned k = counts_[r]; k > 0; --k)
          pairs_[out++] = {cols_[f][r],
                           classification() ? static_cast<double>((*y_)[r]) : (*grad_)[r]};
      }
      for (std::size_t i = lo; i < hi; ++i) counts_[idx_[i]] = 0;
    } else {
      if (classification()) {
        for (std::size_t i = 0; i < m; ++i) {
          const std::size_t r = idx_[lo + i];
          pairs_[i] = {cols_[f][r], static_cast<double>((*y_)[r])};
        }
      } else {
        for (std::size_t i = 0; i < m; ++i) {
          const std::size_t r = idx_[lo + i];
          pairs_[i] = {cols_[f][r], (*grad_)[r]};
        }
      }
      std::sort(pairs_.begin(), pairs_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    if (pairs_.front().first == pairs_.back().first) return;

    const double total = static_cast<double>(m);
    double target_sum = 0.0;
    for (const auto& pr : pairs_) target_sum += pr.second;

    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      left_sum += pairs_[i].second;
      if (pairs_[i + 1].first == pairs_[i].first) continue;
      const double n_left = static_cast<double>(i + 1);
      const double n_right = total - n_left;
      if (n_left < params.min_leaf || n_right < params.min_leaf) continue;
      const double thr = 0.5 * (pairs_[i].first + pairs_[i + 1].first);
      double gain;
      if (classification()) {
        gain = gini(target_sum, total) - (n_left / total) * gini(left_sum, n_left) -
               (n_right / total) * gini(target_sum - left_sum, n_right);
      } else {
        gain = (left_sum * left_sum / n_left +
                (target_sum - left_sum) * (target_sum - left_sum) / n_right -
                target_sum * target_sum / total) /
               total;
      }
      accept(best, f, thr, gain, static_cast<std::size_t>(n_left));
    }
  }

  static void accept(Split& best, std::size_t f, double thr, double gain,
                     std::size_t n_left) {
    if (gain > best.gain) {
      best.feature = static_cast<int>(f);
      best.threshold = thr;
      best.gain = gain;
      best.n_left = n_left;
    }
  }

  std::size_t n_, p_;
  std::vector<std::uint8_t> binary_;
  std::vector<std::vector<double>> cols_;         // column-major feature copy
  std::vector<std::vector<std::size_t>> sorted_;  // per non-binary feature
  std::vector<unsigned> counts_;                  // scratch row multiplicities
  const std::vector<int>* y_ = nullptr;
  const std::vector<double>* grad_ = nullptr;
  const std::vector<double>* hess_ = nullptr;
  std::vector<std::size_t> idx_;
  std::vector<std::size_t> feat_order_;
  std::vector<std::pair<double, double>> pairs_;
};

}  // namespace fairmiss
