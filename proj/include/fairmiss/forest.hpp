#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fairmiss/random.hpp"
#include "fairmiss/tree.hpp"

namespace fairmiss {

struct ForestParams {
  std::size_t n_trees = 200;
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t mtry = 0;       // 0 = floor(sqrt(p))
  std::size_t min_leaf = 1;
};

/// Bagged Gini CART ensemble with per-split random feature subsets.
struct ForestModel {
  std::vector<DecisionTree> trees;
  std::vector<double> importance;  // mean decrease in Gini impurity, sums to 1

  /// Majority vote over trees; exact ties predict the positive class.
  int predict_row(const double* row) const {
    std::size_t votes = 0;
    for (const auto& t : trees)
      if (t.predict_row(row) >= 0.5) ++votes;
    return 2 * votes >= trees.size() ? 1 : 0;
  }
};

inline ForestModel fit_forest(const double* x, std::size_t n, std::size_t p,
                              const std::vector<int>& y, const ForestParams& params,
                              Rng& rng) {
  if (n == 0 || p == 0) throw std::invalid_argument("fit_forest: empty data");
  ForestModel model;
  model.importance.assign(p, 0.0);

  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_leaf = params.min_leaf;
  tp.mtry = params.mtry > 0
                ? params.mtry
                : std::max<std::size_t>(1, static_cast<std::size_t>(
                                               std::floor(std::sqrt(static_cast<double>(p)))));

  TreeBuilder builder(x, n, p);
  std::vector<std::size_t> sample(n);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    for (auto& s : sample) s = rng.index(n);  // bootstrap
    model.trees.push_back(builder.build_classification(
        sample, y, tp, &rng, &model.importance, static_cast<double>(n)));
  }

  double total = 0.0;
  for (double v : model.importance) total += v;
  if (total > 0.0)
    for (auto& v : model.importance) v /= total;
  else
    for (auto& v : model.importance) v = 1.0 / static_cast<double>(p);
  return model;
}

}  // namespace fairmiss
