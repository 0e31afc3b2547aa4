#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fairmiss/distributions.hpp"
#include "fairmiss/tree.hpp"

namespace fairmiss {

struct BoostParams {
  std::size_t n_trees = 100;
  double learning_rate = 0.1;
  std::size_t max_depth = 2;
  bool track_staged_loss = true;
};

/// Gradient boosting on the logistic loss with shallow regression trees fitted
/// to pseudo-residuals; leaves carry the per-leaf Newton step.
struct BoostModel {
  double f0 = 0.0;
  double learning_rate = 0.1;
  std::vector<DecisionTree> trees;
  std::vector<double> staged_train_loss;  // mean logistic loss after each stage

  double decision(const double* row) const {
    double f = f0;
    for (const auto& t : trees) f += learning_rate * t.predict_row(row);
    return f;
  }
  /// Label 1 iff the predicted probability reaches 0.5.
  int predict_row(const double* row) const { return decision(row) >= 0.0 ? 1 : 0; }
};

namespace detail {
inline double mean_logistic_loss(const std::vector<double>& f, const std::vector<int>& y) {
  double loss = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double e = f[i];
    const double softplus = e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    loss += softplus - static_cast<double>(y[i]) * e;
  }
  return loss / static_cast<double>(f.size());
}
}  // namespace detail

inline BoostModel fit_boost(const double* x, std::size_t n, std::size_t p,
                            const std::vector<int>& y, const BoostParams& params) {
  if (n == 0 || p == 0) throw std::invalid_argument("fit_boost: empty data");
  std::size_t ones = 0;
  for (int v : y) ones += static_cast<std::size_t>(v);
  if (ones == 0 || ones == n)
    throw std::invalid_argument("fit_boost: training labels are constant");

  BoostModel model;
  model.learning_rate = params.learning_rate;
  const double p1 = static_cast<double>(ones) / static_cast<double>(n);
  model.f0 = std::log(p1 / (1.0 - p1));

  std::vector<double> f(n, model.f0), grad(n), hess(n);
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;

  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_leaf = 1;

  TreeBuilder builder(x, n, p);
  if (params.track_staged_loss) {
    model.staged_train_loss.reserve(params.n_trees + 1);
    model.staged_train_loss.push_back(detail::mean_logistic_loss(f, y));
  }
  for (std::size_t stage = 0; stage < params.n_trees; ++stage) {
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = logistic(f[i]);
      grad[i] = static_cast<double>(y[i]) - prob;
      hess[i] = std::max(prob * (1.0 - prob), 1e-12);
    }
    model.trees.push_back(builder.build_regression(rows, grad, hess, tp));
    const auto& tree = model.trees.back();
    for (std::size_t i = 0; i < n; ++i)
      f[i] += params.learning_rate * tree.predict_row(x + i * p);
    if (params.track_staged_loss)
      model.staged_train_loss.push_back(detail::mean_logistic_loss(f, y));
  }
  return model;
}

}  // namespace fairmiss
