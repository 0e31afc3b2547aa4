#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fairmiss/boosting.hpp"
#include "fairmiss/forest.hpp"
#include "fairmiss/linear_model.hpp"
#include "fairmiss/random.hpp"
#include "fairmiss/svm.hpp"
#include "fairmiss/table.hpp"
#include "fairmiss/tree.hpp"

namespace fairmiss {

enum class ModelKind { lr, rf, boost, svm_rbf };

inline const char* to_string(ModelKind m) {
  switch (m) {
    case ModelKind::lr: return "lr";
    case ModelKind::rf: return "rf";
    case ModelKind::boost: return "boost";
    case ModelKind::svm_rbf: return "svm";
  }
  return "?";
}

inline ModelKind model_from_string(const std::string& s) {
  if (s == "lr") return ModelKind::lr;
  if (s == "rf") return ModelKind::rf;
  if (s == "boost" || s == "b") return ModelKind::boost;
  if (s == "svm" || s == "svm_rbf") return ModelKind::svm_rbf;
  throw std::invalid_argument("unknown model '" + s + "'");
}

struct LrHyper {
  double lambda = 0.1;  // L2 strength
};
struct RfHyper {
  std::size_t trees = 200;
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t mtry = 0;       // 0 = floor(sqrt(p))
};
struct BoostHyper {
  std::size_t trees = 100;
  double rate = 0.1;
  std::size_t depth = 2;
};
struct SvmHyper {
  double c = 1.0;
  double gamma_scale = 1.0;  // gamma = gamma_scale / n_features
};

struct HyperGrid {
  std::vector<LrHyper> lr{{0.0}, {0.01}, {0.1}, {1.0}};
  std::vector<RfHyper> rf{{200, 0, 0}, {200, 8, 0}};
  std::vector<BoostHyper> boost{{100, 0.1, 2}, {300, 0.1, 2}, {100, 0.1, 3}, {300, 0.1, 3}};
  std::vector<SvmHyper> svm{{0.1, 1.0}, {0.1, 2.0}, {1.0, 1.0},
                            {1.0, 2.0}, {10.0, 1.0}, {10.0, 2.0}};

  std::size_t size(ModelKind kind) const {
    switch (kind) {
      case ModelKind::lr: return lr.size();
      case ModelKind::rf: return rf.size();
      case ModelKind::boost: return boost.size();
      case ModelKind::svm_rbf: return svm.size();
    }
    return 0;
  }
  void validate() const {
    if (lr.empty() || rf.empty() || boost.empty() || svm.empty())
      throw std::invalid_argument("hyper grid has an empty candidate list");
  }
};

/// Column-wise centering/scaling fitted on training data; 0/1 indicator
/// columns are left untouched, everything else is standardized.
struct StandardScaler {
  std::vector<double> mean, scale;

  void fit(const double* x, std::size_t n, std::size_t p) {
    mean.assign(p, 0.0);
    scale.assign(p, 1.0);
    for (std::size_t c = 0; c < p; ++c) {
      bool indicator = true;
      double m = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double v = x[r * p + c];
        if (v != 0.0 && v != 1.0) indicator = false;
        m += v;
      }
      if (indicator) continue;
      m /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const double d = x[r * p + c] - m;
        var += d * d;
      }
      var /= static_cast<double>(n);
      mean[c] = m;
      scale[c] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
  }

  std::vector<double> transform(const double* x, std::size_t n, std::size_t p) const {
    std::vector<double> out(n * p);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < p; ++c)
        out[r * p + c] = (x[r * p + c] - mean[c]) / scale[c];
    return out;
  }
};

struct LrModel {
  StandardScaler scaler;
  Eigen::VectorXd beta;
  bool converged = true;
};

struct SvmWrapped {
  StandardScaler scaler;
  SvmModel svm;
};

/// A fitted classifier with its chosen hyperparameters. Predicts labels in
/// {0, 1}; the sensitive column never enters the design matrix, so predictions
/// cannot depend on it.
struct TrainedModel {
  ModelKind kind = ModelKind::lr;
  std::size_t n_features = 0;
  std::variant<LrModel, ForestModel, BoostModel, SvmWrapped> impl;
  std::vector<std::string> notes;

  int predict_row(const double* row) const {
    switch (kind) {
      case ModelKind::lr: {
        const auto& m = std::get<LrModel>(impl);
        double eta = m.beta[0];
        for (std::size_t c = 0; c < n_features; ++c)
          eta += m.beta[static_cast<Eigen::Index>(c + 1)] *
                 ((row[c] - m.scaler.mean[c]) / m.scaler.scale[c]);
        return eta >= 0.0 ? 1 : 0;  // probability >= 0.5
      }
      case ModelKind::rf:
        return std::get<ForestModel>(impl).predict_row(row);
      case ModelKind::boost:
        return std::get<BoostModel>(impl).predict_row(row);
      case ModelKind::svm_rbf: {
        const auto& m = std::get<SvmWrapped>(impl);
        std::vector<double> z(n_features);
        for (std::size_t c = 0; c < n_features; ++c)
          z[c] = (row[c] - m.scaler.mean[c]) / m.scaler.scale[c];
        return m.svm.predict_row(z.data(), n_features);
      }
    }
    return 0;
  }

  std::vector<int> predict(const DesignMatrix& m) const {
    if (m.n_cols != n_features)
      throw std::invalid_argument("predict: feature count mismatch");
    std::vector<int> out(m.n_rows);
    for (std::size_t r = 0; r < m.n_rows; ++r) out[r] = predict_row(m.row(r));
    return out;
  }
};

namespace detail {
inline void require_both_classes(const std::vector<int>& y) {
  bool has0 = false, has1 = false;
  for (int v : y) (v == 1 ? has1 : has0) = true;
  if (!has0 || !has1)
    throw std::invalid_argument("training labels are constant; both classes required");
}
}  // namespace detail

/// Fits one classifier at a fixed grid point. rng drives only the stochastic
/// parts (random forest bootstraps and feature subsets).
inline TrainedModel fit_model(ModelKind kind, const HyperGrid& grid, std::size_t hyper_index,
                              const DesignMatrix& x, const std::vector<int>& y, Rng& rng) {
  if (x.n_rows != y.size()) throw std::invalid_argument("fit_model: size mismatch");
  if (x.n_rows == 0) throw std::invalid_argument("fit_model: empty training set");
  detail::require_both_classes(y);
  if (hyper_index >= grid.size(kind))
    throw std::out_of_range("fit_model: hyper index out of range");

  TrainedModel model;
  model.kind = kind;
  model.n_features = x.n_cols;

  switch (kind) {
    case ModelKind::lr: {
      LrModel m;
      m.scaler.fit(x.values.data(), x.n_rows, x.n_cols);
      const auto z = m.scaler.transform(x.values.data(), x.n_rows, x.n_cols);
      Eigen::MatrixXd xm(x.n_rows, x.n_cols);
      for (std::size_t r = 0; r < x.n_rows; ++r)
        for (std::size_t c = 0; c < x.n_cols; ++c)
          xm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z[r * x.n_cols + c];
      Eigen::VectorXd yv(x.n_rows);
      for (std::size_t r = 0; r < x.n_rows; ++r) yv[static_cast<Eigen::Index>(r)] = y[r];
      const auto fit = fit_logistic(xm, yv, grid.lr[hyper_index].lambda);
      m.beta = fit.beta;
      m.converged = fit.converged;
      if (!fit.converged) model.notes.push_back("lr: IRLS iteration cap reached");
      model.impl = std::move(m);
      break;
    }
    case ModelKind::rf: {
      const auto& h = grid.rf[hyper_index];
      ForestParams fp;
      fp.n_trees = h.trees;
      fp.max_depth = h.max_depth;
      fp.mtry = h.mtry;
      model.impl = fit_forest(x.values.data(), x.n_rows, x.n_cols, y, fp, rng);
      break;
    }
    case ModelKind::boost: {
      const auto& h = grid.boost[hyper_index];
      BoostParams bp;
      bp.n_trees = h.trees;
      bp.learning_rate = h.rate;
      bp.max_depth = h.depth;
      model.impl = fit_boost(x.values.data(), x.n_rows, x.n_cols, y, bp);
      break;
    }
    case ModelKind::svm_rbf: {
      const auto& h = grid.svm[hyper_index];
      SvmWrapped m;
      m.scaler.fit(x.values.data(), x.n_rows, x.n_cols);
      const auto z = m.scaler.transform(x.values.data(), x.n_rows, x.n_cols);
      SvmParams sp;
      sp.c = h.c;
      sp.gamma = h.gamma_scale / static_cast<double>(x.n_cols);
      m.svm = fit_svm(z.data(), x.n_rows, x.n_cols, y, sp);
      if (!m.svm.converged) model.notes.push_back("svm: SMO step cap reached");
      model.impl = std::move(m);
      break;
    }
  }
  return model;
}

inline DesignMatrix select_rows(const DesignMatrix& m, const std::vector<std::size_t>& rows) {
  DesignMatrix out;
  out.n_rows = rows.size();
  out.n_cols = m.n_cols;
  out.names = m.names;
  out.values.resize(rows.size() * m.n_cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(m.row(rows[i]), m.row(rows[i]) + m.n_cols, out.values.data() + i * m.n_cols);
  return out;
}

struct CvResult {
  std::size_t chosen = 0;
  std::vector<double> mean_accuracy;  // per grid point
  std::size_t folds_used = 0;
  std::vector<std::string> notes;
};

/// 5-fold (by default) cross-validation over the grid, maximizing mean fold
/// accuracy; ties go to the earliest grid point. The fold partition is a
/// seed-deterministic shuffle dealt round-robin. A fold whose training
/// complement lacks a class triggers a re-deal with one fewer fold (a merge),
/// with a note.
inline CvResult cross_validate(ModelKind kind, const HyperGrid& grid, const DesignMatrix& x,
                               const std::vector<int>& y, std::size_t folds, Rng& rng) {
  grid.validate();
  if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
  detail::require_both_classes(y);

  std::vector<std::size_t> order(x.n_rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  const std::uint64_t fit_seed = rng.next_u64();

  CvResult result;
  std::vector<std::vector<std::size_t>> fold_rows;
  for (std::size_t k = folds; k >= 2; --k) {
    fold_rows.assign(k, {});
    for (std::size_t i = 0; i < order.size(); ++i) fold_rows[i % k].push_back(order[i]);
    bool ok = true;
    for (std::size_t f = 0; f < k && ok; ++f) {
      bool has0 = false, has1 = false;
      for (std::size_t g = 0; g < k; ++g) {
        if (g == f) continue;
        for (std::size_t r : fold_rows[g]) (y[r] == 1 ? has1 : has0) = true;
      }
      ok = has0 && has1 && !fold_rows[f].empty();
    }
    if (ok) {
      result.folds_used = k;
      break;
    }
    result.notes.push_back("fold missing a class at k=" + std::to_string(k) +
                           "; merging folds");
    fold_rows.clear();
  }
  if (fold_rows.empty()) {
    result.notes.push_back("cross-validation degenerate; defaulting to first grid point");
    result.mean_accuracy.assign(grid.size(kind), 0.0);
    return result;
  }

  const std::size_t n_points = grid.size(kind);
  result.mean_accuracy.assign(n_points, 0.0);
  for (std::size_t f = 0; f < result.folds_used; ++f) {
    std::vector<std::size_t> train_rows;
    for (std::size_t g = 0; g < result.folds_used; ++g)
      if (g != f) train_rows.insert(train_rows.end(), fold_rows[g].begin(), fold_rows[g].end());
    const auto xtrain = select_rows(x, train_rows);
    const auto xval = select_rows(x, fold_rows[f]);
    std::vector<int> ytrain, yval;
    for (std::size_t r : train_rows) ytrain.push_back(y[r]);
    for (std::size_t r : fold_rows[f]) yval.push_back(y[r]);

    if (kind == ModelKind::boost) {
      // boosting is deterministic and prefix-closed: fit one run per
      // (depth, rate) at the largest tree count and read the smaller
      // candidates off the staged decision values
      std::map<std::pair<std::size_t, double>, std::vector<std::size_t>> batches;
      for (std::size_t g = 0; g < n_points; ++g)
        batches[{grid.boost[g].depth, grid.boost[g].rate}].push_back(g);
      for (auto& [key, members] : batches) {
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
          return grid.boost[a].trees < grid.boost[b].trees;
        });
        BoostParams bp;
        bp.max_depth = key.first;
        bp.learning_rate = key.second;
        bp.n_trees = grid.boost[members.back()].trees;
        bp.track_staged_loss = false;
        const auto model =
            fit_boost(xtrain.values.data(), xtrain.n_rows, xtrain.n_cols, ytrain, bp);
        std::vector<double> fx(xval.n_rows, model.f0);
        std::size_t next_tree = 0;
        for (const std::size_t g : members) {
          for (; next_tree < grid.boost[g].trees && next_tree < model.trees.size();
               ++next_tree)
            for (std::size_t i = 0; i < xval.n_rows; ++i)
              fx[i] += model.learning_rate * model.trees[next_tree].predict_row(xval.row(i));
          std::size_t hits = 0;
          for (std::size_t i = 0; i < xval.n_rows; ++i)
            if ((fx[i] >= 0.0 ? 1 : 0) == yval[i]) ++hits;
          result.mean_accuracy[g] +=
              static_cast<double>(hits) / static_cast<double>(xval.n_rows);
        }
      }
      continue;
    }

    for (std::size_t g = 0; g < n_points; ++g) {
      Rng fit_rng(derive_seed(fit_seed, {seed_tag::fit, f, g}));
      const auto model = fit_model(kind, grid, g, xtrain, ytrain, fit_rng);
      const auto pred = model.predict(xval);
      std::size_t hits = 0;
      for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == yval[i]) ++hits;
      result.mean_accuracy[g] +=
          static_cast<double>(hits) / static_cast<double>(pred.size());
    }
  }
  for (auto& a : result.mean_accuracy) a /= static_cast<double>(result.folds_used);

  for (std::size_t g = 1; g < n_points; ++g)
    if (result.mean_accuracy[g] > result.mean_accuracy[result.chosen]) result.chosen = g;
  return result;
}

/// Mean decrease in Gini impurity per feature, normalized to sum 1.
inline std::vector<double> rf_variable_importance(const TrainedModel& model) {
  if (model.kind != ModelKind::rf)
    throw std::invalid_argument("rf_variable_importance: model is not a random forest");
  return std::get<ForestModel>(model.impl).importance;
}

}  // namespace fairmiss
