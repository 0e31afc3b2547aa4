#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmiss/linear_model.hpp"
#include "fairmiss/table.hpp"

namespace fairmiss {

enum class HandlerKind { listwise_deletion, mode, regression, knn };

inline const char* to_string(HandlerKind h) {
  switch (h) {
    case HandlerKind::listwise_deletion: return "ld";
    case HandlerKind::mode: return "mode";
    case HandlerKind::regression: return "reg";
    case HandlerKind::knn: return "knn";
  }
  return "?";
}

inline HandlerKind handler_from_string(const std::string& s) {
  if (s == "ld") return HandlerKind::listwise_deletion;
  if (s == "mode") return HandlerKind::mode;
  if (s == "reg") return HandlerKind::regression;
  if (s == "knn") return HandlerKind::knn;
  throw std::invalid_argument("unknown handler '" + s + "'");
}

struct Handler {
  HandlerKind kind = HandlerKind::listwise_deletion;
  std::size_t k = 5;  // knn only

  void validate() const {
    if (kind == HandlerKind::knn && k < 1)
      throw std::invalid_argument("knn handler needs k >= 1");
  }
};

/// Removes every row containing a masked cell. Errors when nothing is left,
/// which signals an unusable training set for the iteration.
inline Table listwise_delete(const Table& t) {
  const Table out = complete_cases(t);
  if (out.n_rows() == 0 && t.n_rows() > 0)
    throw std::runtime_error("listwise_delete: all rows removed");
  return out;
}

/// Fills categorical holes with the most frequent observed level (ties go to
/// the first declared level) and numeric holes with the observed mean.
inline Table mode_impute(const Table& t) {
  Table out = t;
  for (std::size_t c = 0; c < t.n_cols(); ++c) {
    const auto& spec = t.spec(c);
    std::vector<std::size_t> holes;
    for (std::size_t r = 0; r < t.n_rows(); ++r)
      if (!t.observed(c, r)) holes.push_back(r);
    if (holes.empty()) continue;

    double fill = 0.0;
    if (spec.kind == ColumnKind::categorical) {
      std::vector<std::size_t> counts(spec.levels.size(), 0);
      std::size_t seen = 0;
      for (std::size_t r = 0; r < t.n_rows(); ++r)
        if (t.observed(c, r)) {
          ++counts[static_cast<std::size_t>(t.cell(c, r))];
          ++seen;
        }
      if (seen == 0)
        throw std::runtime_error("mode_impute: column '" + spec.name + "' fully missing");
      std::size_t best = 0;
      for (std::size_t l = 1; l < counts.size(); ++l)
        if (counts[l] > counts[best]) best = l;
      fill = static_cast<double>(best);
    } else {
      double sum = 0.0;
      std::size_t seen = 0;
      for (std::size_t r = 0; r < t.n_rows(); ++r)
        if (t.observed(c, r)) {
          sum += t.cell(c, r);
          ++seen;
        }
      if (seen == 0)
        throw std::runtime_error("mode_impute: column '" + spec.name + "' fully missing");
      fill = sum / static_cast<double>(seen);
    }
    for (std::size_t r : holes) out.set_cell(c, r, fill);
  }
  return out;
}

namespace detail {

// Indicator encoding of selected columns (no intercept), row by row.
inline std::size_t encoded_width(const Table& t, const std::vector<std::size_t>& cols) {
  std::size_t w = 0;
  for (std::size_t c : cols) {
    const auto& s = t.spec(c);
    w += s.kind == ColumnKind::numeric ? 1 : s.levels.size() - 1;
  }
  return w;
}

inline void encode_row(const Table& t, const std::vector<std::size_t>& cols,
                       std::size_t r, double* dst) {
  std::size_t j = 0;
  for (std::size_t c : cols) {
    const auto& s = t.spec(c);
    if (s.kind == ColumnKind::numeric) {
      dst[j++] = t.cell(c, r);
    } else {
      const auto lev = static_cast<std::size_t>(t.cell(c, r));
      for (std::size_t l = 1; l < s.levels.size(); ++l) dst[j++] = lev == l ? 1.0 : 0.0;
    }
  }
}

}  // namespace detail

/// Per-column conditional models fitted on the complete cases of one table.
/// Each incomplete column is predicted from the fully observed non-outcome
/// columns (the sensitive column included, the outcome never).
class FittedImputer {
 public:
  struct ColumnModel {
    std::size_t target = 0;
    bool numeric_target = true;
    std::vector<std::size_t> regressors;
    // numeric: one row of coefficients; categorical: one row per level
    // (one-vs-rest scores, argmax wins; binary targets use a single model)
    Eigen::MatrixXd betas;
  };

  const std::vector<ColumnModel>& models() const { return models_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Fills every masked cell covered by a fitted model; observed cells are
  /// untouched. Rows keep their order and count.
  Table apply(const Table& t) const {
    Table out = t;
    for (const auto& m : models_) {
      const std::size_t width = detail::encoded_width(t, m.regressors);
      Eigen::VectorXd x(width + 1);
      x[0] = 1.0;
      for (std::size_t r = 0; r < t.n_rows(); ++r) {
        if (t.observed(m.target, r)) continue;
        for (std::size_t c : m.regressors)
          if (!t.observed(c, r))
            throw std::runtime_error("regression imputer: masked regressor '" +
                                     t.spec(c).name + "'");
        detail::encode_row(t, m.regressors, r, x.data() + 1);
        if (m.numeric_target) {
          out.set_cell(m.target, r, m.betas.row(0).dot(x));
        } else if (m.betas.rows() == 1) {
          const double p = logistic(m.betas.row(0).dot(x));
          out.set_cell(m.target, r, p >= 0.5 ? 1.0 : 0.0);
        } else {
          Eigen::Index best = 0;
          double best_score = -std::numeric_limits<double>::infinity();
          for (Eigen::Index l = 0; l < m.betas.rows(); ++l) {
            const double score = m.betas.row(l).dot(x);
            if (score > best_score) {
              best_score = score;
              best = l;
            }
          }
          out.set_cell(m.target, r, static_cast<double>(best));
        }
      }
    }
    return out;
  }

  friend FittedImputer fit_regression_imputer(const Table& train);

 private:
  std::vector<ColumnModel> models_;
  std::vector<std::string> warnings_;
};

/// Fits one conditional model per incomplete column: linear least squares for
/// numeric targets, (one-vs-rest) logistic regression for categorical ones.
/// Fitting uses complete cases only; rank-deficient designs fall back to
/// ridge damping 1e-8 with a warning.
inline FittedImputer fit_regression_imputer(const Table& train) {
  FittedImputer imp;

  std::vector<std::size_t> complete_rows;
  for (std::size_t r = 0; r < train.n_rows(); ++r)
    if (train.row_complete(r)) complete_rows.push_back(r);
  if (complete_rows.empty())
    throw std::runtime_error("fit_regression_imputer: no complete cases");

  std::vector<std::size_t> incomplete_cols, complete_cols;
  for (std::size_t c = 0; c < train.n_cols(); ++c) {
    bool complete = true;
    for (std::size_t r = 0; r < train.n_rows(); ++r)
      if (!train.observed(c, r)) { complete = false; break; }
    if (complete)
      complete_cols.push_back(c);
    else
      incomplete_cols.push_back(c);
  }

  for (std::size_t target : incomplete_cols) {
    FittedImputer::ColumnModel m;
    m.target = target;
    m.numeric_target = train.spec(target).kind == ColumnKind::numeric;
    for (std::size_t c : complete_cols)
      if (train.spec(c).role != Role::outcome) m.regressors.push_back(c);

    const std::size_t width = detail::encoded_width(train, m.regressors);
    Eigen::MatrixXd x(complete_rows.size(), width);
    std::vector<double> buf(width);
    for (std::size_t i = 0; i < complete_rows.size(); ++i) {
      detail::encode_row(train, m.regressors, complete_rows[i], buf.data());
      for (std::size_t j = 0; j < width; ++j)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = buf[j];
    }

    auto warn_if_deficient = [&](const LinearFit& fit) {
      if (fit.rank_deficient)
        imp.warnings_.push_back("column '" + train.spec(target).name +
                                "': rank-deficient design, ridge 1e-8 applied");
    };

    if (m.numeric_target) {
      Eigen::VectorXd y(complete_rows.size());
      for (std::size_t i = 0; i < complete_rows.size(); ++i)
        y[i] = train.cell(target, complete_rows[i]);
      const auto fit = fit_least_squares(x, y);
      warn_if_deficient(fit);
      m.betas = fit.beta.transpose();
    } else {
      const auto n_levels = train.spec(target).levels.size();
      // rank screen shared by every one-vs-rest submodel
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(with_intercept(x));
      const bool deficient = qr.rank() < static_cast<Eigen::Index>(width + 1);
      const double lambda = deficient ? 1e-8 : 0.0;
      if (deficient)
        imp.warnings_.push_back("column '" + train.spec(target).name +
                                "': rank-deficient design, ridge 1e-8 applied");
      if (n_levels == 2) {
        Eigen::VectorXd y(complete_rows.size());
        for (std::size_t i = 0; i < complete_rows.size(); ++i)
          y[i] = train.cell(target, complete_rows[i]);
        m.betas = fit_logistic(x, y, lambda).beta.transpose();
      } else {
        m.betas.resize(static_cast<Eigen::Index>(n_levels),
                       static_cast<Eigen::Index>(width + 1));
        for (std::size_t l = 0; l < n_levels; ++l) {
          Eigen::VectorXd y(complete_rows.size());
          for (std::size_t i = 0; i < complete_rows.size(); ++i)
            y[i] = train.cell(target, complete_rows[i]) == static_cast<double>(l) ? 1.0 : 0.0;
          m.betas.row(static_cast<Eigen::Index>(l)) =
              fit_logistic(x, y, lambda).beta.transpose();
        }
      }
    }
    imp.models_.push_back(std::move(m));
  }
  return imp;
}

inline Table regression_impute(const Table& train) {
  return fit_regression_imputer(train).apply(train);
}

/// Gower-distance k-nearest-neighbour imputation. Donors are the complete
/// cases; distances average range-normalized numeric gaps and categorical
/// mismatches over the predictor and sensitive columns observed in the
/// recipient. Numeric holes take the donor mean, categorical holes the donor
/// mode; distance ties prefer the lower row index, mode ties the first
/// declared level.
inline Table knn_impute(const Table& train, std::size_t k) {
  if (k < 1) throw std::invalid_argument("knn_impute: k must be >= 1");

  std::vector<std::size_t> donors;
  for (std::size_t r = 0; r < train.n_rows(); ++r)
    if (train.row_complete(r)) donors.push_back(r);
  if (donors.size() < k)
    throw std::runtime_error("knn_impute: fewer than k=" + std::to_string(k) +
                             " complete-case donors");

  std::vector<std::size_t> dist_cols;
  std::vector<double> range(train.n_cols(), 0.0);
  for (std::size_t c = 0; c < train.n_cols(); ++c) {
    const auto& s = train.spec(c);
    if (s.role == Role::outcome) continue;
    dist_cols.push_back(c);
    if (s.kind == ColumnKind::numeric) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t r = 0; r < train.n_rows(); ++r)
        if (train.observed(c, r)) {
          lo = std::min(lo, train.cell(c, r));
          hi = std::max(hi, train.cell(c, r));
        }
      range[c] = hi > lo ? hi - lo : 0.0;
    }
  }

  Table out = train;
  std::vector<std::pair<double, std::size_t>> scored(donors.size());
  for (std::size_t r = 0; r < train.n_rows(); ++r) {
    if (train.row_complete(r)) continue;

    for (std::size_t d = 0; d < donors.size(); ++d) {
      const std::size_t dr = donors[d];
      double acc = 0.0;
      std::size_t used = 0;
      for (std::size_t c : dist_cols) {
        if (!train.observed(c, r)) continue;
        const auto& s = train.spec(c);
        if (s.kind == ColumnKind::numeric) {
          acc += range[c] > 0.0
                     ? std::fabs(train.cell(c, r) - train.cell(c, dr)) / range[c]
                     : 0.0;
        } else {
          acc += train.cell(c, r) == train.cell(c, dr) ? 0.0 : 1.0;
        }
        ++used;
      }
      scored[d] = {used > 0 ? acc / static_cast<double>(used) : 0.0, dr};
    }
    std::partial_sort(scored.begin(), scored.begin() + static_cast<long>(k), scored.end());

    for (std::size_t c = 0; c < train.n_cols(); ++c) {
      if (train.observed(c, r)) continue;
      const auto& s = train.spec(c);
      if (s.kind == ColumnKind::numeric) {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += train.cell(c, scored[i].second);
        out.set_cell(c, r, sum / static_cast<double>(k));
      } else {
        std::vector<std::size_t> counts(s.levels.size(), 0);
        for (std::size_t i = 0; i < k; ++i)
          ++counts[static_cast<std::size_t>(train.cell(c, scored[i].second))];
        std::size_t best = 0;
        for (std::size_t l = 1; l < counts.size(); ++l)
          if (counts[l] > counts[best]) best = l;
        out.set_cell(c, r, static_cast<double>(best));
      }
    }
  }
  return out;
}

/// Dispatches to the configured missing-data handler.
inline Table apply_handler(const Table& train, const Handler& h) {
  h.validate();
  switch (h.kind) {
    case HandlerKind::listwise_deletion: return listwise_delete(train);
    case HandlerKind::mode: return mode_impute(train);
    case HandlerKind::regression: return regression_impute(train);
    case HandlerKind::knn: return knn_impute(train, h.k);
  }
  throw std::logic_error("apply_handler: unreachable");
}

}  // namespace fairmiss
