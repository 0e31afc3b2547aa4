#pragma once

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmiss/distributions.hpp"
#include "fairmiss/random.hpp"
#include "fairmiss/table.hpp"

namespace fairmiss {

enum class Mechanism { MCAR, MAR, MNAR };

inline const char* to_string(Mechanism m) {
  switch (m) {
    case Mechanism::MCAR: return "MCAR";
    case Mechanism::MAR: return "MAR";
    case Mechanism::MNAR: return "MNAR";
  }
  return "?";
}

inline Mechanism mechanism_from_string(const std::string& s) {
  if (s == "MCAR") return Mechanism::MCAR;
  if (s == "MAR") return Mechanism::MAR;
  if (s == "MNAR") return Mechanism::MNAR;
  throw std::invalid_argument("unknown mechanism '" + s + "'");
}

enum class TailDirection { right, left };

/// One missingness pattern: which columns go missing for rows assigned to it,
/// how often rows draw this pattern, and the weighted-sum-score recipe that
/// ranks candidate rows for mechanism-dependent amputation.
struct MissingnessPattern {
  std::set<std::string> missing_columns;
  double frequency = 1.0;
  std::map<std::string, double> weights;  // empty or all-zero = MCAR scoring
  TailDirection direction = TailDirection::right;

  bool weights_all_zero() const {
    for (const auto& [_, w] : weights)
      if (w != 0.0) return false;
    return true;
  }
};

/// Full recipe for injecting synthetic missingness into a complete table.
struct AmputeConfig {
  Mechanism mechanism = Mechanism::MCAR;
  double proportion = 0.5;  // target share of amputed rows
  std::vector<MissingnessPattern> patterns;

  void validate(const Table& t) const {
    if (!(proportion > 0.0 && proportion < 1.0))
      throw std::invalid_argument("ampute: proportion must be in (0, 1)");
    if (patterns.empty()) throw std::invalid_argument("ampute: empty pattern list");
    double freq_sum = 0.0;
    for (const auto& p : patterns) {
      if (!(p.frequency > 0.0 && p.frequency <= 1.0))
        throw std::invalid_argument("ampute: pattern frequency must be in (0, 1]");
      freq_sum += p.frequency;
      if (p.missing_columns.empty())
        throw std::invalid_argument("ampute: pattern misses no columns");
      for (const auto& name : p.missing_columns) {
        const auto& spec = t.spec(t.column_index(name));
        if (spec.role != Role::predictor)
          throw std::invalid_argument("ampute: cannot ampute " +
                                      std::string(to_string(spec.role)) +
                                      " column '" + name + "'");
      }
      for (const auto& [name, w] : p.weights) {
        const auto& spec = t.spec(t.column_index(name));
        if (w != 0.0 && spec.kind == ColumnKind::categorical && !spec.has_ordinal())
          throw std::invalid_argument("ampute: weighted categorical column '" + name +
                                      "' needs an ordinal encoding");
      }
      if (mechanism == Mechanism::MCAR && !p.weights_all_zero())
        throw std::invalid_argument("ampute: MCAR patterns must have zero weights");
    }
    if (std::fabs(freq_sum - 1.0) > 1e-9)
      throw std::invalid_argument("ampute: pattern frequencies must sum to 1");
  }
};

struct AmputedTable {
  Table table;
  double realized_proportion = 0.0;     // amputed rows / total rows
  double realized_cell_proportion = 0.0;  // masked cells / total cells
  std::map<std::size_t, std::size_t> per_pattern_counts;  // pattern -> amputed rows
  std::vector<std::string> warnings;
};

/// Assigns every row one candidate pattern; expected share per pattern equals
/// its frequency. Deterministic per seed.
inline std::vector<std::size_t> assign_patterns(
    std::size_t n, const std::vector<MissingnessPattern>& patterns, Rng& rng) {
  if (patterns.empty()) throw std::invalid_argument("assign_patterns: empty pattern list");
  std::vector<double> cum;
  double acc = 0.0;
  for (const auto& p : patterns) {
    acc += p.frequency;
    cum.push_back(acc);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double u = rng.uniform() * acc;
    std::size_t k = 0;
    while (k + 1 < cum.size() && u >= cum[k]) ++k;
    assignment[r] = k;
  }
  return assignment;
}

/// score_i = sum_j w_j * z_ij with z standardized to mean 0, sd 1 (population
/// convention) over the given candidate rows. Categorical columns contribute
/// their ordinal rank. A zero-variance weighted column contributes 0.
inline std::vector<double> weighted_sum_scores(
    const Table& t, const std::map<std::string, double>& weights,
    const std::vector<std::size_t>& candidate_rows,
    std::vector<std::string>* warnings = nullptr) {
  std::vector<double> scores(candidate_rows.size(), 0.0);
  const double n = static_cast<double>(candidate_rows.size());
  if (candidate_rows.empty()) return scores;
  for (const auto& [name, w] : weights) {
    if (w == 0.0) continue;
    const std::size_t c = t.column_index(name);
    const auto& spec = t.spec(c);
    std::vector<double> raw(candidate_rows.size());
    for (std::size_t i = 0; i < candidate_rows.size(); ++i) {
      const std::size_t r = candidate_rows[i];
      if (!t.observed(c, r))
        throw std::runtime_error("weighted_sum_scores: masked cell in weighted column '" +
                                 name + "'");
      double v = t.cell(c, r);
      if (spec.kind == ColumnKind::categorical) {
        if (!spec.has_ordinal())
          throw std::runtime_error("weighted_sum_scores: column '" + name +
                                   "' lacks an ordinal encoding");
        v = spec.ordinal_rank[static_cast<std::size_t>(v)];
      }
      raw[i] = v;
    }
    double mean = 0.0;
    for (double v : raw) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : raw) var += (v - mean) * (v - mean);
    var /= n;
    if (var <= 0.0) {
      if (warnings)
        warnings->push_back("weighted column '" + name +
                            "' has zero variance; contributes 0 to scores");
      continue;
    }
    const double inv_sd = 1.0 / std::sqrt(var);
    for (std::size_t i = 0; i < raw.size(); ++i) scores[i] += w * (raw[i] - mean) * inv_sd;
  }
  return scores;
}

/// Finds b with mean(logistic(score_i + b)) = target within 1e-6 by bisection
/// on [-50, 50].
inline double solve_probability_shift(const std::vector<double>& scores, double target) {
  if (!(target > 0.0 && target < 1.0))
    throw std::invalid_argument("solve_probability_shift: target must be in (0, 1)");
  auto mean_prob = [&](double b) {
    double s = 0.0;
    for (double v : scores) s += logistic(v + b);
    return s / static_cast<double>(scores.size());
  };
  double lo = -50.0, hi = 50.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double m = mean_prob(mid);
    if (std::fabs(m - target) <= 1e-6) return mid;
    if (m < target)
      lo = mid;
    else
      hi = mid;
  }
  throw std::runtime_error("solve_probability_shift: no convergence in 200 steps");
}

/// Injects missingness per the config: rows draw a pattern, candidate rows of
/// each pattern are amputed with probability logistic(+/-score + b) where b is
/// solved to hit the target proportion (MCAR uses the constant proportion).
/// Sensitive and outcome columns are never touched.
inline AmputedTable ampute(const Table& t, const AmputeConfig& config, Rng& rng) {
  if (!t.fully_observed())
    throw std::invalid_argument("ampute: input table must be fully observed");
  config.validate(t);

  AmputedTable out;
  out.table = t;
  const auto assignment = assign_patterns(t.n_rows(), config.patterns, rng);

  std::vector<std::vector<std::size_t>> candidates(config.patterns.size());
  for (std::size_t r = 0; r < t.n_rows(); ++r) candidates[assignment[r]].push_back(r);

  std::size_t amputed_rows = 0;
  std::size_t masked_cells = 0;
  for (std::size_t k = 0; k < config.patterns.size(); ++k) {
    const auto& pattern = config.patterns[k];
    const auto& rows = candidates[k];
    out.per_pattern_counts[k] = 0;
    if (rows.empty()) continue;

    std::vector<double> prob(rows.size(), config.proportion);
    if (!pattern.weights_all_zero()) {
      auto scores = weighted_sum_scores(t, pattern.weights, rows, &out.warnings);
      if (pattern.direction == TailDirection::left)
        for (auto& s : scores) s = -s;
      const double b = solve_probability_shift(scores, config.proportion);
      for (std::size_t i = 0; i < rows.size(); ++i) prob[i] = logistic(scores[i] + b);
    }

    std::vector<std::size_t> cols;
    for (const auto& name : pattern.missing_columns) cols.push_back(t.column_index(name));

    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rng.uniform() < prob[i]) {
        for (std::size_t c : cols) out.table.set_missing(c, rows[i]);
        masked_cells += cols.size();
        ++amputed_rows;
        ++out.per_pattern_counts[k];
      }
    }
  }
  out.realized_proportion =
      static_cast<double>(amputed_rows) / static_cast<double>(t.n_rows());
  out.realized_cell_proportion = static_cast<double>(masked_cells) /
                                 static_cast<double>(t.n_rows() * t.n_cols());
  return out;
}

}  // namespace fairmiss
