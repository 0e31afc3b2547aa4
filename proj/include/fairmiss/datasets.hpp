#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmiss/ampute.hpp"
#include "fairmiss/random.hpp"
#include "fairmiss/schemas_builtin.hpp"
#include "fairmiss/table.hpp"

namespace fairmiss {

struct SensitiveVariant {
  std::string name;
  std::string column;
  BinarizeRule rule;
};

/// Declarative description of a benchmark dataset: column specs, the
/// sensitive-attribute binarizations, the outcome orientation, and which
/// variables receive synthetic missingness.
struct DatasetSchema {
  std::string id;
  std::vector<ColumnSpec> columns;
  std::vector<SensitiveVariant> sensitive_variants;
  std::string outcome_column;
  std::string positive_level;
  std::vector<std::string> amputed_variables;
  std::string mar_dependency;  // sensitive column anchoring MAR; the harness
                               // points this at the active variant
  std::size_t expected_rows = 0;

  const SensitiveVariant& variant(const std::string& name) const {
    for (const auto& v : sensitive_variants)
      if (v.name == name) return v;
    throw std::out_of_range("schema '" + id + "' has no sensitive variant '" + name + "'");
  }

  const ColumnSpec& column(const std::string& name) const {
    for (const auto& c : columns)
      if (c.name == name) return c;
    throw std::out_of_range("schema '" + id + "' has no column '" + name + "'");
  }

  void validate() const {
    std::size_t outcomes = 0, sensitives = 0;
    for (const auto& c : columns) {
      c.validate();
      if (c.role == Role::outcome) ++outcomes;
      if (c.role == Role::sensitive) ++sensitives;
    }
    if (outcomes != 1) throw std::invalid_argument("schema needs exactly one outcome column");
    if (sensitives == 0) throw std::invalid_argument("schema needs a sensitive column");
    if (sensitive_variants.empty())
      throw std::invalid_argument("schema needs at least one sensitive variant");
    if (amputed_variables.empty() || amputed_variables.size() > 2)
      throw std::invalid_argument("schema must ampute one or two variables");
    for (const auto& name : amputed_variables) {
      const auto& c = column(name);
      if (c.role != Role::predictor)
        throw std::invalid_argument("amputed variable '" + name + "' must be a predictor");
    }
    const auto& oc = column(outcome_column);
    bool has_positive = false;
    for (const auto& l : oc.levels) has_positive |= l == positive_level;
    if (!has_positive)
      throw std::invalid_argument("positive outcome level '" + positive_level +
                                  "' not declared");
  }
};

namespace detail {

inline DatasetSchema schema_from_json_obj(const nlohmann::json& j) {
  DatasetSchema s;
  s.id = j.at("id").get<std::string>();
  s.expected_rows = j.value("expected_rows", 0u);
  for (const auto& jc : j.at("columns")) {
    ColumnSpec c;
    c.name = jc.at("name").get<std::string>();
    const auto kind = jc.at("kind").get<std::string>();
    if (kind == "numeric")
      c.kind = ColumnKind::numeric;
    else if (kind == "categorical")
      c.kind = ColumnKind::categorical;
    else
      throw std::invalid_argument("schema: unknown column kind '" + kind + "'");
    const auto role = jc.at("role").get<std::string>();
    if (role == "predictor")
      c.role = Role::predictor;
    else if (role == "sensitive")
      c.role = Role::sensitive;
    else if (role == "outcome")
      c.role = Role::outcome;
    else
      throw std::invalid_argument("schema: unknown role '" + role + "'");
    if (jc.contains("levels"))
      c.levels = jc.at("levels").get<std::vector<std::string>>();
    if (jc.contains("ordinal"))
      c.ordinal_rank = jc.at("ordinal").get<std::vector<double>>();
    s.columns.push_back(std::move(c));
  }
  s.outcome_column = j.at("outcome").at("column").get<std::string>();
  s.positive_level = j.at("outcome").at("positive").get<std::string>();
  for (const auto& jv : j.at("sensitive_variants")) {
    SensitiveVariant v;
    v.name = jv.at("name").get<std::string>();
    v.column = jv.at("column").get<std::string>();
    v.rule.column = v.column;
    if (jv.contains("threshold")) {
      v.rule.threshold = jv.at("threshold").get<double>();
    } else {
      const auto privileged = jv.at("privileged_levels").get<std::set<std::string>>();
      for (const auto& level : s.column(v.column).levels)
        v.rule.level_map[level] = privileged.count(level) ? 1 : 0;
    }
    s.sensitive_variants.push_back(std::move(v));
  }
  s.amputed_variables = j.at("amputed_variables").get<std::vector<std::string>>();
  s.mar_dependency = s.sensitive_variants.front().column;
  s.validate();
  return s;
}

}  // namespace detail

inline DatasetSchema schema_from_json(const std::string& text) {
  return detail::schema_from_json_obj(nlohmann::json::parse(text));
}

inline DatasetSchema schema_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema file '" + path + "'");
  nlohmann::json j;
  in >> j;
  return detail::schema_from_json_obj(j);
}

inline const char* builtin_schema_json(const std::string& id) {
  if (id == "german") return builtin::german_schema_json;
  if (id == "adult") return builtin::adult_schema_json;
  if (id == "compas") return builtin::compas_schema_json;
  throw std::invalid_argument("unknown dataset id '" + id + "'");
}

/// Frozen built-in schema for german / adult / compas. Pure: repeated calls
/// return identical schemas. Edited copies can be loaded with
/// schema_from_file instead.
inline DatasetSchema schema_for(const std::string& id) {
  return schema_from_json(builtin_schema_json(id));
}

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  std::size_t n_rows = 0;
  std::size_t expected_rows = 0;
  std::size_t incomplete_rows = 0;
  std::size_t sensitive_or_outcome_missing = 0;
  std::map<std::string, std::size_t> missing_per_column;
  std::vector<CellIssue> issues;

  bool row_count_matches() const {
    return expected_rows == 0 || n_rows == expected_rows;
  }

  std::string render() const {
    std::ostringstream os;
    os << "rows: " << n_rows;
    if (expected_rows > 0)
      os << " (expected " << expected_rows << (row_count_matches() ? ", ok" : ", MISMATCH")
         << ")";
    os << "\nincomplete rows: " << incomplete_rows;
    os << "\nsensitive/outcome cells missing: " << sensitive_or_outcome_missing << "\n";
    os << "per-column missingness:\n";
    for (const auto& [name, count] : missing_per_column)
      if (count > 0) os << "  " << name << ": " << count << "\n";
    if (!issues.empty()) {
      os << "load issues (" << issues.size() << "):\n";
      std::size_t shown = 0;
      for (const auto& issue : issues) {
        os << "  row " << issue.row + 2 << ", " << issue.column << ": " << issue.what
           << "\n";
        if (++shown == 20 && issues.size() > 20) {
          os << "  ... " << issues.size() - 20 << " more\n";
          break;
        }
      }
    }
    return os.str();
  }
};

/// Non-fatal data quality report: row counts, per-column missingness, level
/// violations (via the lenient-load issues), sensitive/outcome completeness.
inline ValidationReport validate_dataset(const Table& t, const DatasetSchema& schema,
                                         std::vector<CellIssue> load_issues = {}) {
  ValidationReport r;
  r.n_rows = t.n_rows();
  r.expected_rows = schema.expected_rows;
  r.issues = std::move(load_issues);
  for (std::size_t c = 0; c < t.n_cols(); ++c) {
    std::size_t miss = 0;
    for (std::size_t row = 0; row < t.n_rows(); ++row)
      if (!t.observed(c, row)) ++miss;
    r.missing_per_column[t.spec(c).name] = miss;
    if (t.spec(c).role != Role::predictor) r.sensitive_or_outcome_missing += miss;
  }
  for (std::size_t row = 0; row < t.n_rows(); ++row)
    if (!t.row_complete(row)) ++r.incomplete_rows;
  return r;
}

// ---------------------------------------------------------------------------
// Amputation recipes

/// Builds the amputation recipe for a schema: one pattern per amputed variable
/// at equal frequency; MAR weights the active (binarized) sensitive column so
/// unprivileged rows land in the amputed tail, MNAR weights the variable
/// itself so low values / low-ranked levels go missing.
inline AmputeConfig make_ampute_config(const DatasetSchema& schema, Mechanism mechanism,
                                       double proportion,
                                       const std::string& active_sensitive_column) {
  AmputeConfig cfg;
  cfg.mechanism = mechanism;
  cfg.proportion = proportion;
  const double freq = 1.0 / static_cast<double>(schema.amputed_variables.size());
  for (const auto& name : schema.amputed_variables) {
    MissingnessPattern p;
    p.missing_columns = {name};
    p.frequency = freq;
    p.direction = TailDirection::right;
    switch (mechanism) {
      case Mechanism::MCAR:
        break;
      case Mechanism::MAR:
        // weight +1 on the indicator (1 - S), expressed as -1 on S
        p.weights = {{active_sensitive_column, -1.0}};
        break;
      case Mechanism::MNAR:
        p.weights = {{name, -1.0}};
        break;
    }
    cfg.patterns.push_back(std::move(p));
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Label helpers

/// Binary outcome vector: 1 where the outcome cell equals the positive level.
inline std::vector<int> outcome_labels(const Table& t, const DatasetSchema& schema) {
  const std::size_t c = t.column_index(schema.outcome_column);
  const auto& spec = t.spec(c);
  std::size_t positive_index = 0;
  bool found = false;
  for (std::size_t l = 0; l < spec.levels.size(); ++l)
    if (spec.levels[l] == schema.positive_level) {
      positive_index = l;
      found = true;
    }
  if (!found) throw std::logic_error("positive outcome level missing from table schema");
  std::vector<int> y(t.n_rows());
  for (std::size_t r = 0; r < t.n_rows(); ++r)
    y[r] = t.cell(c, r) == static_cast<double>(positive_index) ? 1 : 0;
  return y;
}

/// Reads a binarized sensitive column as a 0/1 vector.
inline std::vector<int> sensitive_binary(const Table& t, const std::string& column) {
  const std::size_t c = t.column_index(column);
  std::vector<int> s(t.n_rows());
  for (std::size_t r = 0; r < t.n_rows(); ++r) {
    const double v = t.cell(c, r);
    if (v != 0.0 && v != 1.0)
      throw std::logic_error("sensitive column '" + column + "' is not binarized");
    s[r] = static_cast<int>(v);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Synthetic generators

/// Small synthetic classification table with a binary sensitive attribute.
/// Group sizes and per-group positives use exact-count allocation
/// (round(n * rate)), so requesting equal rates yields exactly equal base
/// rates whenever the counts come out integral. Predictors: x1 = y + e,
/// x2 = 0.5 y + e, and a 3-level categorical whose level odds shift with y.
inline Table synth_classification(std::size_t n, double base_rate_privileged,
                                  double base_rate_unprivileged, double group_fraction,
                                  Rng& rng) {
  if (n < 1) throw std::invalid_argument("synth_classification: n must be >= 1");
  for (double p : {base_rate_privileged, base_rate_unprivileged, group_fraction})
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("synth_classification: probabilities must be in [0, 1]");

  std::vector<ColumnSpec> schema;
  {
    ColumnSpec s;
    s.name = "s";
    s.kind = ColumnKind::numeric;
    s.role = Role::sensitive;
    schema.push_back(s);
    ColumnSpec x1 = s;
    x1.name = "x1";
    x1.role = Role::predictor;
    schema.push_back(x1);
    ColumnSpec x2 = x1;
    x2.name = "x2";
    schema.push_back(x2);
    ColumnSpec c;
    c.name = "c";
    c.kind = ColumnKind::categorical;
    c.role = Role::predictor;
    c.levels = {"c0", "c1", "c2"};
    schema.push_back(c);
    ColumnSpec y;
    y.name = "y";
    y.kind = ColumnKind::categorical;
    y.role = Role::outcome;
    y.levels = {"neg", "pos"};
    schema.push_back(y);
  }

  const auto n_priv = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * group_fraction));
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  rng.shuffle(rows);

  std::vector<int> s(n, 0), y(n, 0);
  std::vector<std::size_t> priv_rows(rows.begin(), rows.begin() + static_cast<long>(n_priv));
  std::vector<std::size_t> unpriv_rows(rows.begin() + static_cast<long>(n_priv), rows.end());
  for (std::size_t r : priv_rows) s[r] = 1;

  auto assign_positives = [&rng, &y](std::vector<std::size_t>& group, double rate) {
    rng.shuffle(group);
    const auto k = static_cast<std::size_t>(
        std::llround(static_cast<double>(group.size()) * rate));
    for (std::size_t i = 0; i < k; ++i) y[group[i]] = 1;
  };
  assign_positives(priv_rows, base_rate_privileged);
  assign_positives(unpriv_rows, base_rate_unprivileged);

  Table t(schema, n);
  for (std::size_t r = 0; r < n; ++r) {
    t.set_cell(0, r, s[r]);
    t.set_cell(1, r, static_cast<double>(y[r]) + rng.normal(0.0, 1.0));
    t.set_cell(2, r, 0.5 * static_cast<double>(y[r]) + rng.normal(0.0, 1.0));
    const double u = rng.uniform();
    double level;
    if (y[r] == 1)
      level = u < 0.2 ? 0.0 : (u < 0.5 ? 1.0 : 2.0);
    else
      level = u < 0.5 ? 0.0 : (u < 0.8 ? 1.0 : 2.0);
    t.set_cell(3, r, level);
    t.set_cell(4, r, y[r]);
  }
  return t;
}

/// German-schema synthetic stand-in: 1000-ish rows of planted structure with
/// the strong predictive signal concentrated in the amputed variables
/// (checking account status, credit history) plus nonlinear terms, and weaker
/// group-correlated proxies elsewhere. Columns and levels match schema_for
/// ("german") exactly, so the full pipeline runs on it unchanged.
inline Table synth_german(std::size_t n, std::uint64_t seed) {
  const DatasetSchema schema = schema_for("german");
  Rng rng(derive_seed(seed, {seed_tag::synth}));
  Table t(schema.columns, n);

  auto col = [&](const char* name) { return t.column_index(name); };
  const std::size_t c_check = col("checking_status"), c_dur = col("duration"),
                    c_hist = col("credit_history"), c_purpose = col("purpose"),
                    c_amount = col("credit_amount"), c_savings = col("savings_status"),
                    c_emp = col("employment"), c_inst = col("installment_rate"),
                    c_sex = col("sex"), c_debt = col("other_debtors"),
                    c_res = col("residence_since"), c_prop = col("property"),
                    c_age = col("age"), c_plans = col("other_installment_plans"),
                    c_house = col("housing"), c_cred = col("existing_credits"),
                    c_job = col("job"), c_dep = col("num_dependents"),
                    c_tel = col("telephone"), c_foreign = col("foreign_worker"),
                    c_risk = col("credit_risk");

  auto pick = [&rng](std::initializer_list<double> cum) {
    const double u = rng.uniform();
    std::size_t k = 0;
    for (double c : cum) {
      if (u < c) return static_cast<double>(k);
      ++k;
    }
    return static_cast<double>(cum.size() - 1);
  };

  for (std::size_t r = 0; r < n; ++r) {
    const bool male = rng.uniform() < 0.69;
    t.set_cell(c_sex, r, male ? 0.0 : 1.0);
    // right-skewed ages from 19 up, roughly three in ten at most 25
    const double age = std::min(
        75.0, 19.0 + std::floor(16.0 * std::fabs(rng.normal(0.0, 1.0)) +
                                (male ? 1.0 : 0.0)));
    t.set_cell(c_age, r, age);
    const bool old = age > 25.0;

    // latent creditworthiness, mildly group-correlated
    const double quality = rng.normal(0.0, 1.0) + (old ? 0.25 : -0.35) +
                           (male ? 0.1 : -0.1);

    // strong signal carriers (these get amputed)
    const double cu = quality + rng.normal(0.0, 0.8);
    const double check = cu < -0.8 ? 0.0 : (cu < 0.0 ? 1.0 : (cu < 0.9 ? 2.0 : 3.0));
    t.set_cell(c_check, r, check);
    const double hu = quality + rng.normal(0.0, 0.9);
    const double hist = hu < -1.1 ? 0.0 : (hu < -0.4 ? 1.0 : (hu < 0.6 ? 2.0 :
                        (hu < 1.3 ? 3.0 : 4.0)));
    t.set_cell(c_hist, r, hist);

    const double duration = std::max(4.0, std::floor(20.0 + 11.0 * rng.normal(0.0, 1.0) -
                                                     4.0 * quality));
    t.set_cell(c_dur, r, duration);
    const double amount = std::max(250.0, std::floor(
        3200.0 + 2500.0 * rng.normal(0.0, 1.0) + 55.0 * (duration - 20.0)));
    t.set_cell(c_amount, r, amount);

    const double savings = pick({0.55, 0.70, 0.81, 0.90, 1.0});
    t.set_cell(c_savings, r, savings);

    // group-correlated proxies with weak own signal
    const double emp = male ? pick({0.05, 0.20, 0.50, 0.75, 1.0})
                            : pick({0.12, 0.40, 0.72, 0.90, 1.0});
    t.set_cell(c_emp, r, emp);
    const double housing = old ? pick({0.10, 0.80, 1.0}) : pick({0.25, 0.70, 1.0});
    t.set_cell(c_house, r, housing);
    const double job = male ? pick({0.02, 0.18, 0.65, 1.0}) : pick({0.04, 0.30, 0.85, 1.0});
    t.set_cell(c_job, r, job);
    const double tel = male ? pick({0.55, 1.0}) : pick({0.65, 1.0});
    t.set_cell(c_tel, r, tel);
    const double prop = old ? pick({0.30, 0.55, 0.85, 1.0}) : pick({0.18, 0.45, 0.75, 1.0});
    t.set_cell(c_prop, r, prop);

    t.set_cell(c_purpose, r, pick({0.23, 0.33, 0.34, 0.52, 0.80, 0.81, 0.83, 0.88, 0.89, 1.0}));
    t.set_cell(c_inst, r, 1.0 + std::floor(4.0 * rng.uniform()));
    t.set_cell(c_debt, r, pick({0.91, 0.95, 1.0}));
    t.set_cell(c_res, r, 1.0 + std::floor(4.0 * rng.uniform()));
    t.set_cell(c_plans, r, pick({0.14, 0.19, 1.0}));
    t.set_cell(c_cred, r, 1.0 + std::floor(2.0 * rng.uniform() * rng.uniform() * 2.0));
    t.set_cell(c_dep, r, rng.uniform() < 0.845 ? 1.0 : 2.0);
    t.set_cell(c_foreign, r, rng.uniform() < 0.963 ? 0.0 : 1.0);

    // outcome: strong nonlinear dependence on the amputed variables, weak
    // linear dependence on the proxies
    double eta = 0.9;
    eta += check >= 2.0 ? 1.1 : (check == 1.0 ? 0.0 : -1.1);  // threshold effect
    eta += 0.55 * (hist - 2.0);
    eta += duration > 30.0 ? -0.9 : 0.0;
    eta += (amount > 6000.0 && savings < 1.0) ? -1.0 : 0.0;  // interaction
    eta += (check >= 2.0 && hist >= 3.0) ? 0.6 : 0.0;
    eta += 0.18 * (emp - 2.0) + 0.22 * (housing == 1.0 ? 1.0 : 0.0) +
           0.15 * (tel == 1.0 ? 1.0 : 0.0) + 0.12 * (job - 1.5);
    eta += old ? 0.15 : -0.15;
    const bool good = rng.uniform() < logistic(eta);
    t.set_cell(c_risk, r, good ? 0.0 : 1.0);
  }
  return t;
}

/// Writes a table back to CSV (levels spelled out), the inverse of load_csv
/// for fully observed tables; masked cells render as the first NA token.
inline void save_csv(const Table& t, const std::string& path,
                     const std::string& na_token = "NA") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (std::size_t c = 0; c < t.n_cols(); ++c)
    out << (c ? "," : "") << t.spec(c).name;
  out << "\n";
  std::ostringstream cell;
  for (std::size_t r = 0; r < t.n_rows(); ++r) {
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
      if (c) out << ",";
      if (!t.observed(c, r)) {
        out << na_token;
      } else if (t.spec(c).kind == ColumnKind::categorical) {
        out << t.level_of(c, r);
      } else {
        cell.str("");
        cell.precision(12);
        cell << t.cell(c, r);
        out << cell.str();
      }
    }
    out << "\n";
  }
}

}  // namespace fairmiss
