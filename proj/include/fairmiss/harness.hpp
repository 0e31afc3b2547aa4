#pragma once

#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fairmiss/ampute.hpp"
#include "fairmiss/classify.hpp"
#include "fairmiss/datasets.hpp"
#include "fairmiss/fairness.hpp"
#include "fairmiss/impute.hpp"
#include "fairmiss/store.hpp"
#include "fairmiss/table.hpp"

namespace fairmiss {

/// Full experiment description; mirrors the JSON config file field-for-field.
struct ExperimentConfig {
  std::string dataset_id = "german";
  std::string data_path;    // CSV with user data; empty = refuse to run
  std::string schema_path;  // optional edited schema; empty = built-in
  std::string sensitive;    // variant name; empty = schema's first variant
  std::size_t iterations = 0;  // 0 = per-dataset default (german 100, compas 50, adult 20)
  std::uint64_t seed = 20250809;
  std::vector<Mechanism> mechanisms = {Mechanism::MCAR, Mechanism::MAR, Mechanism::MNAR};
  std::vector<HandlerKind> handlers = {HandlerKind::listwise_deletion, HandlerKind::mode,
                                       HandlerKind::regression, HandlerKind::knn};
  std::vector<ModelKind> models = {ModelKind::lr, ModelKind::rf, ModelKind::boost,
                                   ModelKind::svm_rbf};
  double proportion = 0.5;
  std::size_t knn_k = 5;
  std::size_t cv_folds = 5;
  HyperGrid grids;
  std::string out_dir = "results";
  bool baseline = false;
  std::size_t threads = 1;

  std::size_t resolved_iterations() const {
    if (iterations > 0) return iterations;
    if (dataset_id == "german") return 100;
    if (dataset_id == "compas") return 50;
    if (dataset_id == "adult") return 20;
    return 20;
  }

  void validate() const {
    if (mechanisms.empty() || handlers.empty() || models.empty())
      throw std::invalid_argument("config: factor sets must be nonempty");
    if (resolved_iterations() < 2)
      throw std::invalid_argument("config: at least 2 iterations required");
    if (!(proportion > 0.0 && proportion < 1.0))
      throw std::invalid_argument("config: proportion must be in (0, 1)");
    if (cv_folds < 2) throw std::invalid_argument("config: cv_folds must be >= 2");
    grids.validate();
  }
};

namespace detail {

// Grids accept either per-parameter candidate lists (expanded as a cartesian
// product in declaration order) or explicit flat "points" lists; the config
// echo always writes points.
inline HyperGrid grid_from_json(const nlohmann::json& j, HyperGrid grid) {
  if (j.contains("lr")) {
    grid.lr.clear();
    for (double l : j.at("lr").at("lambda").get<std::vector<double>>()) grid.lr.push_back({l});
  }
  if (j.contains("rf")) {
    grid.rf.clear();
    const auto& jr = j.at("rf");
    if (jr.contains("points")) {
      for (const auto& p : jr.at("points"))
        grid.rf.push_back({p.at("trees").get<std::size_t>(),
                           p.at("depth").get<std::size_t>(), 0});
    } else {
      for (auto t : jr.at("trees").get<std::vector<std::size_t>>())
        for (auto d : jr.at("depth").get<std::vector<std::size_t>>())
          grid.rf.push_back({t, d, 0});
    }
  }
  if (j.contains("boost")) {
    grid.boost.clear();
    const auto& jb = j.at("boost");
    if (jb.contains("points")) {
      for (const auto& p : jb.at("points"))
        grid.boost.push_back({p.at("trees").get<std::size_t>(), p.at("rate").get<double>(),
                              p.at("depth").get<std::size_t>()});
    } else {
      for (auto d : jb.at("depth").get<std::vector<std::size_t>>())
        for (auto r : jb.at("rate").get<std::vector<double>>())
          for (auto t : jb.at("trees").get<std::vector<std::size_t>>())
            grid.boost.push_back({t, r, d});
    }
  }
  if (j.contains("svm")) {
    grid.svm.clear();
    const auto& js = j.at("svm");
    if (js.contains("points")) {
      for (const auto& p : js.at("points"))
        grid.svm.push_back({p.at("c").get<double>(), p.at("gamma_scale").get<double>()});
    } else {
      for (auto cc : js.at("c").get<std::vector<double>>())
        for (auto gg : js.at("gamma_scale").get<std::vector<double>>())
          grid.svm.push_back({cc, gg});
    }
  }
  return grid;
}

inline nlohmann::json grid_to_json(const HyperGrid& grid) {
  nlohmann::json j;
  for (const auto& h : grid.lr) j["lr"]["lambda"].push_back(h.lambda);
  for (const auto& h : grid.rf)
    j["rf"]["points"].push_back({{"trees", h.trees}, {"depth", h.max_depth}});
  for (const auto& h : grid.boost)
    j["boost"]["points"].push_back(
        {{"trees", h.trees}, {"rate", h.rate}, {"depth", h.depth}});
  for (const auto& h : grid.svm)
    j["svm"]["points"].push_back({{"c", h.c}, {"gamma_scale", h.gamma_scale}});
  return j;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.dataset_id = j.value("dataset", cfg.dataset_id);
  cfg.data_path = j.value("data", cfg.data_path);
  cfg.schema_path = j.value("schema", cfg.schema_path);
  cfg.sensitive = j.value("sensitive", cfg.sensitive);
  cfg.iterations = j.value("iterations", cfg.iterations);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("mechanisms")) {
    cfg.mechanisms.clear();
    for (const auto& m : j.at("mechanisms"))
      cfg.mechanisms.push_back(mechanism_from_string(m.get<std::string>()));
  }
  if (j.contains("handlers")) {
    cfg.handlers.clear();
    for (const auto& h : j.at("handlers"))
      cfg.handlers.push_back(handler_from_string(h.get<std::string>()));
  }
  if (j.contains("models")) {
    cfg.models.clear();
    for (const auto& m : j.at("models"))
      cfg.models.push_back(model_from_string(m.get<std::string>()));
  }
  cfg.proportion = j.value("proportion", cfg.proportion);
  cfg.knn_k = j.value("knn_k", cfg.knn_k);
  cfg.cv_folds = j.value("cv_folds", cfg.cv_folds);
  if (j.contains("grids")) cfg.grids = detail::grid_from_json(j.at("grids"), cfg.grids);
  cfg.out_dir = j.value("out", cfg.out_dir);
  cfg.baseline = j.value("baseline", cfg.baseline);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.validate();
  return cfg;
}

inline ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["dataset"] = cfg.dataset_id;
  j["data"] = cfg.data_path;
  j["schema"] = cfg.schema_path;
  j["sensitive"] = cfg.sensitive;
  j["iterations"] = cfg.resolved_iterations();
  j["seed"] = cfg.seed;
  for (auto m : cfg.mechanisms) j["mechanisms"].push_back(to_string(m));
  for (auto h : cfg.handlers) j["handlers"].push_back(to_string(h));
  for (auto m : cfg.models) j["models"].push_back(to_string(m));
  j["proportion"] = cfg.proportion;
  j["knn_k"] = cfg.knn_k;
  j["cv_folds"] = cfg.cv_folds;
  j["grids"] = detail::grid_to_json(cfg.grids);
  j["out"] = cfg.out_dir;
  j["baseline"] = cfg.baseline;
  j["threads"] = cfg.threads;
  return j;
}

struct RunOutput {
  ResultsStore records;
  std::vector<std::string> warnings;
  std::size_t failed_cells = 0;
};

/// Resolves schema + table for a run: strict load, complete-case filter,
/// binarization of the active sensitive variant.
struct PreparedData {
  DatasetSchema schema;
  std::string sensitive_variant;
  std::string sensitive_column;
  Table table;  // complete, binarized
};

inline PreparedData prepare_table(const ExperimentConfig& cfg, const Table* preloaded = nullptr) {
  PreparedData p;
  p.schema = cfg.schema_path.empty() ? schema_for(cfg.dataset_id)
                                     : schema_from_file(cfg.schema_path);
  p.sensitive_variant =
      cfg.sensitive.empty() ? p.schema.sensitive_variants.front().name : cfg.sensitive;
  const auto& variant = p.schema.variant(p.sensitive_variant);
  p.sensitive_column = variant.column;
  p.schema.mar_dependency = variant.column;

  Table raw;
  if (preloaded != nullptr) {
    raw = *preloaded;
  } else {
    if (cfg.data_path.empty())
      throw std::invalid_argument("config: data path required (datasets are user-supplied)");
    raw = load_csv(cfg.data_path, p.schema.columns);
  }
  // complete data only at the onset: rows with missing values are removed
  p.table = binarize_sensitive(complete_cases(raw), variant.rule);
  if (p.table.n_rows() < 10)
    throw std::runtime_error("dataset has fewer than 10 complete rows");
  return p;
}

namespace detail {

struct IterationResult {
  std::vector<FairnessRecord> records;
  std::vector<std::string> warnings;
  std::size_t failed_cells = 0;
};

inline IterationResult run_iteration(const ExperimentConfig& cfg, const PreparedData& data,
                                     std::size_t iter) {
  IterationResult out;
  const std::uint64_t iter_seed = derive_seed(cfg.seed, {seed_tag::iteration, iter});

  Rng split_rng(derive_seed(iter_seed, {seed_tag::split}));
  const auto idx = split(data.table, 1.0 / 3.0, split_rng);
  const auto [train_c, test_c] = apply_indices(data.table, idx);
  const std::uint64_t test_checksum = test_c.checksum();

  const auto y_test = outcome_labels(test_c, data.schema);
  const auto s_test = sensitive_binary(test_c, data.sensitive_column);
  const auto x_test = one_hot_encode(test_c, {Role::sensitive, Role::outcome});

  auto emit = [&](Mechanism mech, HandlerKind handler, ModelKind model,
                  const char* metric, MaybeRate value) {
    FairnessRecord r;
    r.iteration = iter;
    r.mechanism = mech;
    r.handler = handler;
    r.model = model;
    r.sensitive = data.sensitive_variant;
    r.metric = metric;
    r.defined = value.has_value();
    // records carry the store precision (12 significant digits), so the
    // in-memory store and its CSV round-trip are bit-identical
    r.value = value ? std::stod(detail::format_value(*value)) : 0.0;
    out.records.push_back(std::move(r));
  };

  for (const auto mech : cfg.mechanisms) {
    Rng ampute_rng(derive_seed(
        iter_seed, {seed_tag::mechanism, static_cast<std::uint64_t>(mech)}));
    const auto cfg_ampute =
        make_ampute_config(data.schema, mech, cfg.proportion, data.sensitive_column);
    const auto amputed = ampute(train_c, cfg_ampute, ampute_rng);
    for (const auto& w : amputed.warnings)
      out.warnings.push_back("iteration " + std::to_string(iter) + ": " + w);

    for (const auto handler_kind : cfg.handlers) {
      Handler handler{handler_kind, cfg.knn_k};
      Table repaired;
      bool handler_ok = true;
      try {
        repaired = apply_handler(amputed.table, handler);
      } catch (const std::exception& e) {
        handler_ok = false;
        out.warnings.push_back("iteration " + std::to_string(iter) + " " +
                               to_string(mech) + "/" + to_string(handler_kind) +
                               " failed: " + e.what());
      }
      DesignMatrix x_train;
      std::vector<int> y_train;
      if (handler_ok) {
        x_train = one_hot_encode(repaired, {Role::sensitive, Role::outcome});
        y_train = outcome_labels(repaired, data.schema);
      }

      for (const auto model_kind : cfg.models) {
        if (!handler_ok) {
          ++out.failed_cells;
          for (const char* m : kMetricNames) emit(mech, handler_kind, model_kind, m, {});
          continue;
        }
        try {
          const auto tags = {seed_tag::cv, static_cast<std::uint64_t>(mech),
                             static_cast<std::uint64_t>(handler_kind),
                             static_cast<std::uint64_t>(model_kind)};
          Rng cv_rng(derive_seed(iter_seed, tags));
          const auto cv =
              cross_validate(model_kind, cfg.grids, x_train, y_train, cfg.cv_folds, cv_rng);
          Rng fit_rng(derive_seed(iter_seed, {seed_tag::fit, static_cast<std::uint64_t>(mech),
                                              static_cast<std::uint64_t>(handler_kind),
                                              static_cast<std::uint64_t>(model_kind)}));
          const auto model =
              fit_model(model_kind, cfg.grids, cv.chosen, x_train, y_train, fit_rng);
          const auto y_pred = model.predict(x_test);
          const auto rates = group_rates(y_test, y_pred, s_test);
          emit(mech, handler_kind, model_kind, "dp", demographic_parity(rates));
          emit(mech, handler_kind, model_kind, "pe", predictive_equality(rates));
          emit(mech, handler_kind, model_kind, "eo", equality_of_opportunity(rates));
          emit(mech, handler_kind, model_kind, "acc", accuracy(y_test, y_pred));
        } catch (const std::exception& e) {
          ++out.failed_cells;
          out.warnings.push_back("iteration " + std::to_string(iter) + " " +
                                 to_string(mech) + "/" + to_string(handler_kind) + "/" +
                                 to_string(model_kind) + " failed: " + e.what());
          for (const char* m : kMetricNames) emit(mech, handler_kind, model_kind, m, {});
        }
      }
    }
  }
  if (test_c.checksum() != test_checksum)
    throw std::logic_error("complete test twin was modified during the run");
  return out;
}

}  // namespace detail

/// Runs the full iteration x mechanism x handler x model grid. Deterministic
/// for a given config: per-iteration seeds derive from the master seed and
/// results merge in iteration order whatever the thread count.
inline RunOutput run_experiment(const ExperimentConfig& cfg, const Table* preloaded = nullptr) {
  cfg.validate();
  const PreparedData data = prepare_table(cfg, preloaded);
  const std::size_t iterations = cfg.resolved_iterations();

  std::vector<detail::IterationResult> per_iter(iterations);
  const std::size_t n_threads = std::max<std::size_t>(1, cfg.threads);
  if (n_threads == 1) {
    for (std::size_t i = 0; i < iterations; ++i)
      per_iter[i] = detail::run_iteration(cfg, data, i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::mutex err_mutex;
    std::vector<std::string> errors;
    for (std::size_t t = 0; t < std::min(n_threads, iterations); ++t)
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= iterations) return;
          try {
            per_iter[i] = detail::run_iteration(cfg, data, i);
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(err_mutex);
            errors.push_back(e.what());
            return;
          }
        }
      });
    for (auto& th : pool) th.join();
    if (!errors.empty()) throw std::runtime_error("run_experiment: " + errors.front());
  }

  RunOutput out;
  std::map<std::string, std::size_t> failures_per_cell;
  for (auto& ir : per_iter) {
    out.records.insert(out.records.end(), ir.records.begin(), ir.records.end());
    out.warnings.insert(out.warnings.end(), ir.warnings.begin(), ir.warnings.end());
    out.failed_cells += ir.failed_cells;
  }
  for (const auto& r : out.records)
    if (!r.defined && r.metric == std::string("acc"))
      ++failures_per_cell[std::string(to_string(r.mechanism)) + "/" + to_string(r.handler) +
                          "/" + to_string(r.model)];
  for (const auto& [cell, lost] : failures_per_cell)
    if (static_cast<double>(lost) > 0.2 * static_cast<double>(iterations))
      throw std::runtime_error("cell " + cell + " lost " + std::to_string(lost) + " of " +
                               std::to_string(iterations) + " iterations (> 20%)");
  return out;
}

/// Per-model metric distributions on complete training and test sets: no
/// amputation, no imputation. Mean and n-1 standard deviation per metric.
/// `raw_values` (optional) receives the per-iteration metric values.
inline std::vector<BaselineRecord> run_baseline(
    const ExperimentConfig& cfg, const Table* preloaded = nullptr,
    std::map<std::pair<ModelKind, std::string>, std::vector<double>>* raw_values = nullptr) {
  cfg.validate();
  const PreparedData data = prepare_table(cfg, preloaded);
  const std::size_t iterations = cfg.resolved_iterations();

  std::map<std::pair<ModelKind, std::string>, std::vector<double>> values;
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    const std::uint64_t iter_seed = derive_seed(cfg.seed, {seed_tag::iteration, iter});
    Rng split_rng(derive_seed(iter_seed, {seed_tag::split}));
    const auto idx = split(data.table, 1.0 / 3.0, split_rng);
    const auto [train_c, test_c] = apply_indices(data.table, idx);
    const auto y_test = outcome_labels(test_c, data.schema);
    const auto s_test = sensitive_binary(test_c, data.sensitive_column);
    const auto x_test = one_hot_encode(test_c, {Role::sensitive, Role::outcome});
    const auto x_train = one_hot_encode(train_c, {Role::sensitive, Role::outcome});
    const auto y_train = outcome_labels(train_c, data.schema);

    for (const auto model_kind : cfg.models) {
      Rng cv_rng(derive_seed(iter_seed, {seed_tag::cv, 99,
                                         static_cast<std::uint64_t>(model_kind)}));
      const auto cv =
          cross_validate(model_kind, cfg.grids, x_train, y_train, cfg.cv_folds, cv_rng);
      Rng fit_rng(derive_seed(iter_seed, {seed_tag::fit, 99,
                                          static_cast<std::uint64_t>(model_kind)}));
      const auto model = fit_model(model_kind, cfg.grids, cv.chosen, x_train, y_train, fit_rng);
      const auto y_pred = model.predict(x_test);
      const auto rates = group_rates(y_test, y_pred, s_test);
      auto push = [&](const char* metric, MaybeRate v) {
        if (v) values[{model_kind, metric}].push_back(*v);
      };
      push("dp", demographic_parity(rates));
      push("pe", predictive_equality(rates));
      push("eo", equality_of_opportunity(rates));
      push("acc", accuracy(y_test, y_pred));
    }
  }

  if (raw_values) *raw_values = values;
  std::vector<BaselineRecord> records;
  for (const auto model_kind : cfg.models)
    for (const char* metric : kMetricNames) {
      const auto it = values.find({model_kind, metric});
      if (it == values.end() || it->second.empty()) continue;
      const auto& v = it->second;
      BaselineRecord r;
      r.model = model_kind;
      r.metric = metric;
      double sum = 0.0;
      for (double x : v) sum += x;
      r.mean = sum / static_cast<double>(v.size());
      if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.sd = std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
      }
      records.push_back(std::move(r));
    }
  return records;
}

}  // namespace fairmiss
