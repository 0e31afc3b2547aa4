// fairmiss command line: run amputation/imputation fairness experiments,
// summarize and analyse result stores, and draw the boxplot figures.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fairmiss/datasets.hpp"
#include "fairmiss/harness.hpp"
#include "fairmiss/plot.hpp"
#include "fairmiss/report.hpp"

namespace fs = std::filesystem;
using namespace fairmiss;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string dataset;
  std::string data;
  std::string schema;
  std::string sensitive;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t iterations = 0;
  std::size_t threads = 0;
  double proportion = 0.0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "experiment config JSON");
  cmd->add_option("--dataset", o.dataset, "dataset id (german | adult | compas)");
  cmd->add_option("--data", o.data, "dataset CSV path");
  cmd->add_option("--schema", o.schema, "schema JSON overriding the built-in one");
  cmd->add_option("--sensitive", o.sensitive, "sensitive variant name");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "master seed")->each([&](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_option("--iterations", o.iterations, "iteration count");
  cmd->add_option("--threads", o.threads, "worker threads over iterations");
  cmd->add_option("--proportion", o.proportion, "amputed-row proportion");
}

ExperimentConfig resolve_config(const CommonOpts& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = config_from_file(o.config_path);
  if (!o.dataset.empty()) cfg.dataset_id = o.dataset;
  if (!o.data.empty()) cfg.data_path = o.data;
  if (!o.schema.empty()) cfg.schema_path = o.schema;
  if (!o.sensitive.empty()) cfg.sensitive = o.sensitive;
  if (o.seed_set) cfg.seed = o.seed;
  if (o.iterations > 0) cfg.iterations = o.iterations;
  if (o.threads > 0) cfg.threads = o.threads;
  if (o.proportion > 0.0) cfg.proportion = o.proportion;
  if (!o.out.empty()) cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

int cmd_run(const CommonOpts& o) {
  const auto cfg = resolve_config(o);
  fs::create_directories(cfg.out_dir);
  const auto result = run_experiment(cfg);
  save_records_csv(result.records, cfg.out_dir + "/records.csv");
  write_text(cfg.out_dir + "/config.json", config_to_json(cfg).dump(2) + "\n");
  if (!result.warnings.empty()) {
    std::string text;
    for (const auto& w : result.warnings) text += w + "\n";
    write_text(cfg.out_dir + "/warnings.txt", text);
  }
  std::cout << "wrote " << result.records.size() << " records to " << cfg.out_dir
            << "/records.csv (" << result.warnings.size() << " warnings, "
            << result.failed_cells << " failed cells)\n";
  return 0;
}

int cmd_baseline(const CommonOpts& o) {
  const auto cfg = resolve_config(o);
  fs::create_directories(cfg.out_dir);
  const auto records = run_baseline(cfg);
  save_baseline_csv(records, cfg.out_dir + "/baseline.csv");
  std::cout << "wrote " << records.size() << " baseline rows to " << cfg.out_dir
            << "/baseline.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairness-under-missingness experiment harness"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  auto* run = app.add_subcommand("run", "run the iteration x MDM x handler x model grid");
  add_common(run, run_opts);

  CommonOpts base_opts;
  auto* baseline =
      app.add_subcommand("baseline", "metric distributions on complete data");
  add_common(baseline, base_opts);

  // summarize
  std::string sum_records, sum_by = "handler,model", sum_out;
  std::string sum_metric;
  bool sum_abs = false;
  auto* sum = app.add_subcommand("summarize", "grouped summary of a results store");
  sum->add_option("--records", sum_records, "records.csv path")->required();
  sum->add_option("--by", sum_by, "comma-separated grouping factors");
  sum->add_option("--metric", sum_metric, "restrict to one metric");
  sum->add_flag("--abs", sum_abs, "summarize |value| for fairness metrics");
  sum->add_option("--out", sum_out, "write summary .txt/.json next to this prefix");

  // report
  std::string rep_records, rep_out;
  auto* rep = app.add_subcommand("report", "ANOVA / Welch-ANOVA analysis of a store");
  rep->add_option("--records", rep_records, "records.csv path")->required();
  rep->add_option("--out", rep_out, "prefix for report.txt / report.json");

  // plot
  std::string plot_records, plot_layout = "handler-model", plot_metric = "dp";
  std::string plot_mech, plot_model, plot_sensitive, plot_baseline, plot_out = "plot.svg";
  std::string plot_title;
  auto* plot = app.add_subcommand("plot", "boxplot figure with reference line");
  plot->add_option("--records", plot_records, "records.csv path")->required();
  plot->add_option("--layout", plot_layout, "handler-model | mechanism-handler");
  plot->add_option("--metric", plot_metric, "dp | pe | eo | acc");
  plot->add_option("--mechanism", plot_mech, "restrict to one MDM (handler-model)");
  plot->add_option("--model", plot_model, "restrict to one model (mechanism-handler)");
  plot->add_option("--sensitive", plot_sensitive, "sensitive variant filter");
  plot->add_option("--baseline", plot_baseline, "baseline.csv for blue bands");
  plot->add_option("--title", plot_title, "figure title");
  plot->add_option("--out", plot_out, "SVG output path (sidecar: same + .json)");

  // validate-data
  CommonOpts val_opts;
  auto* val = app.add_subcommand("validate-data", "non-fatal dataset quality report");
  add_common(val, val_opts);

  // synth-data
  std::string synth_dataset = "german", synth_out = "synth.csv";
  std::size_t synth_n = 1000;
  std::uint64_t synth_seed = 20250809;
  double synth_br1 = 0.5, synth_br0 = 0.5, synth_frac = 0.5;
  auto* synth = app.add_subcommand(
      "synth-data", "generate a synthetic dataset (no real data is bundled)");
  synth->add_option("--dataset", synth_dataset, "german | synthetic");
  synth->add_option("-n,--rows", synth_n, "row count");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--base-rate-privileged", synth_br1, "synthetic: P(Y=1|S=1)");
  synth->add_option("--base-rate-unprivileged", synth_br0, "synthetic: P(Y=1|S=0)");
  synth->add_option("--group-fraction", synth_frac, "synthetic: P(S=1)");
  synth->add_option("--out", synth_out, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (baseline->parsed()) return cmd_baseline(base_opts);

    if (sum->parsed()) {
      auto store = load_records_csv(sum_records);
      if (!sum_metric.empty()) {
        ResultsStore filtered;
        for (const auto& r : store)
          if (r.metric == sum_metric) filtered.push_back(r);
        store = std::move(filtered);
      }
      std::vector<std::string> by;
      std::stringstream ss(sum_by);
      std::string tok;
      while (std::getline(ss, tok, ',')) by.push_back(tok);
      const auto rows = summarize(store, by, sum_abs);
      const auto text = render_summary(rows);
      if (sum_out.empty()) {
        std::cout << text;
      } else {
        write_text(sum_out + ".txt", text);
        nlohmann::json j;
        for (const auto& r : rows) {
          nlohmann::json jr;
          for (const auto& [f, v] : r.group) jr["group"][f] = v;
          jr["n"] = r.n;
          jr["undefined"] = r.undefined;
          jr["mean"] = r.mean;
          jr["sd"] = r.sd;
          jr["median"] = r.median;
          jr["q1"] = r.q1;
          jr["q3"] = r.q3;
          j.push_back(jr);
        }
        write_text(sum_out + ".json", j.dump(2) + "\n");
        std::cout << "wrote " << sum_out << ".txt and " << sum_out << ".json\n";
      }
      return 0;
    }

    if (rep->parsed()) {
      const auto store = load_records_csv(rep_records);
      const auto report = emit_anova_report(store);
      const auto text = report.render_text();
      if (rep_out.empty()) {
        std::cout << text;
      } else {
        write_text(rep_out + ".txt", text);
        write_text(rep_out + ".json", report.to_json().dump(2) + "\n");
        std::cout << "wrote " << rep_out << ".txt and " << rep_out << ".json\n";
      }
      return 0;
    }

    if (plot->parsed()) {
      const auto store = load_records_csv(plot_records);
      PlotOptions opts;
      opts.metric = plot_metric;
      opts.mechanism = plot_mech;
      opts.model = plot_model;
      opts.sensitive = plot_sensitive;
      opts.title = plot_title;
      if (!plot_baseline.empty()) opts.baseline = load_baseline_csv(plot_baseline);
      emit_boxplots(store, layout_from_string(plot_layout), opts, plot_out,
                    plot_out + ".json");
      std::cout << "wrote " << plot_out << " and " << plot_out << ".json\n";
      return 0;
    }

    if (val->parsed()) {
      if (val_opts.data.empty()) throw std::runtime_error("validate-data needs --data");
      const auto schema = val_opts.schema.empty()
                              ? schema_for(val_opts.dataset.empty() ? "german"
                                                                    : val_opts.dataset)
                              : schema_from_file(val_opts.schema);
      std::vector<CellIssue> issues;
      const auto table = load_csv(val_opts.data, schema.columns, default_na_tokens(),
                                  &issues);
      const auto report = validate_dataset(table, schema, std::move(issues));
      std::cout << report.render();
      return 0;
    }

    if (synth->parsed()) {
      if (synth_dataset == "german") {
        save_csv(synth_german(synth_n, synth_seed), synth_out);
      } else if (synth_dataset == "synthetic") {
        Rng rng(synth_seed);
        save_csv(synth_classification(synth_n, synth_br1, synth_br0, synth_frac, rng),
                 synth_out);
      } else {
        throw std::runtime_error("synth-data supports 'german' and 'synthetic'");
      }
      std::cout << "wrote " << synth_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
