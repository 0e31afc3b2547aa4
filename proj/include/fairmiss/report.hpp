#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmiss/stats.hpp"
#include "fairmiss/store.hpp"

namespace fairmiss {

inline std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

struct EffectRow {
  std::string name;  // mdm, imp, mod, mdm*imp, ...
  double ss = 0.0;
  double df = 0.0;
  double f = 0.0;
  double p = 1.0;
  bool welch = false;  // p replaced by the one-way Welch test
  double welch_df2 = 0.0;
};

/// ANOVA/Welch analysis for one (sensitive variant, metric) pair.
struct MetricAnalysis {
  std::string sensitive;
  std::string metric;
  TestResult normality;        // Shapiro-Wilk on cell residuals
  TestResult homoscedasticity;  // Brown-Forsythe across cells
  bool welch_route = false;     // homoscedasticity violated at alpha
  std::vector<EffectRow> rows;  // mdm, imp, mod, mdm*imp, mdm*mod, imp*mod, mdm*imp*mod
  std::size_t iterations_used = 0;
  std::size_t iterations_excluded = 0;  // undefined anywhere in the grid
};

struct AnovaReport {
  std::vector<MetricAnalysis> blocks;
  double alpha = 0.05;

  std::string render_text() const {
    std::ostringstream os;
    os << "S        metric  route  ";
    for (const char* e : {"mdm", "imp", "mod", "mdm*imp", "mdm*mod", "imp*mod",
                          "mdm*imp*mod"}) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%-12s", e);
      os << buf;
    }
    os << "\n";
    for (const auto& b : blocks) {
      char head[64];
      std::snprintf(head, sizeof(head), "%-8s %-5s%s  %-5s  ", b.sensitive.c_str(),
                    b.metric.c_str(), b.welch_route ? "+" : " ",
                    b.welch_route ? "welch" : "anova");
      os << head;
      for (const auto& row : b.rows) {
        char cell[32];
        std::snprintf(cell, sizeof(cell), "%.4f%-6s", row.p,
                      significance_stars(row.p).c_str());
        os << cell;
      }
      os << "\n";
    }
    os << "\n'+' marks metrics analysed with Welch-ANOVA main effects; "
          "* p<0.05, ** p<0.01, *** p<0.001\n";
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["alpha"] = alpha;
    for (const auto& b : blocks) {
      nlohmann::json jb;
      jb["sensitive"] = b.sensitive;
      jb["metric"] = b.metric;
      jb["normality"] = {{"W", b.normality.statistic}, {"p", b.normality.p}};
      jb["homoscedasticity"] = {{"W", b.homoscedasticity.statistic},
                                {"p", b.homoscedasticity.p}};
      jb["route"] = b.welch_route ? "welch" : "anova";
      jb["iterations_used"] = b.iterations_used;
      jb["iterations_excluded"] = b.iterations_excluded;
      for (const auto& row : b.rows) {
        nlohmann::json jr;
        jr["effect"] = row.name;
        jr["ss"] = row.ss;
        jr["df"] = row.df;
        jr["F"] = row.f;
        jr["p"] = row.p;
        jr["stars"] = significance_stars(row.p);
        jr["welch"] = row.welch;
        if (row.welch) jr["welch_df2"] = row.welch_df2;
        jb["effects"].push_back(jr);
      }
      j["analyses"].push_back(jb);
    }
    return j;
  }
};

namespace detail {

// canonical factor orders (filtered by presence in the store)
inline std::vector<Mechanism> present_mechanisms(const ResultsStore& store) {
  std::set<Mechanism> seen;
  for (const auto& r : store) seen.insert(r.mechanism);
  std::vector<Mechanism> out;
  for (auto m : {Mechanism::MCAR, Mechanism::MAR, Mechanism::MNAR})
    if (seen.count(m)) out.push_back(m);
  return out;
}
inline std::vector<HandlerKind> present_handlers(const ResultsStore& store) {
  std::set<HandlerKind> seen;
  for (const auto& r : store) seen.insert(r.handler);
  std::vector<HandlerKind> out;
  for (auto h : {HandlerKind::listwise_deletion, HandlerKind::mode, HandlerKind::regression,
                 HandlerKind::knn})
    if (seen.count(h)) out.push_back(h);
  return out;
}
inline std::vector<ModelKind> present_models(const ResultsStore& store) {
  std::set<ModelKind> seen;
  for (const auto& r : store) seen.insert(r.model);
  std::vector<ModelKind> out;
  for (auto m : {ModelKind::lr, ModelKind::rf, ModelKind::boost, ModelKind::svm_rbf})
    if (seen.count(m)) out.push_back(m);
  return out;
}

// deterministic thinning for the Shapiro-Wilk 5000-point limit
inline std::vector<double> thin_to(std::vector<double> v, std::size_t cap) {
  if (v.size() <= cap) return v;
  std::vector<double> out;
  const double step = static_cast<double>(v.size()) / static_cast<double>(cap);
  for (std::size_t i = 0; i < cap; ++i)
    out.push_back(v[static_cast<std::size_t>(i * step)]);
  return out;
}

}  // namespace detail

/// Builds the per-(sensitive, metric) three-way analyses from a balanced
/// store: assumption pre-tests on cell residuals / cell groups, classical
/// ANOVA for every effect, and one-way Welch substitution of the main-effect
/// rows when homoscedasticity fails at alpha. Iterations with any undefined
/// value in the grid are excluded whole, keeping the layout balanced; a store
/// with silent holes (missing records) is rejected.
inline AnovaReport emit_anova_report(const ResultsStore& store, double alpha = 0.05) {
  if (store.empty()) throw std::invalid_argument("emit_anova_report: empty store");
  AnovaReport report;
  report.alpha = alpha;

  const auto mechanisms = detail::present_mechanisms(store);
  const auto handlers = detail::present_handlers(store);
  const auto models = detail::present_models(store);

  std::set<std::string> sensitives;
  std::set<std::size_t> iterations;
  for (const auto& r : store) {
    sensitives.insert(r.sensitive);
    iterations.insert(r.iteration);
  }

  auto mech_index = [&](Mechanism m) {
    return std::find(mechanisms.begin(), mechanisms.end(), m) - mechanisms.begin();
  };
  auto handler_index = [&](HandlerKind h) {
    return std::find(handlers.begin(), handlers.end(), h) - handlers.begin();
  };
  auto model_index = [&](ModelKind m) {
    return std::find(models.begin(), models.end(), m) - models.begin();
  };

  for (const auto& sensitive : sensitives) {
    for (const char* metric : kMetricNames) {
      // cell -> iteration -> value
      const std::size_t n_cells = mechanisms.size() * handlers.size() * models.size();
      std::map<std::size_t, std::map<std::size_t, MaybeRate>> cells;
      for (const auto& r : store) {
        if (r.sensitive != sensitive || r.metric != metric) continue;
        const std::size_t cell =
            (static_cast<std::size_t>(mech_index(r.mechanism)) * handlers.size() +
             static_cast<std::size_t>(handler_index(r.handler))) *
                models.size() +
            static_cast<std::size_t>(model_index(r.model));
        auto& slot = cells[cell][r.iteration];
        slot = r.defined ? MaybeRate(r.value) : std::nullopt;
      }
      if (cells.empty()) continue;

      // every cell must carry a record for every iteration: no silent holes
      std::set<std::size_t> usable = iterations;
      for (std::size_t cell = 0; cell < n_cells; ++cell) {
        const auto it = cells.find(cell);
        if (it == cells.end() || it->second.size() != iterations.size())
          throw std::invalid_argument(
              "emit_anova_report: store has missing records (unbalanced)");
        for (const auto& [iter, value] : it->second)
          if (!value) usable.erase(iter);
      }
      if (usable.size() < 2)
        throw std::invalid_argument("emit_anova_report: fewer than 2 usable iterations");

      MetricAnalysis block;
      block.sensitive = sensitive;
      block.metric = metric;
      block.iterations_used = usable.size();
      block.iterations_excluded = iterations.size() - usable.size();

      auto layout = FactorialLayout::make(
          std::vector<std::string>(mechanisms.size(), ""),
          std::vector<std::string>(handlers.size(), ""),
          std::vector<std::string>(models.size(), ""));
      for (std::size_t i = 0; i < mechanisms.size(); ++i)
        layout.level_names[0][i] = to_string(mechanisms[i]);
      for (std::size_t i = 0; i < handlers.size(); ++i)
        layout.level_names[1][i] = to_string(handlers[i]);
      for (std::size_t i = 0; i < models.size(); ++i)
        layout.level_names[2][i] = to_string(models[i]);

      std::vector<std::vector<double>> cell_groups(n_cells);
      for (std::size_t i = 0; i < mechanisms.size(); ++i)
        for (std::size_t j = 0; j < handlers.size(); ++j)
          for (std::size_t k = 0; k < models.size(); ++k) {
            const std::size_t cell = (i * handlers.size() + j) * models.size() + k;
            for (std::size_t iter : usable) {
              const double v = *cells[cell][iter];
              layout.responses[i][j][k].push_back(v);
              cell_groups[cell].push_back(v);
            }
          }

      const auto anova = anova_three_way(layout, "mdm", "imp", "mod");

      // assumptions: normality of cell residuals, equal cell variances
      std::vector<double> residuals;
      for (const auto& g : cell_groups) {
        double mean = 0.0;
        for (double v : g) mean += v;
        mean /= static_cast<double>(g.size());
        for (double v : g) residuals.push_back(v - mean);
      }
      try {
        block.normality = shapiro_wilk(detail::thin_to(residuals, 5000));
      } catch (const std::exception&) {
        block.normality = {0.0, 1.0};  // zero-variance residuals etc.
      }
      try {
        block.homoscedasticity = levene_test(cell_groups);
      } catch (const std::exception&) {
        block.homoscedasticity = {0.0, 1.0};
      }
      block.welch_route = block.homoscedasticity.p < alpha;

      for (const auto& e : anova.effects) {
        EffectRow row;
        row.name = e.name;
        row.ss = e.ss;
        row.df = e.df;
        row.f = e.f;
        row.p = e.p;
        block.rows.push_back(row);
      }

      if (block.welch_route) {
        // one-way Welch per factor on the collapsed layout; interactions stay
        // with the classical analysis
        auto collapse = [&](int factor) {
          const std::size_t levels = layout.levels(factor);
          std::vector<std::vector<double>> groups(levels);
          for (std::size_t i = 0; i < mechanisms.size(); ++i)
            for (std::size_t j = 0; j < handlers.size(); ++j)
              for (std::size_t k = 0; k < models.size(); ++k) {
                const std::size_t level = factor == 0 ? i : factor == 1 ? j : k;
                for (double v : layout.responses[i][j][k]) groups[level].push_back(v);
              }
          return groups;
        };
        for (int factor = 0; factor < 3; ++factor) {
          try {
            const auto w = welch_anova(collapse(factor));
            block.rows[static_cast<std::size_t>(factor)].p = w.p;
            block.rows[static_cast<std::size_t>(factor)].f = w.f;
            block.rows[static_cast<std::size_t>(factor)].welch = true;
            block.rows[static_cast<std::size_t>(factor)].welch_df2 = w.df2;
          } catch (const std::exception&) {
            // degenerate group: keep the classical row
          }
        }
      }
      report.blocks.push_back(std::move(block));
    }
  }
  if (report.blocks.empty())
    throw std::invalid_argument("emit_anova_report: no analysable metric blocks");
  return report;
}

}  // namespace fairmiss
