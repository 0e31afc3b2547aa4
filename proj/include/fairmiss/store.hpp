#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmiss/ampute.hpp"
#include "fairmiss/classify.hpp"
#include "fairmiss/impute.hpp"
#include "fairmiss/table.hpp"

namespace fairmiss {

inline const char* const kMetricNames[4] = {"dp", "pe", "eo", "acc"};

/// One experiment-cell observation.
struct FairnessRecord {
  std::size_t iteration = 0;
  Mechanism mechanism = Mechanism::MCAR;
  HandlerKind handler = HandlerKind::listwise_deletion;
  ModelKind model = ModelKind::lr;
  std::string sensitive;  // sensitive variant name
  std::string metric;     // dp | pe | eo | acc
  double value = 0.0;
  bool defined = true;

  bool operator==(const FairnessRecord&) const = default;
};

using ResultsStore = std::vector<FairnessRecord>;

/// Baseline statistics from complete (never amputed) data.
struct BaselineRecord {
  ModelKind model = ModelKind::lr;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
};

namespace detail {
inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}
}  // namespace detail

inline void save_records_csv(const ResultsStore& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "iteration,mechanism,handler,model,sensitive,metric,value,defined\n";
  for (const auto& r : store) {
    out << r.iteration << ',' << to_string(r.mechanism) << ',' << to_string(r.handler)
        << ',' << to_string(r.model) << ',' << r.sensitive << ',' << r.metric << ','
        << (r.defined ? detail::format_value(r.value) : "") << ','
        << (r.defined ? 1 : 0) << "\n";
  }
}

inline ResultsStore load_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("'" + path + "' is empty");
  if (line != "iteration,mechanism,handler,model,sensitive,metric,value,defined" &&
      line != "iteration,mechanism,handler,model,sensitive,metric,value,defined\r")
    throw std::runtime_error("'" + path + "' is not a results store");
  ResultsStore store;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 8) throw std::runtime_error("'" + path + "': malformed record row");
    FairnessRecord r;
    r.iteration = std::stoul(f[0]);
    r.mechanism = mechanism_from_string(f[1]);
    r.handler = handler_from_string(f[2]);
    r.model = model_from_string(f[3]);
    r.sensitive = f[4];
    r.metric = f[5];
    r.defined = f[7] == "1";
    r.value = r.defined ? std::stod(f[6]) : 0.0;
    store.push_back(std::move(r));
  }
  return store;
}

inline void save_baseline_csv(const std::vector<BaselineRecord>& records,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "model,metric,mean,sd\n";
  for (const auto& r : records)
    out << to_string(r.model) << ',' << r.metric << ',' << detail::format_value(r.mean)
        << ',' << detail::format_value(r.sd) << "\n";
}

inline std::vector<BaselineRecord> load_baseline_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  std::vector<BaselineRecord> records;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 4) throw std::runtime_error("'" + path + "': malformed baseline row");
    records.push_back({model_from_string(f[0]), f[1], std::stod(f[2]), std::stod(f[3])});
  }
  return records;
}

// ---------------------------------------------------------------------------
// Summaries

/// Quantile with the lower-interpolation convention: sorted[floor((n-1) q)].
inline double quantile_lower(std::vector<double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const auto idx = static_cast<std::size_t>(
      std::floor((static_cast<double>(sorted.size()) - 1.0) * q));
  return sorted[idx];
}

struct SummaryRow {
  std::vector<std::pair<std::string, std::string>> group;  // factor -> level
  std::size_t n = 0;          // defined values
  std::size_t undefined = 0;  // undefined records in the group
  double mean = 0.0;
  double sd = 0.0;  // n-1 denominator; 0 when n < 2
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

/// Groups records by the named factors and reports order statistics with the
/// lower-interpolation convention. With `absolute` set, fairness metric
/// values enter as |value| (accuracy is left alone).
inline std::vector<SummaryRow> summarize(const ResultsStore& store,
                                         const std::vector<std::string>& group_by,
                                         bool absolute = false) {
  if (store.empty()) throw std::invalid_argument("summarize: empty store");
  auto key_of = [&](const FairnessRecord& r) {
    std::vector<std::pair<std::string, std::string>> key;
    for (const auto& factor : group_by) {
      if (factor == "mechanism")
        key.emplace_back(factor, to_string(r.mechanism));
      else if (factor == "handler")
        key.emplace_back(factor, to_string(r.handler));
      else if (factor == "model")
        key.emplace_back(factor, to_string(r.model));
      else if (factor == "sensitive")
        key.emplace_back(factor, r.sensitive);
      else if (factor == "metric")
        key.emplace_back(factor, r.metric);
      else if (factor == "iteration")
        key.emplace_back(factor, std::to_string(r.iteration));
      else
        throw std::invalid_argument("summarize: unknown factor '" + factor + "'");
    }
    return key;
  };

  std::map<std::vector<std::pair<std::string, std::string>>,
           std::pair<std::vector<double>, std::size_t>>
      groups;
  for (const auto& r : store) {
    auto& slot = groups[key_of(r)];
    if (!r.defined) {
      ++slot.second;
      continue;
    }
    const bool fairness = r.metric != "acc";
    slot.first.push_back(absolute && fairness ? std::fabs(r.value) : r.value);
  }

  std::vector<SummaryRow> rows;
  for (auto& [key, slot] : groups) {
    SummaryRow row;
    row.group = key;
    row.undefined = slot.second;
    auto& vals = slot.first;
    row.n = vals.size();
    if (!vals.empty()) {
      double sum = 0.0;
      for (double v : vals) sum += v;
      row.mean = sum / static_cast<double>(vals.size());
      if (vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - row.mean) * (v - row.mean);
        row.sd = std::sqrt(ss / (static_cast<double>(vals.size()) - 1.0));
      }
      std::sort(vals.begin(), vals.end());
      row.median = quantile_lower(vals, 0.5);
      row.q1 = quantile_lower(vals, 0.25);
      row.q3 = quantile_lower(vals, 0.75);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string render_summary(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) {
    for (const auto& [factor, level] : r.group) os << factor << '=' << level << ' ';
    os << "n=" << r.n << " undefined=" << r.undefined;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  " mean=%.6f sd=%.6f median=%.6f q1=%.6f q3=%.6f", r.mean, r.sd,
                  r.median, r.q1, r.q3);
    os << buf << "\n";
  }
  return os.str();
}

}  // namespace fairmiss
