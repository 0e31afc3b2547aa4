#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmiss/report.hpp"
#include "fairmiss/store.hpp"

namespace fairmiss {

enum class BoxLayout { handler_model, mechanism_handler };

inline BoxLayout layout_from_string(const std::string& s) {
  if (s == "handler-model") return BoxLayout::handler_model;
  if (s == "mechanism-handler") return BoxLayout::mechanism_handler;
  throw std::invalid_argument("unknown layout '" + s + "' (handler-model | mechanism-handler)");
}

struct BoxStats {
  std::string label;
  std::size_t n = 0;
  std::size_t undefined = 0;
  double q1 = 0.0, median = 0.0, q3 = 0.0;
  double whisker_lo = 0.0, whisker_hi = 0.0;
  std::vector<double> outliers;
};

struct PlotOptions {
  std::string metric = "dp";
  std::string sensitive;   // filter; empty = accept all (must be unique)
  std::string mechanism;   // handler_model layout: restrict to one MDM
  std::string model;       // mechanism_handler layout: restrict to one model
  std::vector<BaselineRecord> baseline;  // optional mean +- sd bands
  std::string title;
};

namespace detail {

inline const char* plot_model_label(ModelKind m) {
  // boxplot x-axis uses the short model tags (b for boosting)
  switch (m) {
    case ModelKind::lr: return "lr";
    case ModelKind::rf: return "rf";
    case ModelKind::boost: return "b";
    case ModelKind::svm_rbf: return "svm";
  }
  return "?";
}

inline BoxStats box_from_values(std::vector<double> values, std::size_t undefined,
                                std::string label) {
  BoxStats b;
  b.label = std::move(label);
  b.undefined = undefined;
  b.n = values.size();
  if (values.empty())
    throw std::invalid_argument("emit_boxplots: cell '" + b.label + "' has no values");
  std::sort(values.begin(), values.end());
  b.q1 = quantile_lower(values, 0.25);
  b.median = quantile_lower(values, 0.5);
  b.q3 = quantile_lower(values, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_lo = b.q3;
  b.whisker_hi = b.q1;
  for (double v : values) {
    if (v >= lo_fence && v <= hi_fence) {
      b.whisker_lo = std::min(b.whisker_lo, v);
      b.whisker_hi = std::max(b.whisker_hi, v);
    } else {
      b.outliers.push_back(v);
    }
  }
  return b;
}

inline std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// nice tick spacing covering [lo, hi] with ~6 steps
inline double nice_step(double lo, double hi) {
  const double raw = (hi - lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

}  // namespace detail

/// Groups records into the requested layout's box order and computes the
/// drawn statistics: Tukey boxes (lower-interpolation quartiles, 1.5 IQR
/// whiskers, outliers beyond), the reference line at the box with the
/// smallest median discrimination (|median| for fairness metrics, plain
/// median for accuracy), and optional baseline bands.
struct BoxPlotData {
  BoxLayout layout;
  std::string metric;
  std::vector<BoxStats> boxes;
  std::size_t group_size = 4;  // boxes per x-axis group
  double reference_value = 0.0;
  std::string reference_label;
  // per-box baseline band (mean, sd); models without baselines get nullopt
  std::vector<std::optional<std::pair<double, double>>> bands;
};

inline BoxPlotData compute_boxplots(const ResultsStore& store, BoxLayout layout,
                                    const PlotOptions& opts) {
  std::set<std::string> sensitives;
  for (const auto& r : store) sensitives.insert(r.sensitive);
  if (opts.sensitive.empty() && sensitives.size() > 1)
    throw std::invalid_argument("emit_boxplots: store holds several sensitive variants; "
                                "pick one");

  const auto mechanisms = detail::present_mechanisms(store);
  const auto handlers = detail::present_handlers(store);
  const auto models = detail::present_models(store);

  auto accept = [&](const FairnessRecord& r) {
    if (r.metric != opts.metric) return false;
    if (!opts.sensitive.empty() && r.sensitive != opts.sensitive) return false;
    if (!opts.mechanism.empty() && to_string(r.mechanism) != opts.mechanism) return false;
    if (!opts.model.empty() && to_string(r.model) != opts.model) return false;
    return true;
  };

  BoxPlotData data;
  data.layout = layout;
  data.metric = opts.metric;

  struct CellRef {
    std::string label;
    Mechanism mech;
    HandlerKind handler;
    ModelKind model;
    bool any_mech, any_model;
  };
  std::vector<CellRef> order;
  if (layout == BoxLayout::handler_model) {
    // lr.ld, rf.ld, b.ld, svm.ld, lr.mode, ... (handler-major, models inner)
    data.group_size = models.size();
    for (const auto h : handlers)
      for (const auto m : models)
        order.push_back({std::string(detail::plot_model_label(m)) + "." + to_string(h),
                         Mechanism::MCAR, h, m, true, false});
  } else {
    // ld.MCAR, mode.MCAR, ..., knn.MNAR (mechanism-major, handlers inner)
    data.group_size = handlers.size();
    for (const auto mech : mechanisms)
      for (const auto h : handlers)
        order.push_back({std::string(to_string(h)) + "." + to_string(mech), mech, h,
                         ModelKind::lr, false, true});
  }

  for (const auto& cell : order) {
    std::vector<double> values;
    std::size_t undefined = 0;
    for (const auto& r : store) {
      if (!accept(r)) continue;
      if (r.handler != cell.handler) continue;
      if (!cell.any_mech && r.mechanism != cell.mech) continue;
      if (!cell.any_model && r.model != cell.model) continue;
      if (r.defined)
        values.push_back(r.value);
      else
        ++undefined;
    }
    data.boxes.push_back(detail::box_from_values(std::move(values), undefined, cell.label));

    std::optional<std::pair<double, double>> band;
    const ModelKind band_model =
        cell.any_model ? (opts.model.empty() ? ModelKind::lr : model_from_string(opts.model))
                       : cell.model;
    if (!opts.baseline.empty() && (!cell.any_model || !opts.model.empty())) {
      for (const auto& b : opts.baseline)
        if (b.model == band_model && b.metric == opts.metric)
          band = std::make_pair(b.mean, b.sd);
    }
    data.bands.push_back(band);
  }

  const bool fairness = opts.metric != "acc";
  std::size_t best = 0;
  for (std::size_t i = 1; i < data.boxes.size(); ++i) {
    const double a = fairness ? std::fabs(data.boxes[i].median) : data.boxes[i].median;
    const double b = fairness ? std::fabs(data.boxes[best].median) : data.boxes[best].median;
    if (a < b) best = i;
  }
  data.reference_value = data.boxes[best].median;
  data.reference_label = data.boxes[best].label;
  return data;
}

/// Renders the boxplot data as a self-contained SVG plus a JSON sidecar
/// holding every drawn statistic.
inline void emit_boxplots(const ResultsStore& store, BoxLayout layout,
                          const PlotOptions& opts, const std::string& svg_path,
                          const std::string& sidecar_path) {
  const BoxPlotData data = compute_boxplots(store, layout, opts);

  // ---- sidecar -------------------------------------------------------------
  nlohmann::json sidecar;
  sidecar["layout"] =
      layout == BoxLayout::handler_model ? "handler-model" : "mechanism-handler";
  sidecar["metric"] = data.metric;
  if (!opts.sensitive.empty()) sidecar["sensitive"] = opts.sensitive;
  if (!opts.mechanism.empty()) sidecar["mechanism"] = opts.mechanism;
  if (!opts.model.empty()) sidecar["model"] = opts.model;
  sidecar["reference"] = {{"label", data.reference_label},
                          {"value", data.reference_value}};
  for (std::size_t i = 0; i < data.boxes.size(); ++i) {
    const auto& b = data.boxes[i];
    nlohmann::json jb;
    jb["label"] = b.label;
    jb["n"] = b.n;
    jb["undefined"] = b.undefined;
    jb["q1"] = b.q1;
    jb["median"] = b.median;
    jb["q3"] = b.q3;
    jb["whisker_lo"] = b.whisker_lo;
    jb["whisker_hi"] = b.whisker_hi;
    jb["outliers"] = b.outliers;
    if (data.bands[i])
      jb["baseline"] = {{"mean", data.bands[i]->first}, {"sd", data.bands[i]->second}};
    sidecar["boxes"].push_back(jb);
  }
  {
    std::ofstream out(sidecar_path);
    if (!out) throw std::runtime_error("cannot write '" + sidecar_path + "'");
    out << sidecar.dump(2) << "\n";
  }

  // ---- svg ------------------------------------------------------------------
  const double width = 900, height = 520;
  const double ml = 70, mr = 20, mt = 40, mb = 95;
  const double plot_w = width - ml - mr, plot_h = height - mt - mb;

  double lo = data.reference_value, hi = data.reference_value;
  for (std::size_t i = 0; i < data.boxes.size(); ++i) {
    const auto& b = data.boxes[i];
    lo = std::min({lo, b.whisker_lo});
    hi = std::max({hi, b.whisker_hi});
    for (double v : b.outliers) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (data.bands[i]) {
      lo = std::min(lo, data.bands[i]->first - data.bands[i]->second);
      hi = std::max(hi, data.bands[i]->first + data.bands[i]->second);
    }
  }
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.06 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto ypix = [&](double v) { return mt + plot_h * (hi - v) / (hi - lo); };
  const std::size_t nb = data.boxes.size();
  const double slot = plot_w / static_cast<double>(nb);
  auto xcenter = [&](std::size_t i) { return ml + slot * (static_cast<double>(i) + 0.5); };
  const double bw = slot * 0.55;  // box width

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::string title =
      opts.title.empty() ? data.metric + " distributions" : opts.title;
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" font-family=\"sans-serif\" "
      << "font-size=\"15\" text-anchor=\"middle\">" << title << "</text>\n";

  // axes and y ticks
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\"" << ml + plot_w
      << "\" y2=\"" << mt + plot_h << "\" stroke=\"black\"/>\n";
  const double step = detail::nice_step(lo, hi);
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12; v += step) {
    const double y = ypix(v);
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\"" << y
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml + plot_w << "\" y2=\""
        << y << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    char lab[32];
    std::snprintf(lab, sizeof(lab), "%g", v + 0.0);
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << lab
        << "</text>\n";
  }

  // baseline bands first (under the boxes)
  for (std::size_t i = 0; i < nb; ++i) {
    if (!data.bands[i]) continue;
    const auto [mean, sd] = *data.bands[i];
    const double x = xcenter(i);
    svg << "<rect x=\"" << x - slot * 0.48 << "\" y=\"" << ypix(mean + sd) << "\" width=\""
        << slot * 0.96 << "\" height=\"" << std::fabs(ypix(mean - sd) - ypix(mean + sd))
        << "\" fill=\"#1f77b4\" fill-opacity=\"0.18\"/>\n";
    svg << "<line x1=\"" << x - slot * 0.48 << "\" y1=\"" << ypix(mean) << "\" x2=\""
        << x + slot * 0.48 << "\" y2=\"" << ypix(mean)
        << "\" stroke=\"#1f77b4\" stroke-width=\"1.2\"/>\n";
  }

  // boxes
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& b = data.boxes[i];
    const double x = xcenter(i);
    // group separators
    if (i > 0 && i % data.group_size == 0)
      svg << "<line x1=\"" << ml + slot * static_cast<double>(i) << "\" y1=\"" << mt
          << "\" x2=\"" << ml + slot * static_cast<double>(i) << "\" y2=\"" << mt + plot_h
          << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"3,3\" stroke-width=\"0.7\"/>\n";
    svg << "<line x1=\"" << x << "\" y1=\"" << ypix(b.whisker_lo) << "\" x2=\"" << x
        << "\" y2=\"" << ypix(b.q1) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << x << "\" y1=\"" << ypix(b.q3) << "\" x2=\"" << x << "\" y2=\""
        << ypix(b.whisker_hi) << "\" stroke=\"black\"/>\n";
    for (double w : {b.whisker_lo, b.whisker_hi})
      svg << "<line x1=\"" << x - bw * 0.3 << "\" y1=\"" << ypix(w) << "\" x2=\""
          << x + bw * 0.3 << "\" y2=\"" << ypix(w) << "\" stroke=\"black\"/>\n";
    svg << "<rect x=\"" << x - bw / 2 << "\" y=\"" << ypix(b.q3) << "\" width=\"" << bw
        << "\" height=\"" << std::fabs(ypix(b.q1) - ypix(b.q3))
        << "\" fill=\"#cfcfcf\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << x - bw / 2 << "\" y1=\"" << ypix(b.median) << "\" x2=\""
        << x + bw / 2 << "\" y2=\"" << ypix(b.median)
        << "\" stroke=\"black\" stroke-width=\"1.8\"/>\n";
    for (double v : b.outliers)
      svg << "<circle cx=\"" << x << "\" cy=\"" << ypix(v)
          << "\" r=\"2\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << mt + plot_h + 12
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" "
        << "transform=\"rotate(-45 " << x << " " << mt + plot_h + 12 << ")\">" << b.label
        << "</text>\n";
  }

  // red reference line at the smallest median discrimination
  svg << "<line x1=\"" << ml << "\" y1=\"" << ypix(data.reference_value) << "\" x2=\""
      << ml + plot_w << "\" y2=\"" << ypix(data.reference_value)
      << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
  svg << "</svg>\n";

  std::ofstream out(svg_path);
  if (!out) throw std::runtime_error("cannot write '" + svg_path + "'");
  out << svg.str();
}

}  // namespace fairmiss
