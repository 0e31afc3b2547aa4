#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairmiss/distributions.hpp"

namespace fairmiss {

/// Balanced three-factor layout: responses[i][j][k] holds the replicate list
/// for cell (i, j, k). In harness use the factors are (mdm, handler, model)
/// and the replication is the iteration count.
struct FactorialLayout {
  std::vector<std::string> level_names[3];
  std::vector<std::vector<std::vector<std::vector<double>>>> responses;

  std::size_t levels(int f) const { return level_names[f].size(); }
  std::size_t replication() const {
    return responses.empty() ? 0 : responses[0][0][0].size();
  }

  static FactorialLayout make(std::vector<std::string> a, std::vector<std::string> b,
                              std::vector<std::string> c) {
    FactorialLayout l;
    l.level_names[0] = std::move(a);
    l.level_names[1] = std::move(b);
    l.level_names[2] = std::move(c);
    l.responses.assign(
        l.levels(0),
        std::vector<std::vector<std::vector<double>>>(
            l.levels(1), std::vector<std::vector<double>>(l.levels(2))));
    return l;
  }

  void require_balanced(std::size_t min_replicates = 2) const {
    const std::size_t r = replication();
    if (r < min_replicates)
      throw std::invalid_argument("factorial layout needs >= " +
                                  std::to_string(min_replicates) + " replicates per cell");
    for (const auto& bi : responses)
      for (const auto& bj : bi)
        for (const auto& cell : bj)
          if (cell.size() != r)
            throw std::invalid_argument("factorial layout is unbalanced");
  }
};

struct AnovaEffect {
  std::string name;
  double ss = 0.0;
  double df = 0.0;
  double ms = 0.0;
  double f = 0.0;
  double p = 1.0;
};

struct AnovaTable {
  std::vector<AnovaEffect> effects;  // A, B, C, AB, AC, BC, ABC
  double ss_residual = 0.0;
  double df_residual = 0.0;
  double ss_total = 0.0;

  const AnovaEffect& effect(const std::string& name) const {
    for (const auto& e : effects)
      if (e.name == name) return e;
    throw std::out_of_range("no effect named '" + name + "'");
  }
};

/// Classical fixed-effects three-way ANOVA on a balanced layout. With balance
/// the Type I/II/III sums of squares coincide, so no contrast choice arises.
inline AnovaTable anova_three_way(const FactorialLayout& layout,
                                  const std::string& name_a = "A",
                                  const std::string& name_b = "B",
                                  const std::string& name_c = "C") {
  layout.require_balanced();
  const std::size_t a = layout.levels(0), b = layout.levels(1), c = layout.levels(2);
  const std::size_t r = layout.replication();
  if (a < 2 || b < 2 || c < 2)
    throw std::invalid_argument("anova_three_way needs >= 2 levels per factor");
  const double n = static_cast<double>(a * b * c * r);

  double grand = 0.0;
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  for (const auto& bi : layout.responses)
    for (const auto& bj : bi)
      for (const auto& cell : bj)
        for (double y : cell) {
          grand += y;
          y_min = std::min(y_min, y);
          y_max = std::max(y_max, y);
        }
  grand /= n;

  // cell means and marginal means
  std::vector<double> m_a(a, 0.0), m_b(b, 0.0), m_c(c, 0.0);
  std::vector<std::vector<double>> m_ab(a, std::vector<double>(b, 0.0));
  std::vector<std::vector<double>> m_ac(a, std::vector<double>(c, 0.0));
  std::vector<std::vector<double>> m_bc(b, std::vector<double>(c, 0.0));
  std::vector<std::vector<std::vector<double>>> m_abc(
      a, std::vector<std::vector<double>>(b, std::vector<double>(c, 0.0)));
  double ss_total = 0.0, ss_resid = 0.0;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j)
      for (std::size_t k = 0; k < c; ++k) {
        const auto& cell = layout.responses[i][j][k];
        const double mean =
            std::accumulate(cell.begin(), cell.end(), 0.0) / static_cast<double>(r);
        m_abc[i][j][k] = mean;
        m_a[i] += mean;
        m_b[j] += mean;
        m_c[k] += mean;
        m_ab[i][j] += mean;
        m_ac[i][k] += mean;
        m_bc[j][k] += mean;
        for (double y : cell) {
          ss_total += (y - grand) * (y - grand);
          ss_resid += (y - mean) * (y - mean);
        }
      }
  for (auto& v : m_a) v /= static_cast<double>(b * c);
  for (auto& v : m_b) v /= static_cast<double>(a * c);
  for (auto& v : m_c) v /= static_cast<double>(a * b);
  for (auto& row : m_ab) for (auto& v : row) v /= static_cast<double>(c);
  for (auto& row : m_ac) for (auto& v : row) v /= static_cast<double>(b);
  for (auto& row : m_bc) for (auto& v : row) v /= static_cast<double>(a);

  auto sq = [](double x) { return x * x; };
  double ss_a = 0.0, ss_b = 0.0, ss_c = 0.0;
  for (std::size_t i = 0; i < a; ++i) ss_a += sq(m_a[i] - grand);
  for (std::size_t j = 0; j < b; ++j) ss_b += sq(m_b[j] - grand);
  for (std::size_t k = 0; k < c; ++k) ss_c += sq(m_c[k] - grand);
  ss_a *= static_cast<double>(b * c * r);
  ss_b *= static_cast<double>(a * c * r);
  ss_c *= static_cast<double>(a * b * r);

  double ss_ab = 0.0, ss_ac = 0.0, ss_bc = 0.0, ss_abc = 0.0;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j)
      ss_ab += sq(m_ab[i][j] - m_a[i] - m_b[j] + grand);
  ss_ab *= static_cast<double>(c * r);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t k = 0; k < c; ++k)
      ss_ac += sq(m_ac[i][k] - m_a[i] - m_c[k] + grand);
  ss_ac *= static_cast<double>(b * r);
  for (std::size_t j = 0; j < b; ++j)
    for (std::size_t k = 0; k < c; ++k)
      ss_bc += sq(m_bc[j][k] - m_b[j] - m_c[k] + grand);
  ss_bc *= static_cast<double>(a * r);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j)
      for (std::size_t k = 0; k < c; ++k)
        ss_abc += sq(m_abc[i][j][k] - m_ab[i][j] - m_ac[i][k] - m_bc[j][k] +
                     m_a[i] + m_b[j] + m_c[k] - grand);
  ss_abc *= static_cast<double>(r);

  AnovaTable t;
  t.ss_total = ss_total;
  t.ss_residual = ss_resid;
  t.df_residual = static_cast<double>(a * b * c * (r - 1));
  const bool constant_response = y_min == y_max;
  if (!constant_response && (t.df_residual <= 0.0 || ss_resid <= 0.0))
    throw std::runtime_error("anova_three_way: zero residual variance");
  const double ms_resid = constant_response ? 0.0 : ss_resid / t.df_residual;

  auto push = [&](const std::string& name, double ss, double df) {
    AnovaEffect e;
    e.name = name;
    e.ss = ss;
    e.df = df;
    e.ms = ss / df;
    e.f = constant_response ? 0.0 : e.ms / ms_resid;
    e.p = constant_response ? 1.0 : 1.0 - f_cdf(e.f, df, t.df_residual);
    t.effects.push_back(e);
  };
  const double da = static_cast<double>(a - 1), db = static_cast<double>(b - 1),
               dc = static_cast<double>(c - 1);
  push(name_a, ss_a, da);
  push(name_b, ss_b, db);
  push(name_c, ss_c, dc);
  push(name_a + "*" + name_b, ss_ab, da * db);
  push(name_a + "*" + name_c, ss_ac, da * dc);
  push(name_b + "*" + name_c, ss_bc, db * dc);
  push(name_a + "*" + name_b + "*" + name_c, ss_abc, da * db * dc);
  return t;
}

struct WelchResult {
  double f = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;
  double p = 1.0;
};

/// Welch's heteroscedastic one-way F test with Satterthwaite denominator df.
inline WelchResult welch_anova(const std::vector<std::vector<double>>& groups) {
  const std::size_t k = groups.size();
  if (k < 2) throw std::invalid_argument("welch_anova needs >= 2 groups");
  std::vector<double> n(k), mean(k), var(k), w(k);
  double w_sum = 0.0, weighted_mean = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    n[g] = static_cast<double>(groups[g].size());
    if (n[g] < 2.0) throw std::invalid_argument("welch_anova: group with n < 2");
    mean[g] = std::accumulate(groups[g].begin(), groups[g].end(), 0.0) / n[g];
    double ss = 0.0;
    for (double x : groups[g]) ss += (x - mean[g]) * (x - mean[g]);
    var[g] = ss / (n[g] - 1.0);
    if (!(var[g] > 0.0)) throw std::invalid_argument("welch_anova: zero-variance group");
    w[g] = n[g] / var[g];
    w_sum += w[g];
    weighted_mean += w[g] * mean[g];
  }
  weighted_mean /= w_sum;

  double between = 0.0;
  for (std::size_t g = 0; g < k; ++g)
    between += w[g] * (mean[g] - weighted_mean) * (mean[g] - weighted_mean);
  between /= static_cast<double>(k - 1);

  double lambda = 0.0;  // sum (1 - w_g/W)^2 / (n_g - 1)
  for (std::size_t g = 0; g < k; ++g) {
    const double t = 1.0 - w[g] / w_sum;
    lambda += t * t / (n[g] - 1.0);
  }
  const double kk = static_cast<double>(k);
  WelchResult r;
  r.f = between / (1.0 + 2.0 * (kk - 2.0) / (kk * kk - 1.0) * lambda);
  r.df1 = kk - 1.0;
  r.df2 = (kk * kk - 1.0) / (3.0 * lambda);
  r.p = 1.0 - f_cdf(r.f, r.df1, r.df2);
  return r;
}

struct TestResult {
  double statistic = 0.0;
  double p = 1.0;
};

/// Shapiro-Wilk normality test, Royston's AS R94 approximation (3 <= n <= 5000).
inline TestResult shapiro_wilk(const std::vector<double>& sample) {
  const std::size_t n = sample.size();
  if (n < 3 || n > 5000)
    throw std::invalid_argument("shapiro_wilk: n must be in [3, 5000]");
  std::vector<double> x = sample;
  std::sort(x.begin(), x.end());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double ssq = 0.0;
  for (double v : x) ssq += (v - mean) * (v - mean);
  if (!(ssq > 0.0)) throw std::invalid_argument("shapiro_wilk: zero variance");

  // Blom scores and Royston-corrected coefficients.
  std::vector<double> m(n), a(n);
  double m_ssq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) /
                           (static_cast<double>(n) + 0.25));
    m_ssq += m[i] * m[i];
  }
  if (n == 3) {
    a[0] = -std::sqrt(0.5);
    a[1] = 0.0;
    a[2] = std::sqrt(0.5);
  } else {
    const double u = 1.0 / std::sqrt(static_cast<double>(n));
    const double rm = 1.0 / std::sqrt(m_ssq);
    const double an = -2.706056 * std::pow(u, 5) + 4.434685 * std::pow(u, 4) -
                      2.071190 * std::pow(u, 3) - 0.147981 * u * u +
                      0.221157 * u + m[n - 1] * rm;
    if (n > 5) {
      const double an1 = -3.582633 * std::pow(u, 5) + 5.682633 * std::pow(u, 4) -
                         1.752461 * std::pow(u, 3) - 0.293762 * u * u +
                         0.042981 * u + m[n - 2] * rm;
      const double phi = (m_ssq - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
                         (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
      const double rp = 1.0 / std::sqrt(phi);
      for (std::size_t i = 2; i + 2 < n; ++i) a[i] = m[i] * rp;
      a[n - 1] = an;
      a[n - 2] = an1;
      a[0] = -an;
      a[1] = -an1;
    } else {
      const double phi = (m_ssq - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * an * an);
      const double rp = 1.0 / std::sqrt(phi);
      for (std::size_t i = 1; i + 1 < n; ++i) a[i] = m[i] * rp;
      a[n - 1] = an;
      a[0] = -an;
    }
  }

  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i) num += a[i] * x[i];
  const double w = num * num / ssq;

  TestResult res;
  res.statistic = w;
  const double dn = static_cast<double>(n);
  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;    // 6/pi
    constexpr double stqr = 1.04719755119660;   // asin(sqrt(3/4))
    res.p = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
  } else if (n <= 11) {
    const double gamma = -2.273 + 0.459 * dn;
    const double mu = 0.5440 - 0.39978 * dn + 0.025054 * dn * dn -
                      0.0006714 * dn * dn * dn;
    const double sigma = std::exp(1.3822 - 0.77857 * dn + 0.062767 * dn * dn -
                                  0.0020322 * dn * dn * dn);
    const double z = (-std::log(gamma - std::log1p(-w)) - mu) / sigma;
    res.p = 1.0 - normal_cdf(z);
  } else {
    const double ln = std::log(dn);
    const double mu = -1.5861 - 0.31082 * ln - 0.083751 * ln * ln +
                      0.0038915 * ln * ln * ln;
    const double sigma = std::exp(-0.4803 - 0.082676 * ln + 0.0030302 * ln * ln);
    const double z = (std::log1p(-w) - mu) / sigma;
    res.p = 1.0 - normal_cdf(z);
  }
  return res;
}

/// Homoscedasticity test, Brown-Forsythe variant: one-way F on absolute
/// deviations from group medians.
inline TestResult levene_test(const std::vector<std::vector<double>>& groups) {
  const std::size_t k = groups.size();
  if (k < 2) throw std::invalid_argument("levene_test needs >= 2 groups");
  std::vector<std::vector<double>> z(k);
  double n_total = 0.0, grand = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    if (groups[g].size() < 2) throw std::invalid_argument("levene_test: group with n < 2");
    std::vector<double> s = groups[g];
    std::sort(s.begin(), s.end());
    const std::size_t ng = s.size();
    const double med = ng % 2 ? s[ng / 2] : 0.5 * (s[ng / 2 - 1] + s[ng / 2]);
    z[g].reserve(ng);
    for (double v : groups[g]) {
      z[g].push_back(std::fabs(v - med));
      grand += z[g].back();
    }
    n_total += static_cast<double>(ng);
  }
  grand /= n_total;

  double ss_between = 0.0, ss_within = 0.0;
  for (std::size_t g = 0; g < k; ++g) {
    const double ng = static_cast<double>(z[g].size());
    const double mg = std::accumulate(z[g].begin(), z[g].end(), 0.0) / ng;
    ss_between += ng * (mg - grand) * (mg - grand);
    for (double v : z[g]) ss_within += (v - mg) * (v - mg);
  }
  const double df1 = static_cast<double>(k - 1);
  const double df2 = n_total - static_cast<double>(k);
  TestResult res;
  if (ss_within <= 0.0) {
    // deviations identical across groups: no evidence of heteroscedasticity
    res.statistic = ss_between <= 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    res.p = ss_between <= 0.0 ? 1.0 : 0.0;
    return res;
  }
  res.statistic = (ss_between / df1) / (ss_within / df2);
  res.p = 1.0 - f_cdf(res.statistic, df1, df2);
  return res;
}

}  // namespace fairmiss
