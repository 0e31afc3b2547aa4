#include "fairmiss/stats.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "fairmiss/random.hpp"
#include "oracle_fixtures.hpp"

using namespace fairmiss;

namespace {

std::vector<double> vec(const double* p, std::size_t n) { return {p, p + n}; }

FactorialLayout layout_from_fixture(const double* y, const int levels[3], int reps) {
  FactorialLayout l = FactorialLayout::make(
      std::vector<std::string>(levels[0], "a"), std::vector<std::string>(levels[1], "b"),
      std::vector<std::string>(levels[2], "c"));
  std::size_t pos = 0;
  for (int i = 0; i < levels[0]; ++i)
    for (int j = 0; j < levels[1]; ++j)
      for (int k = 0; k < levels[2]; ++k)
        for (int t = 0; t < reps; ++t) l.responses[i][j][k].push_back(y[pos++]);
  return l;
}

// Classical one-way ANOVA, used only to cross-check the Welch reduction.
double oneway_p(const std::vector<std::vector<double>>& groups) {
  double n = 0.0, grand = 0.0;
  for (const auto& g : groups)
    for (double v : g) { grand += v; n += 1.0; }
  grand /= n;
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    double m = 0.0;
    for (double v : g) m += v;
    m /= static_cast<double>(g.size());
    ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ssw += (v - m) * (v - m);
  }
  const double k = static_cast<double>(groups.size());
  const double f = (ssb / (k - 1.0)) / (ssw / (n - k));
  return 1.0 - f_cdf(f, k - 1.0, n - k);
}

}  // namespace

TEST_CASE("f_cdf matches frozen reference values") {
  for (const auto& c : oracle::f_cdf_cases)
    CHECK(std::fabs(f_cdf(c[0], c[1], c[2]) - c[3]) < 1e-10);
}

TEST_CASE("f_cdf boundaries and symmetry") {
  CHECK(f_cdf(0.0, 3, 7) == 0.0);
  CHECK(f_cdf(1e12, 3, 7) == Catch::Approx(1.0).margin(1e-10));
  // X ~ F(d, d) implies 1/X ~ F(d, d), so the median is 1
  CHECK(f_cdf(1.0, 9, 9) == Catch::Approx(0.5).margin(1e-12));
  CHECK_THROWS(f_cdf(1.0, 0, 5));
}

TEST_CASE("f_cdf is monotone and maps into [0,1]") {
  Rng rng(991);
  for (int trial = 0; trial < 200; ++trial) {
    const double d1 = 0.5 + 30.0 * rng.uniform();
    const double d2 = 0.5 + 30.0 * rng.uniform();
    double prev = 0.0;
    for (double x = 0.0; x < 8.0; x += 0.25) {
      const double v = f_cdf(x, d1, d2);
      CHECK(v >= prev - 1e-14);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("shapiro_wilk matches frozen reference values") {
  struct Case {
    std::vector<double> x;
    double w, p;
  };
  const Case cases[] = {
      {vec(oracle::sw_normal20, std::size(oracle::sw_normal20)),
       oracle::sw_normal20_W, oracle::sw_normal20_p},
      {vec(oracle::sw_expo20, std::size(oracle::sw_expo20)),
       oracle::sw_expo20_W, oracle::sw_expo20_p},
      {vec(oracle::sw_normal60, std::size(oracle::sw_normal60)),
       oracle::sw_normal60_W, oracle::sw_normal60_p},
      {vec(oracle::sw_normal8, std::size(oracle::sw_normal8)),
       oracle::sw_normal8_W, oracle::sw_normal8_p},
  };
  for (const auto& c : cases) {
    const auto r = shapiro_wilk(c.x);
    CHECK(r.statistic == Catch::Approx(c.w).margin(1e-4));
    CHECK(r.p == Catch::Approx(c.p).margin(1e-4));
  }
}

TEST_CASE("shapiro_wilk calibration and power at n=100") {
  int normal_pass = 0, expo_reject = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(1000 + seed);
    std::vector<double> normal(100), expo(100);
    for (auto& v : normal) v = rng.normal(3.0, 1.7);
    for (auto& v : expo) v = -std::log(1.0 - rng.uniform());
    if (shapiro_wilk(normal).p > 0.01) ++normal_pass;
    if (shapiro_wilk(expo).p < 0.01) ++expo_reject;
  }
  CHECK(normal_pass >= 95);
  CHECK(expo_reject >= 95);
}

TEST_CASE("shapiro_wilk domain errors") {
  CHECK_THROWS(shapiro_wilk({1.0, 2.0}));
  CHECK_THROWS(shapiro_wilk(std::vector<double>(5, 3.3)));
}

TEST_CASE("levene matches frozen reference values") {
  const auto r = levene_test({vec(oracle::lev_a, std::size(oracle::lev_a)),
                              vec(oracle::lev_b, std::size(oracle::lev_b)),
                              vec(oracle::lev_c, std::size(oracle::lev_c))});
  CHECK(r.statistic == Catch::Approx(oracle::lev_W).margin(1e-6));
  CHECK(r.p == Catch::Approx(oracle::lev_p).margin(1e-6));
}

TEST_CASE("levene degenerate and high-power cases") {
  // exact copies of one group: W = 0, p = 1
  std::vector<double> g = {1.0, 2.5, 3.0, 4.25, 7.0};
  const auto same = levene_test({g, g, g});
  CHECK(same.statistic == 0.0);
  CHECK(same.p == 1.0);

  Rng rng(77);
  std::vector<double> a(100), b(100);
  for (auto& v : a) v = rng.normal(0.0, 1.0);
  for (auto& v : b) v = rng.normal(0.0, 5.0);
  CHECK(levene_test({a, b}).p < 0.001);
}

TEST_CASE("welch_anova matches frozen reference values") {
  const auto r = welch_anova({vec(oracle::welch_g1, std::size(oracle::welch_g1)),
                              vec(oracle::welch_g2, std::size(oracle::welch_g2)),
                              vec(oracle::welch_g3, std::size(oracle::welch_g3))});
  CHECK(r.f == Catch::Approx(oracle::welch_F).margin(1e-6));
  CHECK(r.df1 == Catch::Approx(oracle::welch_df1).margin(1e-9));
  CHECK(r.df2 == Catch::Approx(oracle::welch_df2).margin(1e-6));
  CHECK(r.p == Catch::Approx(oracle::welch_p).margin(1e-6));
}

TEST_CASE("welch_anova F*=0 when group means coincide") {
  const auto r = welch_anova({{1.0, 2.0, 3.0}, {0.0, 1.5, 4.5}, {2.0, 2.0 + 1e-9, 1.9999999990}});
  CHECK(r.f == Catch::Approx(0.0).margin(1e-12));
  CHECK(r.p == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("welch_anova with two groups equals squared Welch t") {
  Rng rng(4242);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(12), b(17);
    for (auto& v : a) v = rng.normal(0.0, 1.0);
    for (auto& v : b) v = rng.normal(0.4, 2.5);
    const auto r = welch_anova({a, b});

    auto mv = [](const std::vector<double>& x) {
      double m = 0.0;
      for (double v : x) m += v;
      m /= static_cast<double>(x.size());
      double s = 0.0;
      for (double v : x) s += (v - m) * (v - m);
      return std::pair(m, s / (static_cast<double>(x.size()) - 1.0));
    };
    const auto [ma, va] = mv(a);
    const auto [mb, vb] = mv(b);
    const double na = 12.0, nb = 17.0;
    const double se2 = va / na + vb / nb;
    const double t2 = (ma - mb) * (ma - mb) / se2;
    const double df = se2 * se2 / (va * va / (na * na * (na - 1.0)) +
                                   vb * vb / (nb * nb * (nb - 1.0)));
    CHECK(r.f == Catch::Approx(t2).epsilon(1e-10));
    CHECK(r.df2 == Catch::Approx(df).epsilon(1e-10));
    CHECK(r.p == Catch::Approx(1.0 - f_cdf(t2, 1.0, df)).margin(1e-12));
  }
}

TEST_CASE("welch_anova reduces to classical one-way under equal variances") {
  // shifted copies give exactly equal sample variances and sizes
  Rng rng(5150);
  std::vector<double> base(400);
  for (auto& v : base) v = rng.normal(0.0, 1.0);
  std::vector<std::vector<double>> groups(3, base);
  for (auto& v : groups[1]) v += 0.05;
  for (auto& v : groups[2]) v += 0.10;
  const auto w = welch_anova(groups);
  CHECK(std::fabs(w.p - oneway_p(groups)) < 1e-3);
}

TEST_CASE("welch_anova degenerate groups rejected") {
  CHECK_THROWS(welch_anova({{1.0, 2.0}}));
  CHECK_THROWS(welch_anova({{1.0, 2.0}, {3.0}}));
  CHECK_THROWS(welch_anova({{1.0, 2.0}, {3.0, 3.0}}));
}

TEST_CASE("anova_three_way matches frozen reference values") {
  struct Fixture {
    const double* y;
    const int* levels;
    int reps;
    const double* ss;
    const double* df;
    const double* F;
    const double* p;
  };
  const Fixture fixtures[] = {
      {oracle::an222_y, oracle::an222_levels, oracle::an222_reps, oracle::an222_ss,
       oracle::an222_df, oracle::an222_F, oracle::an222_p},
      {oracle::an324_y, oracle::an324_levels, oracle::an324_reps, oracle::an324_ss,
       oracle::an324_df, oracle::an324_F, oracle::an324_p},
  };
  for (const auto& fx : fixtures) {
    const auto layout = layout_from_fixture(fx.y, fx.levels, fx.reps);
    const auto tab = anova_three_way(layout);
    REQUIRE(tab.effects.size() == 7);
    for (int e = 0; e < 7; ++e) {
      CHECK(tab.effects[e].ss == Catch::Approx(fx.ss[e]).epsilon(1e-6));
      CHECK(tab.effects[e].df == Catch::Approx(fx.df[e]).margin(1e-12));
      CHECK(tab.effects[e].f == Catch::Approx(fx.F[e]).epsilon(1e-6));
      CHECK(tab.effects[e].p == Catch::Approx(fx.p[e]).margin(1e-6));
    }
    CHECK(tab.ss_residual == Catch::Approx(fx.ss[7]).epsilon(1e-6));
    CHECK(tab.df_residual == Catch::Approx(fx.df[7]).margin(1e-12));
  }
}

TEST_CASE("anova_three_way on constant responses gives F=0, p=1") {
  auto layout = FactorialLayout::make({"x", "y"}, {"x", "y"}, {"x", "y"});
  for (auto& bi : layout.responses)
    for (auto& bj : bi)
      for (auto& cell : bj) cell = {4.2, 4.2, 4.2};
  const auto tab = anova_three_way(layout);
  for (const auto& e : tab.effects) {
    CHECK(e.f == 0.0);
    CHECK(e.p == 1.0);
  }
}

TEST_CASE("anova_three_way sums of squares are additive") {
  Rng rng(31);
  auto layout = FactorialLayout::make({"1", "2", "3"}, {"1", "2", "3", "4"},
                                      {"1", "2", "3", "4"});
  for (auto& bi : layout.responses)
    for (auto& bj : bi)
      for (auto& cell : bj)
        for (int t = 0; t < 5; ++t) cell.push_back(rng.normal(0.0, 1.0));
  const auto tab = anova_three_way(layout);
  double total = tab.ss_residual;
  for (const auto& e : tab.effects) total += e.ss;
  CHECK(total == Catch::Approx(tab.ss_total).epsilon(1e-8));
}

TEST_CASE("anova_three_way invariant to centering and scaling") {
  Rng rng(32);
  auto layout = FactorialLayout::make({"1", "2"}, {"1", "2", "3"}, {"1", "2"});
  for (auto& bi : layout.responses)
    for (auto& bj : bi)
      for (auto& cell : bj)
        for (int t = 0; t < 4; ++t) cell.push_back(rng.normal(2.0, 1.5));
  const auto base = anova_three_way(layout);

  auto shifted = layout;
  for (auto& bi : shifted.responses)
    for (auto& bj : bi)
      for (auto& cell : bj)
        for (auto& v : cell) v = 3.0 * (v - 17.0);
  const auto scaled = anova_three_way(shifted);
  for (std::size_t e = 0; e < base.effects.size(); ++e) {
    CHECK(scaled.effects[e].f == Catch::Approx(base.effects[e].f).epsilon(1e-9));
    CHECK(scaled.effects[e].p == Catch::Approx(base.effects[e].p).margin(1e-9));
  }
}

TEST_CASE("anova_three_way detects a planted main effect") {
  Rng rng(33);
  auto layout = FactorialLayout::make({"1", "2", "3"}, {"1", "2"}, {"1", "2"});
  for (std::size_t i = 0; i < 3; ++i)
    for (auto& bj : layout.responses[i])
      for (auto& cell : bj)
        for (int t = 0; t < 10; ++t)
          cell.push_back(static_cast<double>(i) + rng.normal(0.0, 0.05));
  const auto tab = anova_three_way(layout, "A", "B", "C");
  CHECK(tab.effect("A").p < 1e-6);
  CHECK(tab.effect("A*B").p > 0.1);
  CHECK(tab.effect("A*C").p > 0.1);
  CHECK(tab.effect("B*C").p > 0.1);
  CHECK(tab.effect("A*B*C").p > 0.1);
}

TEST_CASE("anova_three_way rejects unbalanced layouts") {
  auto layout = FactorialLayout::make({"1", "2"}, {"1", "2"}, {"1", "2"});
  for (auto& bi : layout.responses)
    for (auto& bj : bi)
      for (auto& cell : bj) cell = {1.0, 2.0};
  layout.responses[1][1][1].push_back(3.0);
  CHECK_THROWS(anova_three_way(layout));
}
