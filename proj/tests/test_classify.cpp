#include "fairmiss/classify.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "test_util.hpp"

using namespace fairmiss;
using namespace testutil;

namespace {

DesignMatrix matrix(std::size_t n, std::size_t p) {
  DesignMatrix m;
  m.n_rows = n;
  m.n_cols = p;
  m.values.assign(n * p, 0.0);
  for (std::size_t c = 0; c < p; ++c) m.names.push_back("f" + std::to_string(c));
  return m;
}

// 1-D threshold data, margin 1 around 0
std::pair<DesignMatrix, std::vector<int>> separable_1d(std::size_t n, Rng& rng) {
  auto m = matrix(n, 1);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(rng.index(2));
    const double mag = 0.5 + 2.0 * rng.uniform();
    m.values[i] = label == 1 ? mag : -mag;
    y[i] = label;
  }
  return {m, y};
}

// four gaussian clusters at (+-1, +-1); label = 1 iff signs agree
std::pair<DesignMatrix, std::vector<int>> xor_data(std::size_t n, Rng& rng) {
  auto m = matrix(n, 2);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double sx = rng.index(2) ? 1.0 : -1.0;
    const double sy = rng.index(2) ? 1.0 : -1.0;
    m.values[i * 2] = sx + rng.normal(0.0, 0.25);
    m.values[i * 2 + 1] = sy + rng.normal(0.0, 0.25);
    y[i] = sx * sy > 0 ? 1 : 0;
  }
  return {m, y};
}

double train_accuracy(const TrainedModel& model, const DesignMatrix& x,
                      const std::vector<int>& y) {
  const auto pred = model.predict(x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (pred[i] == y[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("lr separates a margin-1 threshold fixture") {
  Rng rng(11);
  const auto [x, y] = separable_1d(300, rng);
  Rng fit_rng(1);
  const auto model = fit_model(ModelKind::lr, HyperGrid{}, 0, x, y, fit_rng);
  CHECK(train_accuracy(model, x, y) >= 0.99);
}

TEST_CASE("lr analytic gradient matches central finite differences") {
  Rng rng(21);
  const std::size_t n = 40, p = 5;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n), beta(p + 1);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c)
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rng.normal(0, 1);
    y[static_cast<Eigen::Index>(r)] = static_cast<double>(rng.index(2));
  }
  for (Eigen::Index j = 0; j <= static_cast<Eigen::Index>(p); ++j) beta[j] = rng.normal(0, 0.7);

  for (double lambda : {0.0, 0.3}) {
    const auto grad = logistic_gradient(x, y, beta, lambda);
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      const double h = 1e-5;
      Eigen::VectorXd bp = beta, bm = beta;
      bp[j] += h;
      bm[j] -= h;
      const double fd =
          (logistic_objective(x, y, bp, lambda) - logistic_objective(x, y, bm, lambda)) /
          (2.0 * h);
      CHECK(std::fabs(grad[j] - fd) / std::max(1.0, std::fabs(grad[j])) < 1e-6);
    }
  }
}

TEST_CASE("rf and boost solve XOR") {
  Rng rng(31);
  const auto [xtrain, ytrain] = xor_data(400, rng);
  const auto [xtest, ytest] = xor_data(400, rng);
  for (auto kind : {ModelKind::rf, ModelKind::boost}) {
    Rng fit_rng(7);
    const auto model = fit_model(kind, HyperGrid{}, kind == ModelKind::rf ? 0 : 3,
                                 xtrain, ytrain, fit_rng);
    CHECK(train_accuracy(model, xtest, ytest) >= 0.95);
  }
}

TEST_CASE("constant-label training sets are rejected") {
  auto m = matrix(10, 2);
  std::vector<int> y(10, 1);
  Rng rng(1);
  for (auto kind : {ModelKind::lr, ModelKind::rf, ModelKind::boost, ModelKind::svm_rbf})
    CHECK_THROWS(fit_model(kind, HyperGrid{}, 0, m, y, rng));
}

TEST_CASE("predict on an empty row set gives an empty vector") {
  Rng rng(41);
  const auto [x, y] = separable_1d(100, rng);
  Rng fit_rng(2);
  const auto model = fit_model(ModelKind::lr, HyperGrid{}, 1, x, y, fit_rng);
  const auto empty = matrix(0, 1);
  CHECK(model.predict(empty).empty());

  auto wrong = matrix(3, 2);
  CHECK_THROWS(model.predict(wrong));
}

TEST_CASE("duplicate rows get identical labels") {
  Rng rng(51);
  const auto [x, y] = xor_data(200, rng);
  Rng fit_rng(3);
  const auto model = fit_model(ModelKind::rf, HyperGrid{}, 1, x, y, fit_rng);
  auto dup = matrix(2, 2);
  dup.values = {0.7, -0.3, 0.7, -0.3};
  const auto pred = model.predict(dup);
  CHECK(pred[0] == pred[1]);
}

TEST_CASE("rf prediction is invariant to tree order") {
  Rng rng(61);
  const auto [x, y] = xor_data(300, rng);
  Rng fit_rng(4);
  auto model = fit_model(ModelKind::rf, HyperGrid{}, 0, x, y, fit_rng);
  const auto before = model.predict(x);
  auto& forest = std::get<ForestModel>(model.impl);
  std::reverse(forest.trees.begin(), forest.trees.end());
  CHECK(model.predict(x) == before);
}

TEST_CASE("boost staged training loss never increases") {
  Rng rng(71);
  const auto [x, y] = xor_data(300, rng);
  Rng fit_rng(5);
  const auto model = fit_model(ModelKind::boost, HyperGrid{}, 1, x, y, fit_rng);
  const auto& losses = std::get<BoostModel>(model.impl).staged_train_loss;
  REQUIRE(losses.size() == 301);
  for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-12);
}

TEST_CASE("svm satisfies the KKT conditions within tolerance") {
  Rng rng(81);
  const auto [x, y] = xor_data(250, rng);
  for (std::size_t hyper : {std::size_t(0), std::size_t(2), std::size_t(5)}) {
    Rng fit_rng(6);
    const auto model = fit_model(ModelKind::svm_rbf, HyperGrid{}, hyper, x, y, fit_rng);
    const auto& w = std::get<SvmWrapped>(model.impl);
    REQUIRE(w.svm.converged);
    const double c = HyperGrid{}.svm[hyper].c;
    const double tol = 1e-3;

    const auto z = w.scaler.transform(x.values.data(), x.n_rows, x.n_cols);
    std::vector<double> alpha(x.n_rows, 0.0);
    for (std::size_t s = 0; s < w.svm.sv_index.size(); ++s) {
      const double ys = y[w.svm.sv_index[s]] == 1 ? 1.0 : -1.0;
      alpha[w.svm.sv_index[s]] = w.svm.coef[s] * ys;
    }
    for (std::size_t i = 0; i < x.n_rows; ++i) {
      const double yd = (y[i] == 1 ? 1.0 : -1.0) * w.svm.decision(&z[i * x.n_cols], x.n_cols);
      if (alpha[i] <= 0.0)
        CHECK(yd >= 1.0 - tol);
      else if (alpha[i] >= c)
        CHECK(yd <= 1.0 + tol);
      else
        CHECK(std::fabs(yd - 1.0) <= tol);
    }
  }
}

TEST_CASE("svm decides a simple separable problem") {
  Rng rng(91);
  const auto [x, y] = separable_1d(200, rng);
  Rng fit_rng(8);
  const auto model = fit_model(ModelKind::svm_rbf, HyperGrid{}, 2, x, y, fit_rng);
  CHECK(train_accuracy(model, x, y) >= 0.99);
}

TEST_CASE("rf variable importance finds the informative feature") {
  Rng rng(101);
  const std::size_t n = 600, p = 6;
  auto x = matrix(n, p);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) x.values[i * p + c] = rng.normal(0, 1);
    y[i] = x.values[i * p + 2] > 0 ? 1 : 0;  // only feature 2 matters
  }
  Rng fit_rng(9);
  const auto model = fit_model(ModelKind::rf, HyperGrid{}, 0, x, y, fit_rng);
  const auto imp = rf_variable_importance(model);
  REQUIRE(imp.size() == p);
  double sum = 0.0;
  std::size_t best = 0;
  for (std::size_t c = 0; c < p; ++c) {
    sum += imp[c];
    if (imp[c] > imp[best]) best = c;
  }
  CHECK(sum == Catch::Approx(1.0).margin(1e-12));
  CHECK(best == 2);
  CHECK(imp[2] > 0.5);

  CHECK_THROWS(rf_variable_importance(TrainedModel{}));
}

TEST_CASE("rf importance is roughly uniform on pure noise") {
  Rng rng(111);
  const std::size_t n = 2000, p = 5;
  auto x = matrix(n, p);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < p; ++c) x.values[i * p + c] = rng.normal(0, 1);
    y[i] = static_cast<int>(rng.index(2));
  }
  HyperGrid grid;
  grid.rf = {{500, 0, 0}};
  Rng fit_rng(10);
  const auto model = fit_model(ModelKind::rf, grid, 0, x, y, fit_rng);
  const auto imp = rf_variable_importance(model);
  const double mx = *std::max_element(imp.begin(), imp.end());
  const double mn = *std::min_element(imp.begin(), imp.end());
  CHECK(mx / mn < 3.0);
}

TEST_CASE("cross_validate picks the only point of a singleton grid") {
  Rng rng(121);
  const auto [x, y] = separable_1d(120, rng);
  HyperGrid grid;
  grid.lr = {{0.1}};
  Rng cv_rng(12);
  const auto r = cross_validate(ModelKind::lr, grid, x, y, 5, cv_rng);
  CHECK(r.chosen == 0);
  CHECK(r.folds_used == 5);
}

TEST_CASE("cross_validate prefers the capacity that fits") {
  Rng rng(131);
  const auto [x, y] = xor_data(300, rng);
  HyperGrid grid;
  grid.rf = {{60, 1, 2}, {60, 0, 2}};  // stumps cannot express XOR
  Rng cv_rng(13);
  const auto r = cross_validate(ModelKind::rf, grid, x, y, 5, cv_rng);
  CHECK(r.chosen == 1);
  CHECK(r.mean_accuracy[1] > r.mean_accuracy[0]);
}

TEST_CASE("cross_validate is seed-deterministic and breaks ties earliest-first") {
  Rng rng(141);
  const auto [x, y] = separable_1d(150, rng);
  Rng a(14), b(14);
  const auto ra = cross_validate(ModelKind::lr, HyperGrid{}, x, y, 5, a);
  const auto rb = cross_validate(ModelKind::lr, HyperGrid{}, x, y, 5, b);
  CHECK(ra.chosen == rb.chosen);
  CHECK(ra.mean_accuracy == rb.mean_accuracy);

  // duplicated grid point: accuracies tie exactly, earliest index wins
  HyperGrid dup;
  dup.lr = {{0.1}, {0.1}};
  Rng c(15);
  const auto rc = cross_validate(ModelKind::lr, dup, x, y, 5, c);
  CHECK(rc.mean_accuracy[0] == rc.mean_accuracy[1]);
  CHECK(rc.chosen == 0);
}

TEST_CASE("cross_validate merges folds when a class would vanish") {
  // 10 rows, 2 positives: whenever both positives land in one fold its
  // training complement loses the class and the folds merge down
  auto x = matrix(10, 1);
  std::vector<int> y(10, 0);
  for (std::size_t i = 0; i < 10; ++i) x.values[i] = static_cast<double>(i) - 4.0;
  y[8] = y[9] = 1;
  x.values[8] = 10.0;
  x.values[9] = 11.0;
  HyperGrid grid;
  grid.lr = {{0.1}};

  bool saw_merge = false, saw_plain = false;
  for (int seed = 0; seed < 200 && !(saw_merge && saw_plain); ++seed) {
    Rng rng(seed);
    const auto r = cross_validate(ModelKind::lr, grid, x, y, 5, rng);
    REQUIRE(r.folds_used >= 2);
    if (r.folds_used < 5) {
      CHECK(!r.notes.empty());
      saw_merge = true;
    } else {
      CHECK(r.notes.empty());
      saw_plain = true;
    }
  }
  CHECK(saw_merge);
  CHECK(saw_plain);

  // a single positive row can never survive any partition: fully degenerate
  auto x1 = matrix(6, 1);
  x1.values = {0.0, 0.1, 0.2, 0.3, 0.4, 5.0};
  std::vector<int> y1 = {0, 0, 0, 0, 0, 1};
  Rng rng(16);
  const auto deg = cross_validate(ModelKind::lr, grid, x1, y1, 5, rng);
  CHECK(deg.folds_used == 0);
  CHECK(deg.chosen == 0);
  CHECK(!deg.notes.empty());
}

TEST_CASE("predictions never depend on the sensitive column") {
  // permuting the sensitive column changes nothing the models can see
  Rng rng(151);
  auto schema = std::vector<ColumnSpec>{num_col("x1"), cat_col("c", {"a", "b", "d"}),
                                        num_col("s", Role::sensitive),
                                        cat_col("y", {"neg", "pos"}, Role::outcome)};
  Table t(schema, 120);
  std::vector<int> labels(120);
  for (std::size_t r = 0; r < 120; ++r) {
    t.set_cell(0, r, rng.normal(0, 1));
    t.set_cell(1, r, static_cast<double>(rng.index(3)));
    t.set_cell(2, r, static_cast<double>(rng.index(2)));
    labels[r] = t.cell(0, r) + (t.cell(1, r) == 2.0 ? 1.0 : 0.0) > 0.3 ? 1 : 0;
    t.set_cell(3, r, labels[r]);
  }
  const auto x = one_hot_encode(t, {Role::sensitive, Role::outcome});

  std::vector<double> s(120);
  for (std::size_t r = 0; r < 120; ++r) s[r] = t.cell(2, r);
  Rng perm(99);
  perm.shuffle(s);
  const auto permuted = t.with_column(2, t.spec(2), s);
  const auto xp = one_hot_encode(permuted, {Role::sensitive, Role::outcome});
  REQUIRE(x.values == xp.values);

  for (auto kind : {ModelKind::lr, ModelKind::rf, ModelKind::boost, ModelKind::svm_rbf}) {
    Rng fit_rng(17);
    const auto model = fit_model(kind, HyperGrid{}, 0, x, labels, fit_rng);
    CHECK(model.predict(x) == model.predict(xp));
  }
}
