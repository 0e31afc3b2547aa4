#include "fairmiss/table.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <set>

#include "fairmiss/random.hpp"
#include "test_util.hpp"

using namespace fairmiss;
using namespace testutil;

namespace {

std::vector<ColumnSpec> mini_schema() {
  return {num_col("x"), cat_col("color", {"red", "green", "blue"}),
          num_col("s", Role::sensitive), cat_col("y", {"neg", "pos"}, Role::outcome)};
}

}  // namespace

TEST_CASE("load_csv masks NA tokens and preserves rows") {
  TempDir dir("load");
  const auto path = write_file(dir, "mini.csv",
                               "x,color,s,y\n"
                               "1.5,red,0,pos\n"
                               "2.0,?,1,neg\n"
                               "3.25,blue,1,pos\n");
  const auto t = load_csv(path, mini_schema());
  REQUIRE(t.n_rows() == 3);
  CHECK(t.cell(0, 0) == 1.5);
  CHECK(t.level_of(1, 2) == "blue");
  CHECK(!t.observed(1, 1));
  CHECK(t.observed(1, 0));
  CHECK(t.observed(0, 1));
  // mask false at exactly one cell
  std::size_t masked = 0;
  for (std::size_t c = 0; c < t.n_cols(); ++c)
    for (std::size_t r = 0; r < t.n_rows(); ++r)
      if (!t.observed(c, r)) ++masked;
  CHECK(masked == 1);
}

TEST_CASE("load_csv header is order-insensitive and extra columns are ignored") {
  TempDir dir("load2");
  const auto path = write_file(dir, "shuffled.csv",
                               "junk,y,s,x,color\n"
                               "zzz,pos,1,7.5,green\n");
  const auto t = load_csv(path, mini_schema());
  REQUIRE(t.n_rows() == 1);
  CHECK(t.cell(0, 0) == 7.5);
  CHECK(t.level_of(1, 0) == "green");
}

TEST_CASE("load_csv accepts an empty data section") {
  TempDir dir("load3");
  const auto path = write_file(dir, "empty.csv", "x,color,s,y\n");
  CHECK(load_csv(path, mini_schema()).n_rows() == 0);
}

TEST_CASE("load_csv strict-mode errors") {
  TempDir dir("load4");
  auto schema = mini_schema();
  CHECK_THROWS(load_csv(write_file(dir, "a.csv", "x,color,s\n1,red,0\n"), schema));
  CHECK_THROWS(load_csv(write_file(dir, "b.csv", "x,color,s,y\nabc,red,0,pos\n"), schema));
  CHECK_THROWS(load_csv(write_file(dir, "c.csv", "x,color,s,y\n1,purple,0,pos\n"), schema));
  CHECK_THROWS(load_csv(write_file(dir, "d.csv", "x,color,s,y\n1,red,?,pos\n"), schema));
  CHECK_THROWS(load_csv(write_file(dir, "e.csv", "x,color,s,y\n1,red,0,NA\n"), schema));
}

TEST_CASE("load_csv lenient mode reports issues instead of throwing") {
  TempDir dir("load5");
  const auto path = write_file(dir, "messy.csv",
                               "x,color,s,y\n"
                               "1,red,0,pos\n"
                               "oops,purple,0,pos\n"
                               "2,blue,?,neg\n");
  std::vector<CellIssue> issues;
  const auto t = load_csv(path, mini_schema(), default_na_tokens(), &issues);
  CHECK(t.n_rows() == 3);
  REQUIRE(issues.size() == 3);
  CHECK(!t.observed(0, 1));
  CHECK(!t.observed(1, 1));
  CHECK(!t.observed(2, 2));
}

TEST_CASE("quoted CSV fields may contain commas and quotes") {
  TempDir dir("load6");
  auto schema = std::vector<ColumnSpec>{
      cat_col("desc", {"a,b", "c\"d", "plain"}), num_col("s", Role::sensitive),
      cat_col("y", {"neg", "pos"}, Role::outcome)};
  const auto path = write_file(dir, "quoted.csv",
                               "desc,s,y\n"
                               "\"a,b\",0,pos\n"
                               "\"c\"\"d\",1,neg\n"
                               "plain,0,neg\n");
  const auto t = load_csv(path, schema);
  CHECK(t.level_of(0, 0) == "a,b");
  CHECK(t.level_of(0, 1) == "c\"d");
}

TEST_CASE("complete_cases keeps unmasked rows in order and is idempotent") {
  auto t = make_table(mini_schema(), {{1, 0, 0, 1},
                                      {2, 1, 0, 0},
                                      {3, 2, 1, 1},
                                      {4, 0, 1, 0},
                                      {5, 1, 0, 1}});
  t.set_missing(0, 1);
  t.set_missing(1, 3);
  const auto cc = complete_cases(t);
  REQUIRE(cc.n_rows() == 3);
  CHECK(cc.cell(0, 0) == 1);
  CHECK(cc.cell(0, 1) == 3);
  CHECK(cc.cell(0, 2) == 5);
  CHECK(cc.fully_observed());

  const auto cc2 = complete_cases(cc);
  CHECK(cc2.n_rows() == cc.n_rows());
  CHECK(cc2.checksum() == cc.checksum());

  // fully observed input is the identity
  const auto full = make_table(mini_schema(), {{1, 0, 0, 1}, {2, 1, 1, 0}});
  CHECK(complete_cases(full).checksum() == full.checksum());
}

TEST_CASE("split partitions rows with ceil(n/3) test rows") {
  Rng rng(7);
  auto rows = std::vector<std::vector<double>>(1000, {0, 0, 0, 0});
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i][0] = static_cast<double>(i);
  const auto t = make_table(mini_schema(), rows);
  const auto s = split(t, 1.0 / 3.0, rng);
  CHECK(s.test_idx.size() == 334);
  CHECK(s.train_idx.size() == 666);

  std::set<std::size_t> all(s.test_idx.begin(), s.test_idx.end());
  for (auto i : s.train_idx) CHECK(all.insert(i).second);
  CHECK(all.size() == 1000);
}

TEST_CASE("split of three rows and determinism") {
  const auto t = make_table(mini_schema(), {{1, 0, 0, 1}, {2, 1, 0, 0}, {3, 2, 1, 1}});
  Rng a(42), b(42);
  const auto sa = split(t, 1.0 / 3.0, a);
  CHECK(sa.test_idx.size() == 1);
  CHECK(sa.train_idx.size() == 2);
  const auto sb = split(t, 1.0 / 3.0, b);
  CHECK(sa.test_idx == sb.test_idx);
  CHECK(sa.train_idx == sb.train_idx);
  // different seed gives a different partition eventually
  bool differs = false;
  for (int k = 0; k < 20 && !differs; ++k) {
    Rng d(100 + k);
    differs = split(t, 1.0 / 3.0, d).test_idx != sa.test_idx;
  }
  CHECK(differs);

  const auto one = make_table(mini_schema(), {{1, 0, 0, 1}});
  Rng e(1);
  CHECK_THROWS(split(one, 1.0 / 3.0, e));
  Rng f(1);
  CHECK_THROWS(split(t, 0.0, f));
}

TEST_CASE("apply_indices keeps twins row-aligned") {
  const auto t = make_table(mini_schema(), {{10, 0, 0, 1},
                                            {20, 1, 0, 0},
                                            {30, 2, 1, 1},
                                            {40, 0, 1, 0}});
  SplitIndices idx;
  idx.test_idx = {1, 3};
  idx.train_idx = {0, 2};
  const auto [train, test] = apply_indices(t, idx);
  REQUIRE(train.n_rows() == 2);
  REQUIRE(test.n_rows() == 2);
  CHECK(train.cell(0, 0) == 10);
  CHECK(train.cell(0, 1) == 30);
  CHECK(test.cell(0, 0) == 20);
  CHECK(test.cell(0, 1) == 40);

  // same indices on an amputed twin give equal row counts per side
  auto amputed = t;
  amputed.set_missing(0, 1);
  const auto [atrain, atest] = apply_indices(amputed, idx);
  CHECK(atrain.n_rows() == train.n_rows());
  CHECK(atest.n_rows() == test.n_rows());
  CHECK(!atest.observed(0, 0));

  SplitIndices empty_test;
  empty_test.train_idx = {0, 1, 2, 3};
  const auto [full, none] = apply_indices(t, empty_test);
  CHECK(full.n_rows() == 4);
  CHECK(none.n_rows() == 0);

  SplitIndices bad;
  bad.test_idx = {9};
  CHECK_THROWS(apply_indices(t, bad));
}

TEST_CASE("one_hot_encode expands categoricals against the first level") {
  const auto t = make_table(mini_schema(), {{1.5, 0, 0, 1},
                                            {2.5, 1, 0, 0},
                                            {3.5, 2, 1, 1}});
  const auto m = one_hot_encode(t, {Role::sensitive, Role::outcome});
  REQUIRE(m.n_cols == 3);  // x + 2 indicators
  CHECK(m.names[0] == "x");
  CHECK(m.names[1] == "color=green");
  CHECK(m.names[2] == "color=blue");
  // rows [red, green, blue] -> indicators [00, 10, 01]
  CHECK(m.at(0, 1) == 0.0);
  CHECK(m.at(0, 2) == 0.0);
  CHECK(m.at(1, 1) == 1.0);
  CHECK(m.at(1, 2) == 0.0);
  CHECK(m.at(2, 1) == 0.0);
  CHECK(m.at(2, 2) == 1.0);

  // two-level categorical becomes a single indicator
  const auto t2 = make_table({cat_col("b", {"no", "yes"}), num_col("s", Role::sensitive),
                              cat_col("y", {"neg", "pos"}, Role::outcome)},
                             {{0, 0, 1}, {1, 1, 0}});
  const auto m2 = one_hot_encode(t2, {Role::sensitive, Role::outcome});
  CHECK(m2.n_cols == 1);
  CHECK(m2.at(0, 0) == 0.0);
  CHECK(m2.at(1, 0) == 1.0);
}

TEST_CASE("one_hot_encode passes numeric predictors through unchanged") {
  const auto t = make_table({num_col("a"), num_col("b"), num_col("s", Role::sensitive),
                             cat_col("y", {"neg", "pos"}, Role::outcome)},
                            {{1.25, -3.5, 0, 1}, {0.5, 2.75, 1, 0}});
  const auto m = one_hot_encode(t, {Role::sensitive, Role::outcome});
  REQUIRE(m.n_cols == 2);
  CHECK(m.at(0, 0) == 1.25);
  CHECK(m.at(0, 1) == -3.5);
  CHECK(m.at(1, 0) == 0.5);
  CHECK(m.at(1, 1) == 2.75);
}

TEST_CASE("one_hot_encode rejects masked cells") {
  auto t = make_table(mini_schema(), {{1, 0, 0, 1}});
  t.set_missing(1, 0);
  CHECK_THROWS(one_hot_encode(t, {Role::sensitive, Role::outcome}));
}

TEST_CASE("binarize_sensitive maps levels and thresholds") {
  auto schema = std::vector<ColumnSpec>{
      num_col("age", Role::sensitive), cat_col("sex", {"male", "female"}, Role::sensitive),
      cat_col("y", {"neg", "pos"}, Role::outcome)};
  const auto t = make_table(schema, {{19, 0, 1}, {40, 1, 0}, {25, 0, 1}});

  BinarizeRule by_age{"age", {}, 25.0};
  const auto ta = binarize_sensitive(t, by_age);
  CHECK(ta.cell(0, 0) == 0.0);  // 19 -> young
  CHECK(ta.cell(0, 1) == 1.0);  // 40 -> old
  CHECK(ta.cell(0, 2) == 0.0);  // threshold is exclusive
  CHECK(ta.spec(0).kind == ColumnKind::numeric);

  BinarizeRule by_sex{"sex", {{"male", 1}, {"female", 0}}, std::nullopt};
  const auto ts = binarize_sensitive(t, by_sex);
  CHECK(ts.cell(1, 0) == 1.0);
  CHECK(ts.cell(1, 1) == 0.0);

  // identity rule on an already-binary numeric column
  const auto tb = binarize_sensitive(ta, BinarizeRule{"age", {}, 0.5});
  for (std::size_t r = 0; r < 3; ++r) CHECK(tb.cell(0, r) == ta.cell(0, r));

  BinarizeRule incomplete{"sex", {{"male", 1}}, std::nullopt};
  CHECK_THROWS(binarize_sensitive(t, incomplete));
}

TEST_CASE("mask shape equals data shape and roles protect completeness") {
  auto t = make_table(mini_schema(), {{1, 0, 0, 1}, {2, 1, 1, 0}});
  for (std::size_t c = 0; c < t.n_cols(); ++c)
    CHECK(t.column_mask(c).size() == t.column(c).size());
  CHECK_THROWS(t.set_missing(2, 0));  // sensitive
  CHECK_THROWS(t.set_missing(3, 0));  // outcome
}
