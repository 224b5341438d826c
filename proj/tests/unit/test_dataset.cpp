#include <catch_amalgamated.hpp>

#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "logitbench/dataset.hpp"
#include "logitbench/error.hpp"

using namespace logitbench;

namespace {

RawTable parse(const std::string& csv, const std::string& outcome = "y", const LoadOptions& opts = {}) {
  std::istringstream in(csv);
  return parse_table(in, outcome, opts);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("four-row csv parses into two predictors") {
  const RawTable t = parse("x1,x2,y\n1,2,0\n3,4,1\n5,7,0\n2,2,1\n");
  CHECK(t.n() == 4);
  CHECK(t.p() == 2);
  CHECK(t.y == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("ingest errors") {
  CHECK(code_of([] { parse("x,y\n1,a\n2,b\n3,c\n"); }) == ErrorCode::outcome_not_binary);
  CHECK(code_of([] { parse("x,z\n1,0\n2,1\n"); }) == ErrorCode::outcome_column_missing);
  CHECK(code_of([] { load_dataset("/nonexistent/file.csv", "y"); }) == ErrorCode::missing_file);
  LoadOptions opts;
  opts.numeric = {"x"};
  CHECK(code_of([&] { parse("x,y\n1,0\nabc,1\n", "y", opts); }) == ErrorCode::non_numeric_cell);
}

TEST_CASE("outcome labels and missing cells") {
  const RawTable t = parse("x,y\n1,yes\nNA,no\n3,no\n4,yes\n5,no\n");
  CHECK(t.dropped_rows == 1);
  CHECK(t.n() == 4);
  CHECK(t.negative_label == "no");
  CHECK(t.positive_label == "yes");
  const RawTable numeric = parse("x,y\n1,2\n2,5\n3,2\n");
  CHECK(numeric.y == std::vector<int>{0, 1, 0});
}

TEST_CASE("bundled burn-like fixture has the burn data shape") {
  const RawTable t = load_dataset(std::string(LOGITBENCH_DATA_DIR) + "/burn_like.csv", "death");
  CHECK(t.n() == 388);
  CHECK(t.p() == 6);
}

TEST_CASE("three-level factor gets two dummies against the most frequent level") {
  std::string csv = "f,z,y\n";
  const char* levels[] = {"a", "a", "a", "a", "a", "b", "b", "b", "c", "c"};
  for (int i = 0; i < 10; ++i) csv += std::string(levels[i]) + "," + std::to_string(i * 0.37) + "," + (i % 2 ? "1" : "0") + "\n";
  const Dataset d = process_predictors(parse(csv));
  REQUIRE(d.p() == 3);
  int dummies = 0;
  for (const auto& c : d.columns())
    if (c.dummy) {
      ++dummies;
      CHECK(c.reference == "a");
      CHECK(c.level != "a");
    }
  CHECK(dummies == 2);
}

TEST_CASE("reference ties break by level name") {
  const Dataset d = process_predictors(parse("f,x,y\nq,1,0\np,2,1\nq,3,0\np,4,1\nr,5,0\n"));
  for (const auto& c : d.columns())
    if (c.dummy) CHECK(c.reference == "p");
}

TEST_CASE("constant and single-level columns are dropped") {
  const Dataset d = process_predictors(parse("c,f,x,y\n5,u,1,0\n5,u,2,1\n5,u,4,0\n5,u,3,1\n"));
  CHECK(d.p() == 1);
  CHECK(d.dropped_columns().size() == 2);
  CHECK_THROWS_AS(process_predictors(parse("c,y\n5,0\n5,1\n5,0\n5,1\n")), Error);
}

TEST_CASE("standardized moments match direct recomputation") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd(10, 4);
  std::string csv = "a,b,y\n";
  for (int i = 0; i < 57; ++i) csv += std::to_string(nd(gen)) + "," + std::to_string(nd(gen) * 1e3) + "," + std::to_string(i % 3 == 0) + "\n";
  const Dataset d = process_predictors(parse(csv));
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    const Eigen::VectorXd c = d.x().col(j);
    double mean = 0;
    for (double v : c) mean += v;
    mean /= c.size();
    double ss = 0;
    for (double v : c) ss += (v - mean) * (v - mean);
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(ss / (c.size() - 1) - 1.0) < 1e-9);
  }
}

TEST_CASE("processing is idempotent and dummy groups sum to at most one") {
  std::string csv = "g,x,h,y\n";
  const char* g[] = {"r", "s", "t"};
  const char* h[] = {"u", "v"};
  for (int i = 0; i < 30; ++i)
    csv += std::string(g[(i * 7) % 3]) + "," + std::to_string(i * i % 11) + "," + h[i % 2] + "," + std::to_string(i % 4 == 0) + "\n";
  const Dataset d = process_predictors(parse(csv));
  const Dataset again = process_predictors(to_raw(d));
  REQUIRE(again.p() == d.p());
  CHECK((again.x() - d.x()).cwiseAbs().maxCoeff() < 1e-12);
  std::map<std::string, Eigen::VectorXd> sums;
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    const auto& c = d.columns()[j];
    if (!c.dummy) continue;
    if (!sums.count(c.source)) sums[c.source] = Eigen::VectorXd::Zero(d.n());
    sums[c.source] += d.x().col(j);
    for (double v : d.x().col(j)) CHECK((v == 0.0 || v == 1.0));
  }
  for (const auto& [src, s] : sums) CHECK(s.maxCoeff() <= 1.0);
}

TEST_CASE("folds: balanced stratification, determinism, partition") {
  Eigen::VectorXd y(10);
  y << 0, 1, 0, 1, 0, 1, 0, 1, 0, 1;
  const auto folds = make_folds(y, 5, 11);
  for (int k = 0; k < 5; ++k) {
    const auto test = fold_test_indices(folds, k);
    REQUIRE(test.size() == 2);
    CHECK(y[test[0]] + y[test[1]] == 1.0);
  }
  CHECK(make_folds(y, 5, 11) == folds);
  std::set<Eigen::Index> seen;
  for (int k = 0; k < 5; ++k)
    for (auto i : fold_test_indices(folds, k)) CHECK(seen.insert(i).second);
  CHECK(seen.size() == 10);
}

TEST_CASE("fold sizes over many seeds stay within one of n/k") {
  Eigen::VectorXd y(103);
  for (int i = 0; i < 103; ++i) y[i] = (i * 37 % 103) < 29 ? 1 : 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto folds = make_folds(y, 5, seed);
    std::vector<int> sizes(5, 0);
    for (int f : folds) ++sizes[f];
    for (int s : sizes) REQUIRE((s == 20 || s == 21));
  }
}

TEST_CASE("fold preconditions") {
  Eigen::VectorXd y(9);
  y << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  CHECK_THROWS_AS(make_folds(y, 5, 1), Error);
  Eigen::VectorXd rare(12);
  rare << 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0;
  CHECK(code_of([&] { make_folds(rare, 5, 1, true); }) == ErrorCode::stratification_infeasible);
  CHECK(make_folds(rare, 5, 1, false).size() == 12);
}
