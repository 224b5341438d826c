#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "logitbench/error.hpp"
#include "logitbench/selection.hpp"
#include "oracles.hpp"

using namespace logitbench;
using Catch::Matchers::WithinAbs;

namespace {

struct Problem {
  MatrixXd x;
  VectorXd y;
};

Problem make_problem(int n, const VectorXd& beta, std::uint64_t seed, double rho = 0.2) {
  std::mt19937_64 gen(seed);
  Problem pr;
  pr.x = oracle::gaussian_design(n, static_cast<int>(beta.size()) - 1, rho, gen);
  pr.y = oracle::bernoulli_outcome(pr.x, beta, gen);
  return pr;
}

VectorXd coefs(std::initializer_list<double> v) {
  VectorXd b(v.size());
  Index i = 0;
  for (double d : v) b[i++] = d;
  return b;
}

double oracle_criterion(const Problem& pr, const ModelId& m, double pen) {
  MatrixXd sub(pr.x.rows(), m.size());
  for (std::size_t j = 0; j < m.size(); ++j) sub.col(j) = pr.x.col(m[j]);
  const MatrixXd z = oracle::with_ones(sub);
  const double ll = oracle::loglik(oracle::damped_newton_mle(z, pr.y), z, pr.y);
  return -2 * ll + pen * (m.size() + 1.0);
}

}  // namespace

TEST_CASE("threshold one reproduces the full-model fit") {
  const auto pr = make_problem(200, coefs({0.1, 0.6, -0.2, 0.0}), 1);
  const auto r = pvalue_select(pr.x, pr.y, 1.0);
  const VectorXd mle = oracle::damped_newton_mle(oracle::with_ones(pr.x), pr.y);
  CHECK(r.selected == ModelId{0, 1, 2});
  CHECK((r.beta - mle).cwiseAbs().maxCoeff() < 1e-6);
  const FitResult full = fit_mle(pr.x, pr.y);
  for (Index j = 0; j < 3; ++j) CHECK_THAT(r.inclusion_score[j], WithinAbs(1 - full.pvalues[j + 1], 1e-12));
}

TEST_CASE("p-value selection refits the retained set once") {
  const auto pr = make_problem(300, coefs({0.0, 1.0, 0.0, 0.0, -0.8}), 2);
  const FitResult full = fit_mle(pr.x, pr.y);
  const auto r = pvalue_select(pr.x, pr.y, 0.05);
  ModelId keep;
  for (int j = 0; j < 4; ++j)
    if (full.pvalues[j + 1] < 0.05) keep.push_back(j);
  CHECK(r.selected == keep);
  for (int j = 0; j < 4; ++j) {
    const bool in = std::find(keep.begin(), keep.end(), j) != keep.end();
    CHECK((r.beta[j + 1] != 0.0) == in);
    if (!in) {
      CHECK(r.ci_lower[j + 1] == 0.0);
      CHECK(r.ci_upper[j + 1] == 0.0);
    } else {
      CHECK(r.ci_lower[j + 1] < r.beta[j + 1]);
      CHECK(r.beta[j + 1] < r.ci_upper[j + 1]);
    }
  }
}

TEST_CASE("separated data makes p-value selection fail") {
  MatrixXd x(6, 1);
  x << 1, 2, 3, 4, 5, 6;
  VectorXd y(6);
  y << 0, 0, 0, 1, 1, 1;
  CHECK_THROWS_AS(pvalue_select(x, y, 0.05), Error);
  StepwiseConfig back;
  CHECK_THROWS_AS(stepwise_select(x, y, back), Error);
}

TEST_CASE("separation with a wide margin is caught even when Newton meets its tolerance") {
  // Rows sit at least 1.5 from the cut, so the likelihood flattens out before
  // any coefficient reaches the divergence guard.
  std::mt19937_64 gen(31);
  std::normal_distribution<double> nd;
  MatrixXd x(40, 3);
  VectorXd y(40);
  for (int i = 0; i < 40; ++i) {
    const double side = i % 2 == 0 ? 1.0 : -1.0;
    x(i, 0) = side * (1.5 + std::abs(nd(gen)));
    x(i, 1) = nd(gen);
    x(i, 2) = nd(gen);
    y[i] = side > 0 ? 1 : 0;
  }
  const FitResult raw = fit_mle(x, y);
  REQUIRE(raw.converged);
  REQUIRE(raw.beta.cwiseAbs().maxCoeff() < 30);

  for (double threshold : {1.0, 0.05}) {
    try {
      pvalue_select(x, y, threshold);
      FAIL("expected separation to be reported");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::separation_suspected);
    }
  }
  for (auto dir : {StepDirection::backward, StepDirection::both})
    CHECK_THROWS_AS(stepwise_select(x, y, {dir, 2.0, 1000}), Error);

  // Forward never admits the separating column, whatever its likelihood gain.
  const auto fwd = stepwise_select(x, y, {StepDirection::forward, 2.0, 1000});
  CHECK_FALSE(std::binary_search(fwd.selected.begin(), fwd.selected.end(), 0));

  // Without the separating column the data are ordinary.
  const MatrixXd rest = x.rightCols(2);
  CHECK_NOTHROW(pvalue_select(rest, y, 0.05));
  CHECK_NOTHROW(stepwise_select(rest, y, {StepDirection::backward, 2.0, 1000}));
}

TEST_CASE("null predictor is usually dropped at 0.05") {
  int dropped = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pr = make_problem(500, coefs({0.0, 1.2, 0.0}), 100 + seed, 0.0);
    const auto r = pvalue_select(pr.x, pr.y, 0.05);
    dropped += std::find(r.selected.begin(), r.selected.end(), 1) == r.selected.end();
  }
  CHECK(dropped >= 45);
}

TEST_CASE("stepwise criterion path and exhaustive comparison") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto pr = make_problem(150, coefs({-0.2, 0.7, 0.0, 0.3, -0.4}), seed, 0.4);
    double best = std::numeric_limits<double>::infinity();
    for (int mask = 0; mask < 16; ++mask) {
      ModelId m;
      for (int j = 0; j < 4; ++j)
        if (mask >> j & 1) m.push_back(j);
      best = std::min(best, oracle_criterion(pr, m, 2.0));
    }
    for (auto dir : {StepDirection::forward, StepDirection::backward, StepDirection::both}) {
      const auto r = stepwise_select(pr.x, pr.y, {dir, 2.0, 1000});
      REQUIRE_FALSE(r.criterion_path.empty());
      for (std::size_t i = 1; i < r.criterion_path.size(); ++i) CHECK(r.criterion_path[i] < r.criterion_path[i - 1]);
      const double got = oracle_criterion(pr, r.selected, 2.0);
      CHECK_THAT(r.criterion_path.back(), WithinAbs(got, 1e-6));
      CHECK(got >= best - 1e-9);
      UNSCOPED_INFO("seed " << seed << " " << to_string(dir) << " greedy gap " << got - best);
      for (int j = 0; j < 4; ++j) {
        const bool in = std::find(r.selected.begin(), r.selected.end(), j) != r.selected.end();
        CHECK((r.beta[j + 1] != 0.0) == in);
        CHECK(r.inclusion_score[j] == (in ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("zero penalty backward keeps the full model") {
  const auto pr = make_problem(120, coefs({0.0, 0.1, 0.0, 0.2}), 21);
  const auto r = stepwise_select(pr.x, pr.y, {StepDirection::backward, 1e-12, 1000});
  CHECK(r.selected == ModelId{0, 1, 2});
}

TEST_CASE("pure noise with the chi-square penalty usually selects nothing") {
  // Forward search stays empty iff no single predictor beats the intercept-only
  // criterion; the oracle checks that per run. The expected empty rate with
  // five independent nulls is about 0.95^5 = 0.77, so 200 runs keep the 70%
  // bar well clear of sampling noise.
  int empty = 0;
  const int runs = 200;
  for (std::uint64_t seed = 0; seed < runs; ++seed) {
    const auto pr = make_problem(300, VectorXd::Zero(6), 500 + seed, 0.0);
    const auto r = stepwise_select(pr.x, pr.y, {StepDirection::forward, 3.841, 1000});
    const double base = oracle_criterion(pr, {}, 3.841);
    bool any_better = false;
    for (int j = 0; j < 5; ++j) any_better |= oracle_criterion(pr, {j}, 3.841) < base;
    CHECK(r.selected.empty() == !any_better);
    empty += r.selected.empty();
  }
  CHECK(empty >= 0.7 * runs);
}

TEST_CASE("forward and both agree on orthogonal designs") {
  // Replicated two-level factorial: columns are exactly orthogonal.
  const int p = 4, reps = 20;
  MatrixXd x((1 << p) * reps, p);
  for (int r = 0; r < reps; ++r)
    for (int row = 0; row < (1 << p); ++row)
      for (int j = 0; j < p; ++j) x(r * (1 << p) + row, j) = (row >> j & 1) ? 1.0 : -1.0;
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 10; ++trial) {
    const VectorXd y = oracle::bernoulli_outcome(x, coefs({0.0, 0.8, 0.0, 0.3, 0.0}), gen);
    const auto f = stepwise_select(x, y, {StepDirection::forward, 2.0, 1000});
    const auto b = stepwise_select(x, y, {StepDirection::both, 2.0, 1000});
    CHECK(f.selected == b.selected);
  }
}

TEST_CASE("max_steps bounds the number of moves") {
  const auto pr = make_problem(200, coefs({0.0, 1.0, 1.0, 1.0}), 30);
  const auto r = stepwise_select(pr.x, pr.y, {StepDirection::forward, 2.0, 1});
  CHECK(r.selected.size() == 1);
}
