#include <catch_amalgamated.hpp>

#include <random>

#include "logitbench/dgp.hpp"
#include "logitbench/error.hpp"
#include "oracles.hpp"

using namespace logitbench;
using Catch::Matchers::WithinAbs;

namespace {

VectorXd coefs(std::initializer_list<double> v) {
  VectorXd b(v.size());
  Index i = 0;
  for (double d : v) b[i++] = d;
  return b;
}

double max_abs_logit(const VectorXd& pi) {
  double m = 0;
  for (double p : pi) m = std::max(m, std::abs(std::log(p / (1 - p))));
  return m;
}

}  // namespace

TEST_CASE("screening below 30 predictors is the identity") {
  std::mt19937_64 gen(1);
  const MatrixXd x = oracle::gaussian_design(100, 11, 0.1, gen);
  const VectorXd y = oracle::bernoulli_outcome(x, VectorXd::Zero(12), gen);
  const ModelId s = screen_variables(x, y);
  REQUIRE(s.size() == 11);
  for (int j = 0; j < 11; ++j) CHECK(s[j] == j);
}

TEST_CASE("screening wide designs keeps exactly 30 including a planted predictor") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 gen(seed);
    MatrixXd x = oracle::gaussian_design(150, 100, 0.0, gen);
    const VectorXd y = oracle::bernoulli_outcome(x, VectorXd::Zero(101), gen);
    // Plant a column whose correlation with y is about 0.9.
    std::normal_distribution<double> nd;
    const int planted = 37;
    for (int i = 0; i < 150; ++i) x(i, planted) = 1.8 * (y[i] - 0.5) + 0.45 * nd(gen);
    const VectorXd yc = y.array() - y.mean();
    const VectorXd xc = x.col(planted).array() - x.col(planted).mean();
    CHECK(xc.dot(yc) / std::sqrt(xc.squaredNorm() * yc.squaredNorm()) > 0.85);
    const ModelId s = screen_variables(x, y);
    CHECK(s.size() == 30);
    CHECK(std::find(s.begin(), s.end(), planted) != s.end());
    CHECK(std::is_sorted(s.begin(), s.end()));
  }
}

TEST_CASE("strong two-predictor design is recovered") {
  std::mt19937_64 gen(2);
  const MatrixXd x = oracle::gaussian_design(400, 6, 0.2, gen);
  const VectorXd y = oracle::bernoulli_outcome(x, coefs({-0.3, 1.5, 0, 0, -1.2, 0, 0}), gen);
  const GeneratingModel gm = fit_generating_model(x, y, screen_variables(x, y));
  CHECK(gm.route == "backward");
  CHECK(std::find(gm.selected.begin(), gm.selected.end(), 0) != gm.selected.end());
  CHECK(std::find(gm.selected.begin(), gm.selected.end(), 3) != gm.selected.end());
  CHECK(gm.pseudo_r2 > 0.1);
  CHECK(gm.pseudo_r2 < 1.0);
  CHECK_FALSE(gm.separation_handled);
  for (int j = 0; j < 6; ++j)
    if (std::find(gm.selected.begin(), gm.selected.end(), j) == gm.selected.end()) CHECK(gm.beta[j + 1] == 0.0);
  // Coefficients are the ML refit of the selected set.
  MatrixXd sub(400, gm.selected.size());
  for (std::size_t k = 0; k < gm.selected.size(); ++k) sub.col(k) = x.col(gm.selected[k]);
  const VectorXd ref = oracle::damped_newton_mle(oracle::with_ones(sub), y);
  CHECK(std::abs(gm.beta[0] - ref[0]) < 1e-6);
  for (std::size_t k = 0; k < gm.selected.size(); ++k) CHECK(std::abs(gm.beta[gm.selected[k] + 1] - ref[k + 1]) < 1e-6);
  for (double p : gm.pi) CHECK((p > 0 && p < 1));
}

TEST_CASE("separated data is stabilized by ridge") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  MatrixXd x(60, 2);
  VectorXd y(60);
  for (int i = 0; i < 60; ++i) {
    x(i, 0) = nd(gen);
    x(i, 1) = nd(gen);
    y[i] = x(i, 0) > 0.1 ? 1 : 0;
  }
  const GeneratingModel gm = fit_generating_model(x, y, {0, 1});
  CHECK(gm.separation_handled);
  CHECK(gm.ridge_lambda > 0);
  CHECK(gm.beta.cwiseAbs().maxCoeff() <= 10.0);
  CHECK(std::find(gm.selected.begin(), gm.selected.end(), 0) != gm.selected.end());
  CHECK(max_abs_logit(gm.pi) <= 10.0 + 1e-9);
}

TEST_CASE("no surviving predictor raises EmptyModelSelected") {
  std::mt19937_64 gen(4);
  const MatrixXd x = oracle::gaussian_design(300, 3, 0.0, gen);
  int empties = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const VectorXd y = oracle::bernoulli_outcome(x, VectorXd::Zero(4), gen);
    try {
      fit_generating_model(x, y, {0, 1, 2});
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::empty_model_selected);
      ++empties;
    }
  }
  CHECK(empties > 0);
}

TEST_CASE("linear predictor clipping") {
  MatrixXd x(3, 1);
  x << 15, -15, 2;
  const VectorXd p = clipped_probs(coefs({0, 1}), x);
  CHECK_THAT(p[0], WithinAbs(1 / (1 + std::exp(-10.0)), 1e-15));
  CHECK_THAT(p[0], WithinAbs(0.9999546, 1e-7));
  CHECK_THAT(p[1], WithinAbs(1 / (1 + std::exp(10.0)), 1e-15));
  CHECK_THAT(p[2], WithinAbs(1 / (1 + std::exp(-2.0)), 1e-15));
  const GeneratingModel gm = synthetic_model(x, coefs({0.5, 3}));
  CHECK(max_abs_logit(gm.pi) <= 10.0 + 1e-9);
  CHECK(gm.selected == ModelId{0});
}

TEST_CASE("outcome simulation") {
  MatrixXd x(4, 1);
  x << 15, 0.3, -0.4, 1;
  const GeneratingModel gm = synthetic_model(x, coefs({0, 1}));
  const auto reps = simulate_outcomes(gm, 100, 9);
  REQUIRE(reps.size() == 100);
  for (const auto& r : reps) CHECK(r.size() == 4);
  CHECK(simulate_outcomes(gm, 100, 9) == reps);
  CHECK(simulate_replicate(gm, 17, 9) == reps[17]);
  CHECK_FALSE(simulate_outcomes(gm, 100, 10) == reps);
  CHECK_THROWS_AS(simulate_outcomes(gm, 0, 9), Error);

  const int m = 100000;
  const auto many = simulate_outcomes(gm, m, 11);
  for (Index i = 0; i < 4; ++i) {
    double s = 0;
    for (const auto& r : many) s += r[i];
    const double pi = gm.pi[i];
    CHECK(std::abs(s / m - pi) <= 3 * std::sqrt(pi * (1 - pi) / m) + 1e-12);
  }
}

TEST_CASE("generating model survives a JSON round trip") {
  std::mt19937_64 gen(5);
  const MatrixXd x = oracle::gaussian_design(200, 4, 0.2, gen);
  const VectorXd y = oracle::bernoulli_outcome(x, coefs({0.2, 1, 0, -1, 0}), gen);
  GeneratingModel gm = fit_generating_model(x, y, {0, 1, 2, 3});
  gm.names = {"a", "b", "c", "d"};
  const GeneratingModel back = generating_model_from_json(to_json(gm));
  CHECK(back.selected == gm.selected);
  CHECK(back.beta == gm.beta);
  CHECK(back.pi == gm.pi);
  CHECK(back.pseudo_r2 == gm.pseudo_r2);
  CHECK(back.route == gm.route);
  CHECK(back.names == gm.names);
  CHECK_THROWS_AS(generating_model_from_json("{not json"), Error);
}
