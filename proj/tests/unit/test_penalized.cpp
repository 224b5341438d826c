#include <catch_amalgamated.hpp>

#include <random>

#include "logitbench/error.hpp"
#include "logitbench/penalized.hpp"
#include "oracles.hpp"

using namespace logitbench;

namespace {

struct Problem {
  MatrixXd x;
  VectorXd y;
};

Problem make_problem(int n, int p, std::uint64_t seed, const VectorXd& beta) {
  std::mt19937_64 gen(seed);
  Problem pr;
  pr.x = oracle::gaussian_design(n, p, 0.3, gen);
  pr.y = oracle::bernoulli_outcome(pr.x, beta, gen);
  return pr;
}

VectorXd coefs(std::initializer_list<double> v) {
  VectorXd b(v.size());
  Index i = 0;
  for (double d : v) b[i++] = d;
  return b;
}

}  // namespace

TEST_CASE("lambda grid construction") {
  const auto pr = make_problem(80, 4, 1, coefs({0, 1, -1, 0, 0}));
  const auto grid = lambda_path(pr.x, pr.y, PenaltySpec::lasso(), 100);
  REQUIRE(grid.size() == 100);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);
  CHECK_THAT(grid.back() / grid.front(), Catch::Matchers::WithinRel(1e-4, 1e-10));

  const auto wide = make_problem(10, 20, 2, VectorXd::Zero(21));
  const auto g2 = lambda_path(wide.x, wide.y, PenaltySpec::lasso(), 50);
  CHECK_THAT(g2.back() / g2.front(), Catch::Matchers::WithinRel(1e-2, 1e-10));
  CHECK_THROWS_AS(lambda_path(pr.x, pr.y, PenaltySpec::lasso(), 1), Error);

  const double top = (pr.x.transpose() * (pr.y.array() - pr.y.mean()).matrix()).cwiseAbs().maxCoeff() / 80.0;
  CHECK_THAT(lambda_max(pr.x, pr.y, PenaltySpec::lasso()), Catch::Matchers::WithinRel(top, 1e-12));
}

TEST_CASE("lasso at lambda_max has no active slopes and satisfies KKT") {
  const auto pr = make_problem(90, 5, 3, coefs({0.3, 1, -0.5, 0, 0, 0.2}));
  const double lmax = lambda_max(pr.x, pr.y, PenaltySpec::lasso());
  const auto fit = fit_penalized(pr.x, pr.y, PenaltySpec::lasso(), lmax);
  for (Index j = 1; j < fit.beta.size(); ++j) CHECK(std::abs(fit.beta[j]) < 1e-12);
  const VectorXd pi = (1.0 + (-(fit.beta[0] + (pr.x * fit.beta.tail(5)).array())).exp()).inverse().matrix();
  const VectorXd grad = pr.x.transpose() * (pr.y - pi) / 90.0;
  CHECK(grad.cwiseAbs().maxCoeff() <= lmax + 1e-7);
  const auto huge = fit_penalized(pr.x, pr.y, PenaltySpec::lasso(), 100 * lmax);
  CHECK(huge.beta.tail(5).isZero(0.0));
}

TEST_CASE("lasso KKT conditions at interior lambdas") {
  const auto pr = make_problem(120, 6, 4, coefs({-0.2, 1.2, -0.8, 0.4, 0, 0, 0}));
  const double lmax = lambda_max(pr.x, pr.y, PenaltySpec::lasso());
  for (double frac : {0.5, 0.2, 0.05, 0.01}) {
    const double lambda = frac * lmax;
    const auto fit = fit_penalized(pr.x, pr.y, PenaltySpec::lasso(), lambda);
    const MatrixXd z = oracle::with_ones(pr.x);
    const VectorXd g = oracle::score(fit.beta, z, pr.y) / 120.0;
    CHECK(std::abs(g[0]) < 1e-5);
    for (Index j = 1; j < fit.beta.size(); ++j) {
      if (fit.beta[j] != 0.0)
        CHECK(std::abs(g[j] - lambda * (fit.beta[j] > 0 ? 1 : -1)) < 1e-5);
      else
        CHECK(std::abs(g[j]) <= lambda + 1e-5);
    }
  }
}

TEST_CASE("zero penalty reproduces the MLE") {
  const auto pr = make_problem(60, 2, 5, coefs({0.5, 1, -1}));
  bool ok = false;
  const VectorXd ref = oracle::damped_newton_mle(oracle::with_ones(pr.x), pr.y, &ok);
  REQUIRE(ok);
  for (auto spec : {PenaltySpec::lasso(), PenaltySpec::ridge(), PenaltySpec::elastic_net()}) {
    const auto fit = fit_penalized(pr.x, pr.y, spec, 0.0);
    CHECK((fit.beta - ref).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("ridge matches a regularized Newton solver") {
  const auto pr = make_problem(40, 3, 6, coefs({0.1, 0.9, -0.6, 0.3}));
  for (double lambda : {0.01, 0.1, 1.0}) {
    const VectorXd ref = oracle::ridge_newton(pr.x, pr.y, lambda);
    PenalizedOptions tight;
    tight.tolerance = 1e-10;
    const auto fit = fit_penalized(pr.x, pr.y, PenaltySpec::ridge(), lambda, nullptr, tight);
    CHECK((fit.beta - ref).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("objective trace is non-increasing for convex families") {
  const auto pr = make_problem(100, 8, 7, coefs({0, 1, 1, -1, 0.5, 0, 0, 0, -0.5}));
  const double lmax = lambda_max(pr.x, pr.y, PenaltySpec::lasso());
  for (auto spec : {PenaltySpec::lasso(), PenaltySpec::ridge(), PenaltySpec::elastic_net()}) {
    const auto fit = fit_penalized(pr.x, pr.y, spec, 0.03 * lmax);
    REQUIRE(fit.objective_trace.size() >= 1);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
      CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-10);
    CHECK_THAT(fit.objective, Catch::Matchers::WithinAbs(penalized_objective(spec, 0.03 * lmax, fit.beta, pr.x, pr.y), 1e-12));
  }
}

TEST_CASE("MCP and SCAD approach the lasso as gamma grows") {
  const auto pr = make_problem(80, 4, 8, coefs({0.2, 1, -0.7, 0, 0.3}));
  const double lambda = 0.05;
  PenalizedOptions tight;
  tight.tolerance = 1e-10;
  const auto lasso = fit_penalized(pr.x, pr.y, PenaltySpec::lasso(), lambda, nullptr, tight);
  const auto mcp = fit_penalized(pr.x, pr.y, PenaltySpec::mcp(1e6), lambda, nullptr, tight);
  const auto scad = fit_penalized(pr.x, pr.y, PenaltySpec::scad(1e6), lambda, nullptr, tight);
  CHECK((mcp.beta - lasso.beta).cwiseAbs().maxCoeff() < 1e-3);
  CHECK((scad.beta - lasso.beta).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("univariate thresholding rules minimize their one-dimensional problems") {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd(0, 1.5);
  for (auto spec : {PenaltySpec::lasso(), PenaltySpec::ridge(), PenaltySpec::elastic_net(0.3), PenaltySpec::mcp(),
                    PenaltySpec::scad()}) {
    for (int trial = 0; trial < 40; ++trial) {
      const double u = nd(gen), v = 0.2 + std::abs(nd(gen)), lambda = 0.3;
      const double b = penalized_univariate(spec, lambda, v, u);
      auto f = [&](double t) { return 0.5 * v * (t - u) * (t - u) + penalty_term(spec, lambda, t); };
      const double ref = oracle::grid_golden_max([&](double t) { return -f(t); }, -8, 8, 8001);
      CHECK(f(b) <= f(ref) + 1e-9);
    }
  }
}

TEST_CASE("penalty specification validation") {
  CHECK_THROWS_AS(PenaltySpec::mcp(1.0).validate(), Error);
  CHECK_THROWS_AS(PenaltySpec::scad(2.0).validate(), Error);
  CHECK_THROWS_AS((PenaltySpec{PenaltyFamily::elastic_net, 1.5, 0.0}.validate()), Error);
  CHECK_NOTHROW(PenaltySpec::mcp().validate());
  const auto pr = make_problem(30, 2, 1, coefs({0, 1, 0}));
  CHECK_THROWS_AS(fit_penalized(pr.x, pr.y, PenaltySpec::lasso(), -1.0), Error);
}

TEST_CASE("warm-started path moves continuously") {
  const auto pr = make_problem(150, 5, 10, coefs({0, 0.8, -0.6, 0.4, 0, 0}));
  const auto grid = lambda_path(pr.x, pr.y, PenaltySpec::lasso(), 100);
  const auto path = fit_path(pr.x, pr.y, PenaltySpec::lasso(), grid, false);
  REQUIRE(path.coefs.cols() == 100);
  CHECK(path.coefs.col(0).tail(5).isZero(0.0));
  for (Index l = 1; l < path.coefs.cols(); ++l)
    CHECK((path.coefs.col(l) - path.coefs.col(l - 1)).cwiseAbs().maxCoeff() < 0.25);
}

TEST_CASE("cross-validated tuning") {
  const auto pr = make_problem(150, 4, 11, coefs({0, 1, -1, 0, 0}));
  const auto a = cv_select_lambda(pr.x, pr.y, PenaltySpec::lasso(), 42);
  const auto b = cv_select_lambda(pr.x, pr.y, PenaltySpec::lasso(), 42);
  CHECK(a.selected_lambda == b.selected_lambda);
  CHECK(a.coefs == b.coefs);
  CHECK(a.cv_deviance.size() == a.lambdas.size());
  CHECK(a.coefs.cols() == static_cast<Index>(a.lambdas.size()));
  CHECK(a.selected_lambda == a.lambdas[a.selected_index]);
  const auto best = std::min_element(a.cv_deviance.begin(), a.cv_deviance.end()) - a.cv_deviance.begin();
  CHECK(a.selected_index == best);
  CHECK(a.folds_used >= 5);
}

TEST_CASE("pure noise designs select small models") {
  int sparse = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pr = make_problem(200, 5, 1000 + seed, VectorXd::Zero(6));
    const auto r = cv_select_lambda(pr.x, pr.y, PenaltySpec::lasso(), seed);
    const VectorXd b = r.coefs.col(r.selected_index);
    int active = 0;
    for (Index j = 1; j < b.size(); ++j) active += b[j] != 0.0;
    sparse += active <= 1;
  }
  CHECK(sparse >= 40);
}

TEST_CASE("paths survive complete separation") {
  std::mt19937_64 gen(12);
  MatrixXd x = oracle::gaussian_design(40, 20, 0.0, gen);
  VectorXd y(40);
  for (int i = 0; i < 40; ++i) y[i] = 2 * x(i, 0) - 2 * x(i, 1) + x(i, 2) > 0 ? 1 : 0;
  REQUIRE(oracle::brute_separation(x.leftCols(3), y).complete);

  const auto grid = lambda_path(x, y, PenaltySpec::lasso(), 100);
  const auto path = fit_path(x, y, PenaltySpec::lasso(), grid, false);
  REQUIRE(path.coefs.cols() >= 1);
  CHECK(path.coefs.allFinite());
  CHECK(path.lambdas.size() == static_cast<std::size_t>(path.coefs.cols()));
  for (std::size_t k = 0; k < path.lambdas.size(); ++k) CHECK(path.lambdas[k] == grid[k]);
  // Columns that were computed are ordinary fits at their lambda.
  const Index mid = path.coefs.cols() / 2;
  PenalizedOptions tight;
  tight.tolerance = 1e-10;
  const auto direct = fit_penalized(x, y, PenaltySpec::lasso(), path.lambdas[mid], nullptr, tight);
  CHECK((direct.beta - path.coefs.col(mid)).cwiseAbs().maxCoeff() < 1e-3);

  for (auto spec : {PenaltySpec::lasso(), PenaltySpec::elastic_net(), PenaltySpec::mcp(), PenaltySpec::scad()}) {
    const auto cv = cv_select_lambda(x, y, spec, 3);
    CHECK(cv.folds_used == 10);
    CHECK(cv.coefs.col(cv.selected_index).allFinite());
  }
}
