#include <catch_amalgamated.hpp>

#include <cmath>

#include "logitbench/error.hpp"
#include "logitbench/gprior.hpp"
#include "logitbench/quadrature.hpp"

using namespace logitbench;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Integral of a density over g in (0, inf) via g = g0 + e^t and composite
// Simpson in t; g0 is the lower end of the support found by bisection.
double total_mass(const MixtureDensity& d, int n, int k) {
  auto logf = [&](double g) { return mixture_log_density_g(d, g, n, k); };
  double g0 = 0.0;
  if (!std::isfinite(logf(1e-300))) {
    double lo = 0.0, hi = 1e6;
    REQUIRE(std::isfinite(logf(hi)));
    for (int i = 0; i < 300; ++i) {
      const double mid = 0.5 * (lo + hi);
      (std::isfinite(logf(mid)) ? hi : lo) = mid;
    }
    g0 = hi;
  }
  const double a = -80.0, b = 110.0;
  const int m = 400000;
  const double h = (b - a) / m;
  double s = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double t = a + i * h;
    const double lv = logf(g0 + std::exp(t));
    const double v = std::isfinite(lv) ? std::exp(lv + t) : 0.0;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * v;
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  const auto& r = gauss_legendre(64);
  REQUIRE(r.nodes.size() == 64);
  double wsum = 0;
  for (double w : r.weights) wsum += w;
  CHECK_THAT(wsum, WithinAbs(2.0, 1e-13));
  for (int deg : {2, 10, 40, 126}) {
    double s = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
    CHECK_THAT(s, WithinRel(2.0 / (deg + 1), 1e-11));
  }
  const auto res = integrate_adaptive([](double x) { return std::exp(-x * x); }, -6, 6);
  CHECK(res.converged);
  CHECK_THAT(res.value, WithinRel(std::sqrt(M_PI) * std::erf(6.0), 1e-12));
}

TEST_CASE("scalar maximizer finds interior and boundary maxima") {
  auto m = maximize_scalar([](double x) { return -(x - 1.234) * (x - 1.234); }, -10, 20);
  CHECK_THAT(m.x, WithinAbs(1.234, 1e-5));
  auto edge = maximize_scalar([](double x) { return -x; }, -10, 20);
  CHECK_THAT(edge.x, WithinAbs(-10, 1e-5));
  auto flat = maximize_scalar([](double) { return 1.0; }, -10, 20);
  CHECK_THAT(flat.x, WithinAbs(-10, 1e-5));
}

TEST_CASE("every mixing density integrates to one") {
  const std::vector<MixtureDensity> densities = {
      GPriorSpec::hyper_g().mixture,         GPriorSpec::hyper_g(4.0).mixture,
      GPriorSpec::hyper_g_over_n().mixture,  GPriorSpec::beta_prime().mixture,
      GPriorSpec::cch(1.0, 388.0, 0.0).mixture, GPriorSpec::cch(2.0, 5.0, 3.0).mixture,
      GPriorSpec::robust().mixture,          GPriorSpec::intrinsic().mixture,
  };
  for (const auto& d : densities)
    for (auto [n, k] : std::vector<std::pair<int, int>>{{40, 1}, {200, 3}, {388, 6}}) {
      INFO(to_string(d.family) << " n=" << n << " k=" << k);
      CHECK_THAT(total_mass(d, n, k), WithinAbs(1.0, 1e-6));
    }
}

TEST_CASE("densities match their closed forms in g") {
  const int n = 120, k = 3;
  for (double g : {0.01, 0.5, 3.0, 50.0, 1e4}) {
    CHECK_THAT(mixture_log_density_g(GPriorSpec::hyper_g(3.0).mixture, g, n, k),
               WithinAbs(std::log(0.5) - 1.5 * std::log1p(g), 1e-12));
    CHECK_THAT(mixture_log_density_g(GPriorSpec::hyper_g_over_n(3.0).mixture, g, n, k),
               WithinAbs(std::log(0.5 / n) - 1.5 * std::log1p(g / n), 1e-12));
    // CCH(a, b, 0) is a Beta(a/2, b/2) law on u = 1/(1+g).
    const double u = 1 / (1 + g);
    const double a = 1.0, b = n;
    const double beta_u = (a / 2 - 1) * std::log(u) + (b / 2 - 1) * std::log(1 - u) -
                          (std::lgamma(a / 2) + std::lgamma(b / 2) - std::lgamma((a + b) / 2));
    CHECK_THAT(mixture_log_density_u(GPriorSpec::cch(a, b, 0).mixture, u, n, k), WithinAbs(beta_u, 1e-9));
    const double v = (n + 1.0) / (k + 1.0);
    const double robust = mixture_log_density_g(GPriorSpec::robust().mixture, g, n, k);
    if (g > v - 1)
      CHECK_THAT(robust, WithinAbs(std::log(0.5 * std::sqrt(v)) - 1.5 * std::log1p(g), 1e-12));
    else
      CHECK(robust == -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("prior specification validation and description") {
  CHECK_THROWS_AS(GPriorSpec::fixed(0.0).validate(), Error);
  CHECK_THROWS_AS(GPriorSpec::fixed(-1.0).validate(), Error);
  CHECK_THROWS_AS(GPriorSpec::hyper_g(2.0).validate(), Error);
  CHECK_THROWS_AS(GPriorSpec::cch(0.0, 1.0, 0.0).validate(), Error);
  CHECK_NOTHROW(GPriorSpec::fixed(3.0).validate());
  CHECK(GPriorSpec::bic().kind == GPriorKind::bic);
  CHECK(GPriorSpec::fixed(3.0).describe() == "fixed_g(g=3)");
}
