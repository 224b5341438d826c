#include "logitbench/gprior.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "logitbench/error.hpp"
#include "logitbench/quadrature.hpp"

namespace logitbench {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

struct Tcch {
  double a, b, r, v, kappa;
};

// Truncated compound confluent hypergeometric presets with s = 0.
Tcch tcch_params(const MixtureDensity& d, int n, int k) {
  if (d.family == MixtureFamily::robust) return {1.0, 2.0, 1.5, (n + 1.0) / (k + 1.0), 1.0};
  return {1.0, 1.0, 1.5, (n + k + 1.0) / (k + 1.0), (n + k + 1.0) / n};
}

// log of the integral over (0, 1/v) of u^{a/2-1} (1-vu)^{b/2-1} {kappa + (1-kappa) v u}^{-r}
// for the a = 1 presets, after u = sin^2(theta) / v.
double tcch_log_norm(const Tcch& t) {
  const double half_b = t.b / 2.0 - 1.0;
  auto f = [&](double theta) {
    const double s = std::sin(theta), c = std::cos(theta);
    const double s2 = s * s;
    return 2.0 * std::pow(c, 2.0 * half_b + 1.0) * std::pow(t.kappa + (1.0 - t.kappa) * s2, -t.r);
  };
  const double z = integrate_adaptive(f, 0.0, M_PI / 2.0, 1e-12, 32).value;
  return std::log(z) - 0.5 * std::log(t.v);
}

}  // namespace

const char* to_string(GPriorKind kind) {
  switch (kind) {
    case GPriorKind::fixed_g: return "fixed_g";
    case GPriorKind::mixture_g: return "mixture_g";
    case GPriorKind::eb_local: return "eb_local";
    case GPriorKind::eb_global: return "eb_global";
    case GPriorKind::aic: return "aic";
    case GPriorKind::bic: return "bic";
  }
  return "unknown";
}

const char* to_string(MixtureFamily family) {
  switch (family) {
    case MixtureFamily::hyper_g: return "hyper_g";
    case MixtureFamily::hyper_g_over_n: return "hyper_g_over_n";
    case MixtureFamily::beta_prime: return "beta_prime";
    case MixtureFamily::cch: return "cch";
    case MixtureFamily::robust: return "robust";
    case MixtureFamily::intrinsic: return "intrinsic";
  }
  return "unknown";
}

GPriorSpec GPriorSpec::fixed(double g) {
  GPriorSpec s;
  s.kind = GPriorKind::fixed_g;
  s.g = g;
  return s;
}
GPriorSpec GPriorSpec::mixture_of(MixtureDensity density) {
  GPriorSpec s;
  s.kind = GPriorKind::mixture_g;
  s.mixture = density;
  return s;
}
GPriorSpec GPriorSpec::hyper_g(double a) { return mixture_of({MixtureFamily::hyper_g, a, 0.0, 0.0}); }
GPriorSpec GPriorSpec::hyper_g_over_n(double a) { return mixture_of({MixtureFamily::hyper_g_over_n, a, 0.0, 0.0}); }
GPriorSpec GPriorSpec::beta_prime() { return mixture_of({MixtureFamily::beta_prime, 0.5, 0.0, 0.0}); }
GPriorSpec GPriorSpec::cch(double a, double b, double s) { return mixture_of({MixtureFamily::cch, a, b, s}); }
GPriorSpec GPriorSpec::robust() { return mixture_of({MixtureFamily::robust, 1.0, 2.0, 0.0}); }
GPriorSpec GPriorSpec::intrinsic() { return mixture_of({MixtureFamily::intrinsic, 1.0, 1.0, 0.0}); }
GPriorSpec GPriorSpec::eb_local() {
  GPriorSpec s;
  s.kind = GPriorKind::eb_local;
  return s;
}
GPriorSpec GPriorSpec::eb_global() {
  GPriorSpec s;
  s.kind = GPriorKind::eb_global;
  return s;
}
GPriorSpec GPriorSpec::aic() {
  GPriorSpec s;
  s.kind = GPriorKind::aic;
  return s;
}
GPriorSpec GPriorSpec::bic() { return GPriorSpec{}; }

void GPriorSpec::validate() const {
  if (kind == GPriorKind::fixed_g && !(g > 0.0 && std::isfinite(g)))
    throw Error(ErrorCode::invalid_argument, "fixed g must be positive");
  if (kind != GPriorKind::mixture_g) return;
  switch (mixture.family) {
    case MixtureFamily::hyper_g:
    case MixtureFamily::hyper_g_over_n:
      if (!(mixture.a > 2.0)) throw Error(ErrorCode::invalid_argument, "hyper-g needs a > 2");
      break;
    case MixtureFamily::cch:
      if (!(mixture.a > 0.0 && mixture.b > 0.0))
        throw Error(ErrorCode::invalid_argument, "CCH needs positive a and b");
      break;
    default:
      break;
  }
}

std::string GPriorSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind == GPriorKind::fixed_g) os << "(g=" << g << ")";
  if (kind == GPriorKind::mixture_g) {
    os << "(" << to_string(mixture.family);
    if (mixture.family == MixtureFamily::cch) os << " " << mixture.a << "," << mixture.b << "," << mixture.s;
    if (mixture.family == MixtureFamily::hyper_g || mixture.family == MixtureFamily::hyper_g_over_n)
      os << " a=" << mixture.a;
    os << ")";
  }
  return os.str();
}

double mixture_u_max(const MixtureDensity& density, int n, int model_size) {
  if (density.family == MixtureFamily::robust || density.family == MixtureFamily::intrinsic)
    return 1.0 / tcch_params(density, n, model_size).v;
  return 1.0;
}

double mixture_log_density_u(const MixtureDensity& d, double u, int n, int k) {
  if (!(u > 0.0) || u > 1.0) return kNegInf;
  switch (d.family) {
    case MixtureFamily::hyper_g:
      return std::log((d.a - 2.0) / 2.0) + (d.a / 2.0 - 2.0) * std::log(u);
    case MixtureFamily::hyper_g_over_n: {
      // pi(g) = (a-2)/(2n) (1 + g/n)^{-a/2}; density of u is pi(g(u)) / u^2.
      const double g = (1.0 - u) / u;
      return std::log((d.a - 2.0) / (2.0 * n)) - (d.a / 2.0) * std::log1p(g / n) - 2.0 * std::log(u);
    }
    case MixtureFamily::beta_prime: {
      const double a = 0.5, b = n - k - 1.5;
      if (!(b > 0.0)) return kNegInf;
      return (a / 2.0 - 1.0) * std::log(u) + (b / 2.0 - 1.0) * std::log1p(-u) - log_beta_fn(a / 2.0, b / 2.0);
    }
    case MixtureFamily::cch: {
      double log_norm = log_beta_fn(d.a / 2.0, d.b / 2.0);
      if (d.s != 0.0)
        log_norm += std::log(boost::math::hypergeometric_1F1(d.a / 2.0, (d.a + d.b) / 2.0, -d.s / 2.0));
      return (d.a / 2.0 - 1.0) * std::log(u) + (d.b / 2.0 - 1.0) * std::log1p(-u) - d.s * u / 2.0 - log_norm;
    }
    case MixtureFamily::robust:
    case MixtureFamily::intrinsic: {
      const Tcch t = tcch_params(d, n, k);
      const double vu = t.v * u;
      if (vu >= 1.0) return kNegInf;
      double lp = (t.a / 2.0 - 1.0) * std::log(u) - t.r * std::log(t.kappa + (1.0 - t.kappa) * vu);
      if (t.b != 2.0) lp += (t.b / 2.0 - 1.0) * std::log1p(-vu);
      if (d.family == MixtureFamily::robust) return lp + std::log(0.5 * std::sqrt(t.v));
      thread_local std::map<std::pair<int, int>, double> cache;
      auto it = cache.find({n, k});
      if (it == cache.end()) it = cache.emplace(std::make_pair(n, k), tcch_log_norm(t)).first;
      return lp - it->second;
    }
  }
  return kNegInf;
}

double mixture_log_density_g(const MixtureDensity& density, double g, int n, int model_size) {
  if (!(g > 0.0)) return kNegInf;
  const double u = 1.0 / (1.0 + g);
  return mixture_log_density_u(density, u, n, model_size) + 2.0 * std::log(u);
}

}  // namespace logitbench
