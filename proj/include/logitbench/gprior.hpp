#pragma once

#include <string>

namespace logitbench {

enum class GPriorKind { fixed_g, mixture_g, eb_local, eb_global, aic, bic };

enum class MixtureFamily { hyper_g, hyper_g_over_n, beta_prime, cch, robust, intrinsic };

const char* to_string(GPriorKind kind);
const char* to_string(MixtureFamily family);

struct MixtureDensity {
  MixtureFamily family = MixtureFamily::hyper_g;
  double a = 3.0;  // hyper-g / hyper-g/n shape, or CCH a
  double b = 2.0;  // CCH b
  double s = 0.0;  // CCH s
};

struct GPriorSpec {
  GPriorKind kind = GPriorKind::bic;
  double g = 1.0;  // fixed_g only
  MixtureDensity mixture;

  static GPriorSpec fixed(double g);
  static GPriorSpec mixture_of(MixtureDensity density);
  static GPriorSpec hyper_g(double a = 3.0);
  static GPriorSpec hyper_g_over_n(double a = 3.0);
  static GPriorSpec beta_prime();
  static GPriorSpec cch(double a, double b, double s);
  static GPriorSpec robust();
  static GPriorSpec intrinsic();
  static GPriorSpec eb_local();
  static GPriorSpec eb_global();
  static GPriorSpec aic();
  static GPriorSpec bic();

  void validate() const;
  std::string describe() const;
};

// Mixing densities are expressed in u = 1/(1+g), which maps (0, inf) onto (0, 1).
// Truncated families live on (0, u_max]; everything else has u_max = 1.
double mixture_u_max(const MixtureDensity& density, int n, int model_size);

// Normalized log density of u for a model with `model_size` slopes fitted to n rows.
double mixture_log_density_u(const MixtureDensity& density, double u, int n, int model_size);

// The same density expressed in g (includes the Jacobian u^2).
double mixture_log_density_g(const MixtureDensity& density, double g, int n, int model_size);

}  // namespace logitbench
