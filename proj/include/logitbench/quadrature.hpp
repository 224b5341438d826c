#pragma once

#include <functional>
#include <vector>

namespace logitbench {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule from the eigen-decomposition of the Jacobi matrix.
const GaussRule& gauss_legendre(int points);

// Composite Gauss-Legendre over [lo, hi] with `panels` equal panels.
double integrate_panels(const std::function<double(double)>& f, double lo, double hi, int panels, int points = 64);

struct AdaptiveResult {
  double value = 0.0;
  int panels = 0;
  bool converged = false;
};

// Doubles the panel count until the relative change is below rel_tol.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi, double rel_tol = 1e-8,
                                  int points = 64, int max_panels = 1024);

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

// Coarse scan then golden-section refinement. Ties on the scan go to the smaller x.
Maximum maximize_scalar(const std::function<double(double)>& f, double lo, double hi, int scan_points = 31,
                        double x_tol = 1e-6);

}  // namespace logitbench
