#pragma once

#include <Eigen/Dense>

namespace logitbench {

enum class LpStatus { optimal, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::iteration_limit;
  double objective = 0.0;
  Eigen::VectorXd x;
  int pivots = 0;
};

// maximize c'x subject to A x <= b, x >= 0, with b >= 0 so the origin is
// feasible. Condensed-tableau primal simplex with Bland's rule; the tableau
// is (rows + 1) x (cols + 1), so tall systems stay cheap.
LpResult solve_lp_origin_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                  int max_pivots = 0, double eps = 1e-11);

}  // namespace logitbench
