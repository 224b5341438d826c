#include "logitbench/separation.hpp"

#include <cmath>

#include "logitbench/error.hpp"
#include "logitbench/lp.hpp"

namespace logitbench {

const char* to_string(SeparationKind kind) {
  switch (kind) {
    case SeparationKind::none: return "none";
    case SeparationKind::quasi_complete: return "quasi-complete";
    case SeparationKind::complete: return "complete";
    case SeparationKind::indeterminate: return "indeterminate";
  }
  return "";
}

SeparationReport detect_separation(const MatrixRef& x, const VectorRef& y) {
  if (x.rows() != y.size()) throw Error(ErrorCode::length_mismatch, "design rows and outcome length differ");
  const Index n = x.rows();
  const Index d = x.cols() + 1;
  const double cases = y.sum();
  if (cases <= 0.0 || cases >= static_cast<double>(n))
    throw Error(ErrorCode::invalid_argument, "separation check needs both outcome classes");

  // Signed rows a_i = (2y_i - 1) [1, x_i].
  MatrixXd signed_rows = add_intercept(x);
  for (Index i = 0; i < n; ++i)
    if (y[i] < 0.5) signed_rows.row(i) *= -1.0;

  // Variables (b+, b-), b = b+ - b-, 0 <= b+-, b+- <= 1.
  const Index m = n + 2 * d;
  MatrixXd a = MatrixXd::Zero(m, 2 * d);
  a.topLeftCorner(n, d) = -signed_rows;
  a.topRightCorner(n, d) = signed_rows;
  a.bottomRows(2 * d) = MatrixXd::Identity(2 * d, 2 * d);
  VectorXd rhs = VectorXd::Zero(m);
  rhs.tail(2 * d).setOnes();
  const VectorXd colsum = signed_rows.colwise().sum().transpose();
  VectorXd c(2 * d);
  c << colsum, -colsum;

  SeparationReport report;
  const LpResult total = solve_lp_origin_feasible(a, rhs, c);
  if (total.status != LpStatus::optimal) {
    report.kind = SeparationKind::indeterminate;
    return report;
  }
  if (!(total.objective > kSeparationTolerance)) return report;

  report.separated = true;
  report.kind = SeparationKind::quasi_complete;
  report.certificate = total.x.head(d) - total.x.tail(d);

  // maximize t subject to t <= a_i'b, t <= 1.
  MatrixXd a2 = MatrixXd::Zero(m + 1, 2 * d + 1);
  a2.topLeftCorner(m, 2 * d) = a;
  a2.block(0, 2 * d, n, 1).setOnes();
  a2(m, 2 * d) = 1.0;
  VectorXd rhs2(m + 1);
  rhs2 << rhs, 1.0;
  VectorXd c2 = VectorXd::Zero(2 * d + 1);
  c2[2 * d] = 1.0;
  const LpResult margin = solve_lp_origin_feasible(a2, rhs2, c2);
  if (margin.status == LpStatus::optimal && margin.objective > kSeparationTolerance) {
    report.kind = SeparationKind::complete;
    report.certificate = margin.x.head(d) - margin.x.segment(d, d);
  }
  return report;
}

bool unstable_coefficients(const VectorRef& beta, double threshold) {
  for (Index j = 0; j < beta.size(); ++j)
    if (!std::isfinite(beta[j]) || std::abs(beta[j]) > threshold) return true;
  return false;
}

}  // namespace logitbench
