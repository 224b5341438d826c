#include "logitbench/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "logitbench/error.hpp"

namespace logitbench {

LpResult solve_lp_origin_feasible(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                  int max_pivots, double eps) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) throw Error(ErrorCode::length_mismatch, "LP dimensions disagree");
  if ((b.array() < 0.0).any()) throw Error(ErrorCode::invalid_argument, "LP right-hand side must be nonnegative");
  if (max_pivots <= 0) max_pivots = static_cast<int>(50 * (m + n) + 1000);

  // Rows 0..m-1: constraints; row m: objective. Column n: right-hand side.
  Eigen::MatrixXd t(m + 1, n + 1);
  t.topLeftCorner(m, n) = a;
  t.topRightCorner(m, 1) = b;
  t.bottomLeftCorner(1, n) = -c.transpose();
  t(m, n) = 0.0;

  // Labels: structural variables 0..n-1, slacks n..n+m-1.
  std::vector<Eigen::Index> basic(static_cast<std::size_t>(m));
  std::vector<Eigen::Index> nonbasic(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < m; ++i) basic[static_cast<std::size_t>(i)] = n + i;
  for (Eigen::Index j = 0; j < n; ++j) nonbasic[static_cast<std::size_t>(j)] = j;

  LpResult result;
  for (;;) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (t(m, j) < -eps && (enter < 0 || nonbasic[static_cast<std::size_t>(j)] < nonbasic[static_cast<std::size_t>(enter)]))
        enter = j;
    if (enter < 0) {
      result.status = LpStatus::optimal;
      break;
    }
    if (result.pivots >= max_pivots) {
      result.status = LpStatus::iteration_limit;
      break;
    }
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double coef = t(i, enter);
      if (coef <= eps) continue;
      const double ratio = std::max(t(i, n), 0.0) / coef;
      const double tol = 1e-12 * std::max(1.0, std::abs(best));
      if (leave < 0 || ratio < best - tol) {
        best = ratio;
        leave = i;
      } else if (ratio <= best + tol && basic[static_cast<std::size_t>(i)] < basic[static_cast<std::size_t>(leave)]) {
        leave = i;
      }
    }
    if (leave < 0) {
      result.status = LpStatus::unbounded;
      break;
    }

    const double pivot = t(leave, enter);
    const Eigen::VectorXd pivot_col = t.col(enter);
    t.row(leave) /= pivot;
    t(leave, enter) = 1.0 / pivot;
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i == leave || pivot_col[i] == 0.0) continue;
      const double f = pivot_col[i];
      t.row(i) -= f * t.row(leave);
      t(i, enter) = -f / pivot;
    }
    std::swap(basic[static_cast<std::size_t>(leave)], nonbasic[static_cast<std::size_t>(enter)]);
    ++result.pivots;
  }

  result.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index label = basic[static_cast<std::size_t>(i)];
    if (label < n) result.x[label] = std::max(t(i, n), 0.0);
  }
  result.objective = t(m, n);
  return result;
}

}  // namespace logitbench
