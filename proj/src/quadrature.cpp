#include "logitbench/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

#include "logitbench/error.hpp"

namespace logitbench {

const GaussRule& gauss_legendre(int points) {
  if (points < 1) throw Error(ErrorCode::invalid_argument, "Gauss-Legendre rule needs at least one point");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(points);
  if (it != cache.end()) return it->second;

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int k = 1; k < points; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussRule rule;
  for (int k = 0; k < points; ++k) {
    rule.nodes.push_back(es.eigenvalues()[k]);
    const double v = es.eigenvectors()(0, k);
    rule.weights.push_back(2.0 * v * v);
  }
  return cache.emplace(points, std::move(rule)).first->second;
}

double integrate_panels(const std::function<double(double)>& f, double lo, double hi, int panels, int points) {
  const GaussRule& rule = gauss_legendre(points);
  const double width = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    const double half = width / 2.0, mid = a + half;
    double s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + half * rule.nodes[k]);
    total += half * s;
  }
  return total;
}

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                                  int points, int max_panels) {
  AdaptiveResult r;
  r.panels = 1;
  r.value = integrate_panels(f, lo, hi, 1, points);
  while (r.panels < max_panels) {
    const double next = integrate_panels(f, lo, hi, r.panels * 2, points);
    r.panels *= 2;
    const double change = std::abs(next - r.value);
    r.value = next;
    if (change <= rel_tol * std::abs(next) || next == 0.0) {
      r.converged = true;
      break;
    }
  }
  return r;
}

Maximum maximize_scalar(const std::function<double(double)>& f, double lo, double hi, int scan_points, double x_tol) {
  if (!(hi > lo) || scan_points < 3) throw Error(ErrorCode::invalid_argument, "bad scalar search interval");
  const double step = (hi - lo) / (scan_points - 1);
  int best = 0;
  double best_v = -INFINITY;
  std::vector<double> vals(scan_points);
  for (int i = 0; i < scan_points; ++i) {
    vals[i] = f(lo + i * step);
    if (vals[i] > best_v) {
      best_v = vals[i];
      best = i;
    }
  }
  if (!std::isfinite(best_v)) return {lo + best * step, best_v};

  double a = lo + std::max(best - 1, 0) * step;
  double b = lo + std::min(best + 1, scan_points - 1) * step;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  Maximum m{(a + b) / 2.0, 0.0};
  m.value = f(m.x);
  if (best_v > m.value) m = {lo + best * step, best_v};
  return m;
}

}  // namespace logitbench
