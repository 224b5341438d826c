#include "logitbench/penalized.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "logitbench/dataset.hpp"
#include "logitbench/deadline.hpp"
#include "logitbench/error.hpp"

namespace logitbench {
namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// (v/2)(b - a)^2 + penalty on b >= 0, used to compare candidates.
double univariate_value(const PenaltySpec& spec, double lambda, double v, double a, double b) {
  return 0.5 * v * (b - a) * (b - a) + penalty_term(spec, lambda, b);
}

double clamp_to(double b, double lo, double hi) { return std::min(std::max(b, lo), hi); }

double sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

}  // namespace

const char* to_string(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::ridge: return "ridge";
    case PenaltyFamily::elastic_net: return "elastic_net";
    case PenaltyFamily::lasso: return "lasso";
    case PenaltyFamily::mcp: return "mcp";
    case PenaltyFamily::scad: return "scad";
  }
  return "";
}

void PenaltySpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::invalid_argument, "alpha must lie in [0, 1]");
  if (family == PenaltyFamily::mcp && !(gamma > 1.0))
    throw Error(ErrorCode::invalid_argument, "MCP needs gamma > 1");
  if (family == PenaltyFamily::scad && !(gamma > 2.0))
    throw Error(ErrorCode::invalid_argument, "SCAD needs gamma > 2");
}

double penalty_term(const PenaltySpec& spec, double lambda, double b) {
  const double a = std::abs(b);
  switch (spec.family) {
    case PenaltyFamily::ridge:
    case PenaltyFamily::elastic_net:
    case PenaltyFamily::lasso:
      return lambda * (spec.alpha * a + 0.5 * (1.0 - spec.alpha) * b * b);
    case PenaltyFamily::mcp: {
      const double g = spec.gamma;
      if (a <= g * lambda) return lambda * a - a * a / (2.0 * g);
      return 0.5 * g * lambda * lambda;
    }
    case PenaltyFamily::scad: {
      const double g = spec.gamma;
      if (a <= lambda) return lambda * a;
      if (a <= g * lambda) return (2.0 * g * lambda * a - a * a - lambda * lambda) / (2.0 * (g - 1.0));
      return 0.5 * lambda * lambda * (g + 1.0);
    }
  }
  return 0.0;
}

double penalized_univariate(const PenaltySpec& spec, double lambda, double v, double u) {
  switch (spec.family) {
    case PenaltyFamily::ridge:
    case PenaltyFamily::elastic_net:
    case PenaltyFamily::lasso:
      return soft_threshold(v * u, lambda * spec.alpha) / (v + lambda * (1.0 - spec.alpha));
    case PenaltyFamily::mcp:
    case PenaltyFamily::scad:
      break;
  }
  // Concave penalties: minimize piecewise quadratics region by region and keep
  // the best candidate, which stays exact when v * gamma <= 1.
  const double s = u < 0 ? -1.0 : 1.0;
  const double a = std::abs(u);
  const double g = spec.gamma;
  const double knee = g * lambda;
  std::array<double, 6> cand{};
  int count = 0;
  cand[count++] = 0.0;
  cand[count++] = knee;
  cand[count++] = std::max(a, knee);
  if (spec.family == PenaltyFamily::mcp) {
    const double curv = v - 1.0 / g;
    if (curv > 0) cand[count++] = clamp_to((v * a - lambda) / curv, 0.0, knee);
  } else {
    cand[count++] = lambda;
    cand[count++] = clamp_to((v * a - lambda) / v, 0.0, lambda);
    const double curv = v - 1.0 / (g - 1.0);
    if (curv > 0) cand[count++] = clamp_to((v * a - knee / (g - 1.0)) / curv, lambda, knee);
  }
  double best_b = 0.0;
  double best_f = univariate_value(spec, lambda, v, a, 0.0);
  for (int k = 1; k < count; ++k) {
    const double f = univariate_value(spec, lambda, v, a, cand[k]);
    if (f < best_f - 1e-15 * std::max(1.0, std::abs(best_f)) || (f <= best_f && cand[k] < best_b)) {
      best_f = f;
      best_b = cand[k];
    }
  }
  return s * best_b;
}

double penalized_objective(const PenaltySpec& spec, double lambda, const VectorRef& beta, const MatrixRef& x,
                           const VectorRef& y) {
  const VectorXd eta = linear_predictor(beta, x);
  double nll = 0.0;
  for (Index i = 0; i < eta.size(); ++i) nll += log1pexp(eta[i]) - y[i] * eta[i];
  double pen = 0.0;
  for (Index j = 1; j < beta.size(); ++j) pen += penalty_term(spec, lambda, beta[j]);
  return nll / static_cast<double>(x.rows()) + pen;
}

PenalizedFit fit_penalized(const MatrixRef& x, const VectorRef& y, const PenaltySpec& spec, double lambda,
                           const VectorXd* warm_start, const PenalizedOptions& options) {
  spec.validate();
  if (!(lambda >= 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be nonnegative");
  if (x.rows() != y.size()) throw Error(ErrorCode::length_mismatch, "design rows and outcome length differ");
  const Index n = x.rows();
  const Index p = x.cols();
  const double dn = static_cast<double>(n);

  PenalizedFit fit;
  if (warm_start) {
    if (warm_start->size() != p + 1) throw Error(ErrorCode::length_mismatch, "warm start has wrong length");
    fit.beta = *warm_start;
  } else {
    fit.beta = VectorXd::Zero(p + 1);
    const double ybar = y.mean();
    if (ybar > 0.0 && ybar < 1.0) fit.beta[0] = std::log(ybar / (1.0 - ybar));
  }
  double current = penalized_objective(spec, lambda, fit.beta, x, y);
  fit.objective_trace.push_back(current);

  VectorXd w(n), r(n), v(p);
  std::vector<char> active(static_cast<std::size_t>(p), 0);
  for (Index j = 0; j < p; ++j) active[static_cast<std::size_t>(j)] = fit.beta[j + 1] != 0.0;

  for (int outer = 0; outer < options.max_outer; ++outer) {
    check_deadline();
    const VectorXd eta = linear_predictor(fit.beta, x);
    for (Index i = 0; i < n; ++i) {
      const double pi = sigmoid(eta[i]);
      w[i] = std::max(pi * (1.0 - pi), options.weight_floor);
      r[i] = y[i] - pi;  // = w * (z - eta)
    }
    const double wsum = w.sum();
    for (Index j = 0; j < p; ++j) v[j] = x.col(j).cwiseAbs2().dot(w) / dn;

    VectorXd next = fit.beta;
    auto sweep = [&](bool all) {
      double change = 0.0;
      const double d0 = r.sum() / wsum;
      if (d0 != 0.0) {
        next[0] += d0;
        r -= w * d0;
        change = std::abs(d0);
      }
      for (Index j = 0; j < p; ++j) {
        if (!all && !active[static_cast<std::size_t>(j)]) continue;
        if (v[j] <= 0.0) continue;
        const double old = next[j + 1];
        const double z = x.col(j).dot(r) / dn + v[j] * old;
        const double b = penalized_univariate(spec, lambda, v[j], z / v[j]);
        if (b != old) {
          r.noalias() -= (b - old) * x.col(j).cwiseProduct(w);
          next[j + 1] = b;
          change = std::max(change, std::abs(b - old));
        }
        if (b != 0.0) active[static_cast<std::size_t>(j)] = 1;
      }
      if (++fit.sweeps > options.max_sweeps)
        throw Error(ErrorCode::no_convergence, "coordinate descent exceeded the sweep budget");
      return change;
    };
    for (;;) {
      if (sweep(true) < options.tolerance) break;
      while (sweep(false) >= options.tolerance) {
      }
    }

    const VectorXd step = next - fit.beta;
    double t = 1.0;
    VectorXd trial = next;
    double value = penalized_objective(spec, lambda, trial, x, y);
    const double slack = 1e-13 * std::max(1.0, std::abs(current));
    int halvings = 0;
    while (!(value <= current + slack) && halvings < 30) {
      t *= 0.5;
      trial = fit.beta + t * step;
      value = penalized_objective(spec, lambda, trial, x, y);
      ++halvings;
    }
    fit.outer_iterations = outer + 1;
    if (!(value <= current + slack)) break;
    const double moved = (t * step).lpNorm<Eigen::Infinity>();
    fit.beta = trial;
    current = std::min(value, current);
    fit.objective_trace.push_back(current);
    if (moved < options.tolerance) break;
  }
  fit.objective = current;
  return fit;
}

double lambda_max(const MatrixRef& x, const VectorRef& y, const PenaltySpec& spec) {
  const double ybar = y.mean();
  const VectorXd centered = y.array() - ybar;
  const double top = (x.transpose() * centered).cwiseAbs().maxCoeff();
  const double alpha = spec.family == PenaltyFamily::mcp || spec.family == PenaltyFamily::scad ? 1.0 : spec.alpha;
  return top / (static_cast<double>(x.rows()) * std::max(alpha, 1e-3));
}

std::vector<double> lambda_path(const MatrixRef& x, const VectorRef& y, const PenaltySpec& spec, int length) {
  if (length < 2) throw Error(ErrorCode::invalid_argument, "path needs at least two grid points");
  const double top = lambda_max(x, y, spec);
  const double ratio = x.rows() > x.cols() ? 1e-4 : 1e-2;
  std::vector<double> grid(static_cast<std::size_t>(length));
  const double step = std::log(ratio) / static_cast<double>(length - 1);
  for (int k = 0; k < length; ++k) grid[static_cast<std::size_t>(k)] = top * std::exp(step * k);
  grid.back() = top * ratio;
  return grid;
}

double binomial_deviance(const VectorRef& probs, const VectorRef& y) {
  double dev = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    const double p = std::clamp(probs[i], 1e-5, 1.0 - 1e-5);
    dev -= 2.0 * (y[i] * std::log(p) + (1.0 - y[i]) * std::log1p(-p));
  }
  return dev;
}

PathResult fit_path(const MatrixRef& x, const VectorRef& y, const PenaltySpec& spec, const std::vector<double>& lambdas,
                    bool stop_on_saturation, const PenalizedOptions& options) {
  PathResult path;
  const double null_dev = -2.0 * null_loglik(y);
  std::vector<VectorXd> coefs;
  VectorXd warm;
  for (double lambda : lambdas) {
    PenalizedFit fit;
    try {
      fit = fit_penalized(x, y, spec, lambda, coefs.empty() ? nullptr : &warm, options);
    } catch (const Error& e) {
      // Keep the solutions for the larger lambdas, as glmnet does.
      if (e.code() != ErrorCode::no_convergence || coefs.empty()) throw;
      break;
    }
    warm = fit.beta;
    coefs.push_back(fit.beta);
    path.lambdas.push_back(lambda);
    if (stop_on_saturation) {
      const double dev = -2.0 * loglik(fit.beta, add_intercept(x), y);
      if (null_dev > 0.0 && dev < 1e-3 * null_dev) break;
    }
  }
  path.coefs.resize(x.cols() + 1, static_cast<Index>(coefs.size()));
  for (std::size_t k = 0; k < coefs.size(); ++k) path.coefs.col(static_cast<Index>(k)) = coefs[k];
  return path;
}

PathResult cv_select_lambda(const MatrixRef& x, const VectorRef& y, const PenaltySpec& spec, std::uint64_t seed,
                            const CvOptions& options) {
  if (options.folds < 2) throw Error(ErrorCode::invalid_argument, "tuning needs at least two folds");
  spec.validate();
  const auto grid = lambda_path(x, y, spec, options.path_length);
  PathResult result = fit_path(x, y, spec, grid, true, options.solver);
  const std::size_t length = result.lambdas.size();

  const std::vector<int> folds = make_folds(y, options.folds, seed, false);
  std::vector<double> dev_sum(length, 0.0);
  double held_out = 0.0;
  int succeeded = 0;
  for (int f = 0; f < options.folds; ++f) {
    const auto train = fold_train_indices(folds, f);
    const auto test = fold_test_indices(folds, f);
    MatrixXd xtr(static_cast<Index>(train.size()), x.cols()), xte(static_cast<Index>(test.size()), x.cols());
    VectorXd ytr(static_cast<Index>(train.size())), yte(static_cast<Index>(test.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
      xtr.row(static_cast<Index>(i)) = x.row(train[i]);
      ytr[static_cast<Index>(i)] = y[train[i]];
    }
    for (std::size_t i = 0; i < test.size(); ++i) {
      xte.row(static_cast<Index>(i)) = x.row(test[i]);
      yte[static_cast<Index>(i)] = y[test[i]];
    }
    std::vector<double> fold_dev(length);
    try {
      // A fold path that stops early is extended with its last solution.
      const PathResult fp = fit_path(xtr, ytr, spec, result.lambdas, true, options.solver);
      for (std::size_t k = 0; k < length; ++k) {
        const Index col = std::min(static_cast<Index>(k), fp.coefs.cols() - 1);
        fold_dev[k] = binomial_deviance(predict_probs(fp.coefs.col(col), xte), yte);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::timeout) throw;
      continue;
    }
    for (std::size_t k = 0; k < length; ++k) dev_sum[k] += fold_dev[k];
    held_out += static_cast<double>(test.size());
    ++succeeded;
  }
  if (2 * succeeded < options.folds)
    throw Error(ErrorCode::no_convergence, "fewer than half of the tuning folds produced a path");

  result.folds_used = succeeded;
  result.cv_deviance.resize(length);
  std::size_t best = 0;
  for (std::size_t k = 0; k < length; ++k) {
    result.cv_deviance[k] = dev_sum[k] / held_out;
    if (result.cv_deviance[k] < result.cv_deviance[best]) best = k;
  }
  result.selected_index = static_cast<Index>(best);
  result.selected_lambda = result.lambdas[best];
  return result;
}

}  // namespace logitbench
