#include "logitbench/glm.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>

#include "logitbench/deadline.hpp"
#include "logitbench/error.hpp"

namespace logitbench {
namespace {

constexpr double kProbFloor = std::numeric_limits<double>::min();
constexpr double kProbCeil = 1.0 - 0x1.0p-53;

double sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

void check_dims(const VectorRef& beta, const MatrixRef& design, const VectorRef& y) {
  if (beta.size() != design.cols() || design.rows() != y.size())
    throw Error(ErrorCode::length_mismatch, "coefficient, design and outcome dimensions disagree");
}

void require_full_rank(const MatrixRef& design) {
  if (design.rows() < design.cols())
    throw Error(ErrorCode::singular_information, "fewer observations than coefficients");
  Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols())
    throw Error(ErrorCode::singular_information, "design matrix is rank deficient");
}

double initial_intercept(const VectorRef& y) {
  const double ybar = y.mean();
  if (ybar <= 0.0 || ybar >= 1.0) return 0.0;
  return std::log(ybar / (1.0 - ybar));
}

void fill_wald(FitResult& fit, const MatrixXd& info) {
  Eigen::LDLT<MatrixXd> ldlt(info);
  fit.covariance = ldlt.solve(MatrixXd::Identity(info.rows(), info.cols()));
  fit.se = fit.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.pvalues.resize(fit.beta.size());
  for (Index j = 0; j < fit.beta.size(); ++j)
    fit.pvalues[j] = fit.se[j] > 0 ? wald_pvalue(fit.beta[j] / fit.se[j]) : 1.0;
}

MatrixXd weighted_gram(const MatrixRef& design, const VectorXd& w) {
  MatrixXd sx = design.array().colwise() * w.array().sqrt();
  MatrixXd g = MatrixXd::Zero(design.cols(), design.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(sx.transpose());
  return g.selfadjointView<Eigen::Lower>();
}

}  // namespace

double log1pexp(double eta) {
  if (eta > 0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

double logistic(double eta) { return std::clamp(sigmoid(eta), kProbFloor, kProbCeil); }

MatrixXd add_intercept(const MatrixRef& x) {
  MatrixXd d(x.rows(), x.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(x.cols()) = x;
  return d;
}

VectorXd linear_predictor(const VectorRef& beta, const MatrixRef& x) {
  if (beta.size() == x.cols() + 1) {
    VectorXd eta = x * beta.tail(x.cols());
    eta.array() += beta[0];
    return eta;
  }
  if (beta.size() != x.cols()) throw Error(ErrorCode::length_mismatch, "coefficient length does not match design");
  return x * beta;
}

VectorXd predict_probs(const VectorRef& beta, const MatrixRef& x) {
  VectorXd eta = linear_predictor(beta, x);
  return eta.unaryExpr([](double e) { return logistic(e); });
}

double loglik(const VectorRef& beta, const MatrixRef& design, const VectorRef& y) {
  check_dims(beta, design, y);
  const VectorXd eta = design * beta;
  double v = 0.0;
  for (Index i = 0; i < eta.size(); ++i) v += y[i] * eta[i] - log1pexp(eta[i]);
  return v;
}

LogLik loglik_grad_hess(const VectorRef& beta, const MatrixRef& design, const VectorRef& y) {
  check_dims(beta, design, y);
  const VectorXd eta = design * beta;
  VectorXd pi(eta.size()), w(eta.size());
  LogLik out;
  for (Index i = 0; i < eta.size(); ++i) {
    out.value += y[i] * eta[i] - log1pexp(eta[i]);
    pi[i] = sigmoid(eta[i]);
    w[i] = pi[i] * (1.0 - pi[i]);
  }
  out.gradient = design.transpose() * (y - pi);
  out.hessian = -weighted_gram(design, w);
  return out;
}

VectorXd FitResult::ci_lower(double level) const {
  const double z = normal_quantile(0.5 + level / 2.0);
  return beta - z * se;
}

VectorXd FitResult::ci_upper(double level) const {
  const double z = normal_quantile(0.5 + level / 2.0);
  return beta + z * se;
}

FitResult fit_mle(const MatrixRef& x, const VectorRef& y, bool include_intercept, const MleOptions& options) {
  const MatrixXd design = include_intercept ? add_intercept(x) : MatrixXd(x);
  if (design.rows() != y.size()) throw Error(ErrorCode::length_mismatch, "design rows and outcome length differ");
  require_full_rank(design);

  FitResult fit;
  fit.intercept = include_intercept;
  fit.beta = VectorXd::Zero(design.cols());
  if (include_intercept) fit.beta[0] = initial_intercept(y);

  LogLik cur = loglik_grad_hess(fit.beta, design, y);
  for (int iter = 0;; ++iter) {
    check_deadline();
    fit.iterations = iter;
    if (cur.gradient.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    if (iter >= options.max_iterations) break;
    const MatrixXd info = -cur.hessian;
    Eigen::LDLT<MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14))
      throw Error(ErrorCode::separation_suspected, "information matrix collapsed during Newton iterations");
    const VectorXd step = ldlt.solve(cur.gradient);

    double t = 1.0;
    VectorXd trial = fit.beta + step;
    double trial_ll = loglik(trial, design, y);
    int halvings = 0;
    const double slack = 1e-12 * (1.0 + std::abs(cur.value));
    while (!(trial_ll >= cur.value - slack) && halvings < options.max_halvings) {
      t *= 0.5;
      trial = fit.beta + t * step;
      trial_ll = loglik(trial, design, y);
      ++halvings;
    }
    if (!(trial_ll >= cur.value - slack)) break;
    fit.beta = trial;
    if (fit.beta.cwiseAbs().maxCoeff() > options.divergence_bound || !fit.beta.allFinite())
      throw Error(ErrorCode::separation_suspected, "coefficient magnitude exceeded divergence bound");
    cur = loglik_grad_hess(fit.beta, design, y);
  }
  fit.loglik = cur.value;
  fit.penalized_loglik = cur.value;
  fill_wald(fit, -cur.hessian);
  return fit;
}

namespace {

struct FirthState {
  double loglik = 0.0;
  double objective = -std::numeric_limits<double>::infinity();
  VectorXd score;
  MatrixXd info;
};

FirthState firth_state(const VectorXd& beta, const MatrixXd& design, const VectorRef& y, bool with_score) {
  FirthState s;
  const VectorXd eta = design * beta;
  VectorXd pi(eta.size()), w(eta.size());
  for (Index i = 0; i < eta.size(); ++i) {
    s.loglik += y[i] * eta[i] - log1pexp(eta[i]);
    pi[i] = sigmoid(eta[i]);
    w[i] = pi[i] * (1.0 - pi[i]);
  }
  s.info = weighted_gram(design, w);
  Eigen::LDLT<MatrixXd> ldlt(s.info);
  if (ldlt.info() != Eigen::Success) return s;
  const VectorXd d = ldlt.vectorD();
  if ((d.array() <= 0.0).any()) return s;
  s.objective = s.loglik + 0.5 * d.array().log().sum();
  if (with_score) {
    const MatrixXd m = ldlt.solve(design.transpose());  // d x n
    VectorXd adj(eta.size());
    for (Index i = 0; i < eta.size(); ++i) {
      const double h = w[i] * design.row(i).dot(m.col(i));
      adj[i] = y[i] - pi[i] + h * (0.5 - pi[i]);
    }
    s.score = design.transpose() * adj;
  }
  return s;
}

// Newton direction on the penalized objective, with its Hessian taken by
// central differences of the analytic modified score. The Fisher-scoring
// direction ignores the penalty's curvature, which dominates under separation
// and makes that iteration crawl. Empty when the Hessian is not negative definite.
VectorXd firth_newton_step(const VectorXd& beta, const MatrixXd& design, const VectorRef& y, const VectorXd& score) {
  const Index d = beta.size();
  MatrixXd jac(d, d);
  for (Index j = 0; j < d; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(beta[j]));
    VectorXd up = beta, dn = beta;
    up[j] += h;
    dn[j] -= h;
    const FirthState a = firth_state(up, design, y, true), b = firth_state(dn, design, y, true);
    if (a.score.size() == 0 || b.score.size() == 0) return {};
    jac.col(j) = (a.score - b.score) / (2.0 * h);
  }
  const MatrixXd neg = -0.5 * (jac + jac.transpose());
  Eigen::LDLT<MatrixXd> ldlt(neg);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all() || !(ldlt.rcond() > 1e-12)) return {};
  VectorXd step = ldlt.solve(score);
  if (!step.allFinite()) return {};
  return step;
}

}  // namespace

FitResult fit_firth(const MatrixRef& x, const VectorRef& y, bool include_intercept, const FirthOptions& options) {
  const MatrixXd design = include_intercept ? add_intercept(x) : MatrixXd(x);
  if (design.rows() != y.size()) throw Error(ErrorCode::length_mismatch, "design rows and outcome length differ");
  if (design.rows() < 2) throw Error(ErrorCode::invalid_argument, "Firth fit needs at least two observations");
  require_full_rank(design);

  FitResult fit;
  fit.intercept = include_intercept;
  fit.beta = VectorXd::Zero(design.cols());
  if (include_intercept) fit.beta[0] = initial_intercept(y);

  FirthState cur = firth_state(fit.beta, design, y, true);
  for (int iter = 0;; ++iter) {
    check_deadline();
    fit.iterations = iter;
    if (cur.score.size() == 0) throw Error(ErrorCode::singular_information, "penalized information not positive definite");
    if (cur.score.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    if (iter >= options.max_iterations)
      throw Error(ErrorCode::no_convergence, "Firth iterations did not converge");
    VectorXd step = firth_newton_step(fit.beta, design, y, cur.score);
    if (step.size() == 0) step = cur.info.ldlt().solve(cur.score);
    const double biggest = step.lpNorm<Eigen::Infinity>();
    if (biggest > options.max_step) step *= options.max_step / biggest;

    double t = 1.0;
    FirthState trial = firth_state(fit.beta + step, design, y, false);
    int halvings = 0;
    const double slack = 1e-12 * (1.0 + std::abs(cur.objective));
    while (!(trial.objective >= cur.objective - slack) && halvings < options.max_halvings) {
      t *= 0.5;
      trial = firth_state(fit.beta + t * step, design, y, false);
      ++halvings;
    }
    if (!(trial.objective >= cur.objective - slack)) {
      // No ascent left at floating-point resolution.
      if (step.lpNorm<Eigen::Infinity>() < 1e-9) {
        fit.converged = true;
        break;
      }
      throw Error(ErrorCode::no_convergence, "Firth step halving exhausted");
    }
    fit.beta += t * step;
    cur = firth_state(fit.beta, design, y, true);
  }
  fit.loglik = cur.loglik;
  fit.penalized_loglik = cur.objective;
  fill_wald(fit, cur.info);
  return fit;
}

double wald_pvalue(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

double null_loglik(const VectorRef& y) {
  const double n = static_cast<double>(y.size());
  const double ybar = y.mean();
  if (ybar <= 0.0 || ybar >= 1.0) return 0.0;
  return n * (ybar * std::log(ybar) + (1.0 - ybar) * std::log1p(-ybar));
}

double mcfadden_r2(double model_loglik, const VectorRef& y) {
  const double l0 = null_loglik(y);
  if (l0 == 0.0) return 0.0;
  return 1.0 - model_loglik / l0;
}

}  // namespace logitbench
