#pragma once

#include <Eigen/Dense>

namespace logitbench {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

// log(1 + exp(eta)) without overflow.
double log1pexp(double eta);
// Logistic transform clamped to the open interval (0, 1).
double logistic(double eta);

MatrixXd add_intercept(const MatrixRef& x);

// eta = beta[0] + x * beta[1..] when beta.size() == x.cols() + 1, else x * beta.
VectorXd linear_predictor(const VectorRef& beta, const MatrixRef& x);

VectorXd predict_probs(const VectorRef& beta, const MatrixRef& x);

struct LogLik {
  double value = 0.0;
  VectorXd gradient;
  MatrixXd hessian;
};

// Bernoulli log-likelihood of a design that already carries any intercept column.
double loglik(const VectorRef& beta, const MatrixRef& design, const VectorRef& y);
LogLik loglik_grad_hess(const VectorRef& beta, const MatrixRef& design, const VectorRef& y);

struct FitResult {
  VectorXd beta;  // intercept first when fitted with one
  VectorXd se;
  VectorXd pvalues;
  MatrixXd covariance;
  double loglik = 0.0;
  double penalized_loglik = 0.0;  // Firth objective; equals loglik for ML fits
  bool converged = false;
  int iterations = 0;
  bool intercept = true;

  VectorXd ci_lower(double level = 0.95) const;
  VectorXd ci_upper(double level = 0.95) const;
};

struct MleOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 100;
  int max_halvings = 20;
  double divergence_bound = 30.0;
};

// Newton/IRLS maximum likelihood. Throws SingularInformation for a
// rank-deficient information matrix and SeparationSuspected once any
// coefficient exceeds the divergence bound. Hitting the iteration cap
// returns converged == false.
FitResult fit_mle(const MatrixRef& x, const VectorRef& y, bool include_intercept = true,
                  const MleOptions& options = {});

struct FirthOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 200;
  int max_halvings = 20;
  double max_step = 5.0;
};

// Jeffreys-prior penalized likelihood (Firth). Finite under separation.
FitResult fit_firth(const MatrixRef& x, const VectorRef& y, bool include_intercept = true,
                    const FirthOptions& options = {});

// Wald two-sided p-value for a z statistic.
double wald_pvalue(double z);
// Standard normal quantile.
double normal_quantile(double p);

// McFadden pseudo R^2 against the intercept-only model.
double mcfadden_r2(double model_loglik, const VectorRef& y);
double null_loglik(const VectorRef& y);

}  // namespace logitbench
