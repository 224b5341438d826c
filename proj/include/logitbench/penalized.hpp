#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logitbench/glm.hpp"

namespace logitbench {

enum class PenaltyFamily { ridge, elastic_net, lasso, mcp, scad };

const char* to_string(PenaltyFamily family);

struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::lasso;
  double alpha = 1.0;  // elastic-net mixing: 1 lasso, 0 ridge
  double gamma = 0.0;  // concavity for MCP / SCAD

  static PenaltySpec ridge() { return {PenaltyFamily::ridge, 0.0, 0.0}; }
  static PenaltySpec elastic_net(double alpha = 0.5) { return {PenaltyFamily::elastic_net, alpha, 0.0}; }
  static PenaltySpec lasso() { return {PenaltyFamily::lasso, 1.0, 0.0}; }
  static PenaltySpec mcp(double gamma = 3.0) { return {PenaltyFamily::mcp, 1.0, gamma}; }
  static PenaltySpec scad(double gamma = 3.7) { return {PenaltyFamily::scad, 1.0, gamma}; }

  bool sparse() const { return family != PenaltyFamily::ridge; }
  void validate() const;
};

// Penalty contribution of one slope at strength lambda (already multiplied by lambda).
double penalty_term(const PenaltySpec& spec, double lambda, double b);

// Minimizer of (v/2)(b - u)^2 + penalty_term(b); exact for every family.
double penalized_univariate(const PenaltySpec& spec, double lambda, double v, double u);

// -loglik/n + sum_j penalty_term(beta_j); the intercept is never penalized.
double penalized_objective(const PenaltySpec& spec, double lambda, const VectorRef& beta, const MatrixRef& x,
                           const VectorRef& y);

struct PenalizedOptions {
  double tolerance = 1e-7;  // max coefficient change
  int max_sweeps = 10000;
  int max_outer = 200;
  double weight_floor = 1e-5;
};

struct PenalizedFit {
  VectorXd beta;  // intercept first
  double objective = 0.0;
  int sweeps = 0;
  int outer_iterations = 0;
  std::vector<double> objective_trace;  // after each accepted quadratic-approximation update
};

// Outer IRLS quadratic approximation, inner cyclic coordinate descent with an
// active set, and a backtracking line search on the true objective.
PenalizedFit fit_penalized(const MatrixRef& x, const VectorRef& y, const PenaltySpec& spec, double lambda,
                           const VectorXd* warm_start = nullptr, const PenalizedOptions& options = {});

double lambda_max(const MatrixRef& x, const VectorRef& y, const PenaltySpec& spec);

// Log-linear grid from lambda_max down to lambda_max * (1e-4 if n > p else 1e-2).
std::vector<double> lambda_path(const MatrixRef& x, const VectorRef& y, const PenaltySpec& spec, int length = 100);

struct PathResult {
  std::vector<double> lambdas;  // descending
  MatrixXd coefs;               // (p + 1) x lambdas.size()
  double selected_lambda = 0.0;
  Index selected_index = 0;
  std::vector<double> cv_deviance;  // mean held-out binomial deviance per lambda
  int folds_used = 0;
};

// Warm-started fits along a grid. With stop_on_saturation the path ends once
// the deviance falls below 0.1% of the null deviance.
PathResult fit_path(const MatrixRef& x, const VectorRef& y, const PenaltySpec& spec, const std::vector<double>& lambdas,
                    bool stop_on_saturation = true, const PenalizedOptions& options = {});

struct CvOptions {
  int folds = 10;
  int path_length = 100;
  PenalizedOptions solver;
};

// k-fold tuning with the lambda-min rule, then the full-data fit at the chosen lambda.
PathResult cv_select_lambda(const MatrixRef& x, const VectorRef& y, const PenaltySpec& spec, std::uint64_t seed,
                            const CvOptions& options = {});

double binomial_deviance(const VectorRef& probs, const VectorRef& y);

}  // namespace logitbench
