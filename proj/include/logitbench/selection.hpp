#pragma once

#include <vector>

#include "logitbench/glm.hpp"
#include "logitbench/model.hpp"

namespace logitbench {

enum class StepDirection { forward, backward, both };

const char* to_string(StepDirection direction);

struct StepwiseConfig {
  StepDirection direction = StepDirection::backward;
  double penalty_per_param = 2.0;  // 2 is AIC; 3.8415 matches a chi-square(1) test at 0.05
  int max_steps = 1000;
};

struct SelectionResult {
  ModelId selected;
  FitResult fit;            // refit of the selected model
  VectorXd beta;            // p + 1, zeros for excluded slopes
  VectorXd ci_lower;        // Wald 95%; excluded slopes get [0, 0]
  VectorXd ci_upper;
  VectorXd inclusion_score; // length p
  std::vector<double> criterion_path;  // stepwise only: criterion after each accepted move
};

// Fit the full model, keep slopes with Wald p < threshold, refit once.
// threshold >= 1 keeps everything. Inclusion score is 1 - p from the full fit.
SelectionResult pvalue_select(const MatrixRef& x, const VectorRef& y, double threshold);

// -2 loglik + penalty * (slopes + 1)
double stepwise_criterion(double loglik, std::size_t model_size, double penalty_per_param);

// Greedy search. Forward starts empty, backward and both start from the full
// model. Candidate moves whose fit fails are pruned; a failing start throws.
SelectionResult stepwise_select(const MatrixRef& x, const VectorRef& y, const StepwiseConfig& config);

// Plain ML fit of a submodel that throws unless the fit converged.
FitResult fit_submodel(const MatrixRef& x, const VectorRef& y, const ModelId& model);

}  // namespace logitbench
