#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logitbench/glm.hpp"
#include "logitbench/model.hpp"

namespace logitbench {

inline constexpr double kDgpStepPenalty = 3.8415;  // chi-square(1) 0.95 quantile
inline constexpr double kDgpCoefficientBound = 10.0;
inline constexpr double kDgpEtaClip = 10.0;

struct GeneratingModel {
  ModelId selected;
  VectorXd beta;  // p + 1, intercept first; exactly 0 outside `selected`
  VectorXd pi;
  double pseudo_r2 = 0.0;
  bool separation_handled = false;
  double ridge_lambda = 0.0;  // 0 when no ridge refit was needed
  std::string route;          // backward | forward | univariate | synthetic
  std::vector<std::string> names;
};

// Identity below 30 predictors. Otherwise keep the top min(p, 80) by absolute
// correlation with y, then the top 30 by univariate McFadden R^2.
ModelId screen_variables(const MatrixRef& x, const VectorRef& y);

// Backward stepwise at the chi-square penalty, falling back to forward, then to
// univariate Wald tests at 0.05. Unstable fits are replaced by the smallest
// stabilizing ridge fit. Throws EmptyModelSelected when nothing survives.
GeneratingModel fit_generating_model(const MatrixRef& x, const VectorRef& y, const ModelId& screened);

// Probabilities from a coefficient vector with the linear predictor clipped to +-10.
VectorXd clipped_probs(const VectorRef& beta, const MatrixRef& x);

// Ground truth with chosen coefficients (used for designed benchmarks).
GeneratingModel synthetic_model(const MatrixRef& x, const VectorRef& beta);

std::vector<VectorXd> simulate_outcomes(const GeneratingModel& gm, int replicates, std::uint64_t seed);

// Outcome vector for one replicate; simulate_outcomes(gm, M, seed)[r] == simulate_replicate(gm, r, seed).
VectorXd simulate_replicate(const GeneratingModel& gm, int replicate, std::uint64_t seed);

std::string to_json(const GeneratingModel& gm);
GeneratingModel generating_model_from_json(const std::string& text);

}  // namespace logitbench
