#pragma once

#include <cstdint>
#include <vector>

#include "logitbench/glm.hpp"
#include "logitbench/gprior.hpp"
#include "logitbench/model.hpp"

namespace logitbench {

inline constexpr int kEnumerationThreshold = 20;
inline constexpr int kDefaultMc3Iterations = 10000;
inline constexpr int kDefaultPosteriorDraws = 10000;

// Truncated beta-binomial(1, 1): uniform over sizes 0..min(p, n-3), then
// uniform among models of a size. Sizes >= n-2 get -inf.
double model_log_prior(int model_size, int p, int n);

struct LaplaceFit {
  double log_marginal = 0.0;
  VectorXd mode;        // intercept first, then the included slopes
  MatrixXd covariance;  // inverse negative Hessian of the log posterior at the mode
};

// Laplace approximation for one model at a fixed g. Slopes get the prior
// Normal(0, g (X_c' X_c / 4)^{-1}) with X_c the centred columns, which makes
// g = n a unit-information prior; the intercept prior is flat.
LaplaceFit laplace_fixed_g(const MatrixRef& x, const VectorRef& y, const ModelId& model, double g,
                           const VectorXd* warm_start = nullptr);

struct ModelResult {
  ModelId model;
  double log_marginal = 0.0;
  double log_prior = 0.0;
  double probability = 0.0;
  double g = 0.0;  // g used (fixed / empirical Bayes); 0 when not applicable
  VectorXd mean;
  MatrixXd covariance;
};

// log marginal under any prior kind except eb_global, which needs the whole model space.
ModelResult evaluate_model(const MatrixRef& x, const VectorRef& y, const ModelId& model, const GPriorSpec& prior);

// Shared g maximizing sum_m prior(m) m_g(y | m) over log g in [-10, 20].
double eb_global_fit(const MatrixRef& x, const VectorRef& y, const std::vector<ModelId>& models);

struct BmaPosterior {
  std::vector<ModelResult> models;  // admissible, successfully evaluated, probabilities sum to 1
  VectorXd inclusion_probs;
  Index p = 0;
  int failed_models = 0;
  bool enumerated = true;
  double shared_g = 0.0;  // eb_global only
};

struct BmaOptions {
  int enumeration_threshold = kEnumerationThreshold;
  int mc3_iterations = kDefaultMc3Iterations;
};

BmaPosterior enumerate_posterior(const MatrixRef& x, const VectorRef& y, const GPriorSpec& prior,
                                 const BmaOptions& options = {});

BmaPosterior mc3_posterior(const MatrixRef& x, const VectorRef& y, const GPriorSpec& prior, int iterations,
                           std::uint64_t seed);

// Enumerates up to the threshold, otherwise MC3.
BmaPosterior fit_bma(const MatrixRef& x, const VectorRef& y, const GPriorSpec& prior, std::uint64_t seed,
                     const BmaOptions& options = {});

// Posterior probabilities from unnormalized log weights.
std::vector<double> normalize_log_weights(const std::vector<double>& log_weights);

struct BmaSummary {
  VectorXd avg_beta;  // p + 1, intercept first
  VectorXd ci_lower;
  VectorXd ci_upper;
  VectorXd inclusion;
};

BmaSummary summarize_bma(const BmaPosterior& post, int draws, std::uint64_t seed, double level = 0.95);

// Model-averaged probabilities at each model's posterior mean.
VectorXd bma_predict(const BmaPosterior& post, const MatrixRef& x_new);

}  // namespace logitbench
