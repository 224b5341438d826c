#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logitbench/glm.hpp"

namespace logitbench {

inline constexpr double kIntervalAlpha = 0.05;

struct MethodOutput {
  bool failed = false;
  std::string error;  // reason when failed
  VectorXd beta_hat;  // p + 1, intercept first
  std::optional<VectorXd> ci_lower;
  std::optional<VectorXd> ci_upper;
  VectorXd inclusion_score;  // p
  VectorXd test_probs;       // pooled held-out probabilities, one per row
  double cpu_seconds = 0.0;
};

struct MetricRecord {
  std::optional<double> rmse;
  std::optional<double> mis;
  std::optional<double> auprc;
  std::optional<double> brier;
  double cpu_minutes = 0.0;
  bool failed = false;
};

// Slopes only: callers pass coordinates 1..p.
double rmse(const VectorRef& beta_hat, const VectorRef& beta_true);

double interval_score(double lower, double upper, double truth, double alpha = kIntervalAlpha);
double mean_interval_score(const VectorRef& lower, const VectorRef& upper, const VectorRef& truth,
                           double alpha = kIntervalAlpha);

// Average precision with tied scores collapsed into one block. Throws
// MetricUnavailable unless there is at least one relevant and one irrelevant item.
double auprc(const VectorRef& score, const std::vector<bool>& relevant);

double brier(const VectorRef& probs, const VectorRef& outcomes);

// beta_true has length p + 1 (intercept first); outcomes align with test_probs.
MetricRecord compute_metrics(const MethodOutput& out, const VectorRef& beta_true, const VectorRef& outcomes);

}  // namespace logitbench
