#pragma once

#include <Eigen/Dense>
#include <optional>

#include "logitbench/glm.hpp"

namespace logitbench {

enum class SeparationKind { none, quasi_complete, complete, indeterminate };

const char* to_string(SeparationKind kind);

struct SeparationReport {
  bool separated = false;
  SeparationKind kind = SeparationKind::none;
  // Direction b (intercept first) with (2y_i - 1) * [1, x_i]' b >= 0 for all i.
  std::optional<VectorXd> certificate;
};

inline constexpr double kSeparationTolerance = 1e-8;

// Linear-programming separation check on [1, x]. The first program maximizes
// the summed signed margin inside the unit box; a positive optimum means
// separation. A second program maximizes the smallest margin to decide
// between complete and quasi-complete separation.
SeparationReport detect_separation(const MatrixRef& x, const VectorRef& y);

// True if any coefficient is non-finite or larger than threshold in magnitude.
bool unstable_coefficients(const VectorRef& beta, double threshold);

}  // namespace logitbench
