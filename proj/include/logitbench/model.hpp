#pragma once

#include <vector>

#include "logitbench/glm.hpp"

namespace logitbench {

// Sorted predictor indices; the intercept is implicit and always present.
using ModelId = std::vector<int>;

MatrixXd select_columns(const MatrixRef& x, const ModelId& model);

// Scatter intercept-first coefficients of a submodel into a length p + 1 vector.
VectorXd expand_coefficients(const VectorRef& sub, const ModelId& model, Index p, double fill = 0.0);

}  // namespace logitbench
