#include "logitbench/model.hpp"

#include "logitbench/error.hpp"

namespace logitbench {

MatrixXd select_columns(const MatrixRef& x, const ModelId& model) {
  MatrixXd out(x.rows(), static_cast<Index>(model.size()));
  for (std::size_t j = 0; j < model.size(); ++j) {
    if (model[j] < 0 || model[j] >= x.cols()) throw Error(ErrorCode::invalid_argument, "model index out of range");
    out.col(static_cast<Index>(j)) = x.col(model[j]);
  }
  return out;
}

VectorXd expand_coefficients(const VectorRef& sub, const ModelId& model, Index p, double fill) {
  if (sub.size() != static_cast<Index>(model.size()) + 1)
    throw Error(ErrorCode::length_mismatch, "submodel coefficients do not match the model");
  VectorXd full = VectorXd::Constant(p + 1, fill);
  full[0] = sub[0];
  for (std::size_t j = 0; j < model.size(); ++j) full[model[j] + 1] = sub[static_cast<Index>(j) + 1];
  return full;
}

}  // namespace logitbench
