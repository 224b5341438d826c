#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "logitbench/glm.hpp"

namespace logitbench {

struct MethodSettings {
  int enumeration_threshold = 20;
  int posterior_draws = 10000;
  int mc3_iterations = 10000;
  int tuning_folds = 10;
};

struct MethodContext {
  const MatrixXd& x;
  const VectorXd& y;
  std::uint64_t seed;
  bool inference;  // false for fold fits that only need predictions
  MethodSettings settings;
};

struct MethodFit {
  VectorXd beta;  // p + 1, intercept first
  std::optional<VectorXd> ci_lower;
  std::optional<VectorXd> ci_upper;
  VectorXd inclusion_score;
  std::function<VectorXd(const MatrixRef&)> predict;
};

using MethodFn = std::function<MethodFit(const MethodContext&)>;

class MethodRegistry {
 public:
  // The catalog of built-in methods.
  static MethodRegistry builtin();

  void add(const std::string& name, MethodFn fn);
  bool contains(const std::string& name) const { return methods_.count(name) > 0; }
  const MethodFn& get(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, MethodFn> methods_;
};

}  // namespace logitbench
