#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace logitbench {

enum class ErrorCode {
  invalid_argument,
  missing_file,
  outcome_column_missing,
  outcome_not_binary,
  non_numeric_cell,
  malformed_csv,
  degenerate_design,
  stratification_infeasible,
  singular_information,
  separation_suspected,
  no_convergence,
  lp_failure,
  rank_deficient,
  enumeration_required,
  all_models_failed,
  empty_model_selected,
  length_mismatch,
  empty_input,
  metric_unavailable,
  config_error,
  unknown_method,
  timeout,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace logitbench
