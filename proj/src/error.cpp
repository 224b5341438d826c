#include "logitbench/error.hpp"

namespace logitbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::missing_file: return "MissingFile";
    case ErrorCode::outcome_column_missing: return "OutcomeColumnMissing";
    case ErrorCode::outcome_not_binary: return "OutcomeNotBinary";
    case ErrorCode::non_numeric_cell: return "NonNumericCell";
    case ErrorCode::malformed_csv: return "MalformedCsv";
    case ErrorCode::degenerate_design: return "DegenerateDesign";
    case ErrorCode::stratification_infeasible: return "StratificationInfeasible";
    case ErrorCode::singular_information: return "SingularInformation";
    case ErrorCode::separation_suspected: return "SeparationSuspected";
    case ErrorCode::no_convergence: return "NoConvergence";
    case ErrorCode::lp_failure: return "LpFailure";
    case ErrorCode::rank_deficient: return "RankDeficient";
    case ErrorCode::enumeration_required: return "EnumerationRequired";
    case ErrorCode::all_models_failed: return "AllModelsFailed";
    case ErrorCode::empty_model_selected: return "EmptyModelSelected";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::metric_unavailable: return "MetricUnavailable";
    case ErrorCode::config_error: return "ConfigError";
    case ErrorCode::unknown_method: return "UnknownMethod";
    case ErrorCode::timeout: return "Timeout";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace logitbench
