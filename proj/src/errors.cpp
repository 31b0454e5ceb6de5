#include "ctmc/errors.hpp"

namespace ctmc {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_state: return "InvalidState";
    case ErrorCode::invalid_time: return "InvalidTime";
    case ErrorCode::invalid_neighbor: return "InvalidNeighbor";
    case ErrorCode::invalid_grid: return "InvalidGrid";
    case ErrorCode::invalid_spec: return "InvalidSpec";
    case ErrorCode::invalid_input: return "InvalidInput";
    case ErrorCode::exact_mode_unavailable: return "ExactModeUnavailable";
    case ErrorCode::degenerate_conditioning: return "DegenerateConditioning";
    case ErrorCode::invalid_rate: return "InvalidRate";
    case ErrorCode::step_too_large: return "StepTooLarge";
    case ErrorCode::negative_mass: return "NegativeMass";
    case ErrorCode::truncation_overflow: return "TruncationOverflow";
    case ErrorCode::numerical_failure: return "NumericalFailure";
  }
  return "UnknownError";
}

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_state:
    case ErrorCode::invalid_time:
    case ErrorCode::invalid_neighbor:
    case ErrorCode::invalid_grid:
    case ErrorCode::invalid_spec:
    case ErrorCode::invalid_input:
    case ErrorCode::exact_mode_unavailable:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& msg)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
      code_(code) {}

void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace ctmc
