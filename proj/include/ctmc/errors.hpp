// Error taxonomy for the sampling laboratory.
//
// Config-class errors mean the request itself is invalid (bad states, times,
// grids, specs); the CLI maps them to exit code 2. Runtime-class errors mean a
// numerically valid request failed while executing (step too large, negative
// probability mass, truncation budget unreachable); the CLI maps them to exit
// code 3. Divergences that are merely infinite (disjoint supports in a KL
// evaluation) are value-level signals, not errors.

#pragma once

#include <stdexcept>
#include <string>

namespace ctmc {

enum class ErrorCode {
  // config / validation class
  invalid_state,
  invalid_time,
  invalid_neighbor,
  invalid_grid,
  invalid_spec,
  invalid_input,
  exact_mode_unavailable,
  // runtime numerical class
  degenerate_conditioning,
  invalid_rate,
  step_too_large,
  negative_mass,
  truncation_overflow,
  numerical_failure,
};

const char* error_code_name(ErrorCode code);

// True for errors that indicate an invalid request rather than a numerical
// failure while executing a valid one.
bool is_config_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& msg);

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace ctmc
