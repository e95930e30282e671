#pragma once

#include <stdexcept>
#include <string>

namespace invset {

// Structured error taxonomy. Every failure raised by the library carries one
// of these codes so callers (and the CLI exit-code mapping) can dispatch on
// the failure class instead of parsing messages.
enum class ErrorCode {
    NonSquare,
    DimensionMismatch,
    SingularMatrix,
    NoConvergence,
    SwapIllConditioned,
    NumericalStall,
    EmptySet,
    Unbounded,
    DimensionTooHigh,
    SingularDynamics,
    NoZeroEigenvalues,
    IterationCapExceeded,
    InvalidConstraintSet,
    InvalidParams,
    NotStabilizable,
    IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace invset
