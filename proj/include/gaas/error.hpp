#pragma once

#include <stdexcept>
#include <string>

namespace gaas {

enum class ErrorCode {
  NonFinite,
  NonSquare,
  NotSymmetric,
  DimensionMismatch,
  NoConvergence,
  SingularOperator,
  NotPSD,
  InconsistentConstraints,
  NotStabilizing,
  SchemaError,
  InvariantViolation,
  DomainGap,
  NonFiniteState,
  ZenoJumps,
  Io,
  InvalidArgument,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures surface as this exception; the C API maps `code()`
// onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gaas
