#pragma once

#include <stdexcept>
#include <string>

namespace hypobv {

enum class ErrorKind {
  NonConstantLeading,
  ConstantPoly,
  DimensionMismatch,
  TDependence,
  OrderTooHigh,
  OrderTooSmall,
  TruncationSuspect,
  TruncationExceeded,
  NoFit,
  InvalidSequence,
  RootSolverFailed,
  ConditionViolation,
  KindProfileMismatch,
  QuadratureNoConvergence,
  NoConvergence,
  ResidualTooLarge,
  OscillatoryQuadratureFailure,
  AdmissibilityFailure,
  SchemaError,
  FileError,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hypobv
