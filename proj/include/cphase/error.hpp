#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cphase {

enum class ErrorKind {
  // configuration / validation
  InvalidConfig,
  NegativeRate,
  ZeroDetuning,
  GridTooShort,
  TruncationZero,
  MultiModeUnsupported,
  GridMismatch,
  // analytic preconditions
  ZeroGamma,
  ZeroKappa,
  NonpositiveC,
  NonpositiveInput,
  ReflectivityOutOfRange,
  DegenerateMode,
  // solvers
  StepFailure,
  TrackingLoss,
  DegenerateStart,
  TruncationOverflow,
  NoBracket,
  TargetUnreachable,
  BracketFailure,
  // state metrics
  LeakageTooLarge,
  NotPure,
  InvalidDensityMatrix,
};

std::string_view error_name(ErrorKind kind);

/// True for errors caused by the input rather than by a numerical procedure.
bool is_config_error(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

private:
  ErrorKind kind_;
};

}  // namespace cphase
