#include "cphase/error.hpp"

namespace cphase {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::NegativeRate: return "NegativeRate";
    case ErrorKind::ZeroDetuning: return "ZeroDetuning";
    case ErrorKind::GridTooShort: return "GridTooShort";
    case ErrorKind::TruncationZero: return "TruncationZero";
    case ErrorKind::MultiModeUnsupported: return "MultiModeUnsupported";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::ZeroGamma: return "ZeroGamma";
    case ErrorKind::ZeroKappa: return "ZeroKappa";
    case ErrorKind::NonpositiveC: return "NonpositiveC";
    case ErrorKind::NonpositiveInput: return "NonpositiveInput";
    case ErrorKind::ReflectivityOutOfRange: return "ReflectivityOutOfRange";
    case ErrorKind::DegenerateMode: return "DegenerateMode";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::TrackingLoss: return "TrackingLoss";
    case ErrorKind::DegenerateStart: return "DegenerateStart";
    case ErrorKind::TruncationOverflow: return "TruncationOverflow";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::TargetUnreachable: return "TargetUnreachable";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::LeakageTooLarge: return "LeakageTooLarge";
    case ErrorKind::NotPure: return "NotPure";
    case ErrorKind::InvalidDensityMatrix: return "InvalidDensityMatrix";
  }
  return "Unknown";
}

bool is_config_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::NegativeRate:
    case ErrorKind::ZeroDetuning:
    case ErrorKind::GridTooShort:
    case ErrorKind::TruncationZero:
    case ErrorKind::MultiModeUnsupported:
    case ErrorKind::GridMismatch:
    case ErrorKind::ZeroGamma:
    case ErrorKind::ZeroKappa:
    case ErrorKind::NonpositiveC:
    case ErrorKind::NonpositiveInput:
    case ErrorKind::ReflectivityOutOfRange:
    case ErrorKind::DegenerateMode:
      return true;
    default:
      return false;
  }
}

}  // namespace cphase
