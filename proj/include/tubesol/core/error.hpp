#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tubesol {

/// Failure categories raised by the library. Every throw site uses exactly one.
enum class ErrorKind {
  InvalidArgument,
  NonConvergence,
  SupercriticalExponent,
  OutOfTube,
  DegenerateSpectrum,
  UnsupportedFamily,
  RangeExceeded,
  DegenerateTangent,
  NonClosedCurve,
  TubeTooWide,
  SingularMetric,
  GridMismatch,
  OnResonance,
  EmptyWindow,
  BranchCrossing,
  SingularFiberOperator,
  PointwiseBoundViolated,
  NonpositiveState,
  ThresholdExceeded,
  LeftBall,
  NoContraction,
  ParameterContractViolated,
  NonzeroTrace,
  ZeroField,
  SubcriticalInput,
  UnsupportedGeometry,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SupercriticalExponent: return "SupercriticalExponent";
    case ErrorKind::OutOfTube: return "OutOfTube";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorKind::RangeExceeded: return "RangeExceeded";
    case ErrorKind::DegenerateTangent: return "DegenerateTangent";
    case ErrorKind::NonClosedCurve: return "NonClosedCurve";
    case ErrorKind::TubeTooWide: return "TubeTooWide";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::OnResonance: return "OnResonance";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::BranchCrossing: return "BranchCrossing";
    case ErrorKind::SingularFiberOperator: return "SingularFiberOperator";
    case ErrorKind::PointwiseBoundViolated: return "PointwiseBoundViolated";
    case ErrorKind::NonpositiveState: return "NonpositiveState";
    case ErrorKind::ThresholdExceeded: return "ThresholdExceeded";
    case ErrorKind::LeftBall: return "LeftBall";
    case ErrorKind::NoContraction: return "NoContraction";
    case ErrorKind::ParameterContractViolated: return "ParameterContractViolated";
    case ErrorKind::NonzeroTrace: return "NonzeroTrace";
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::SubcriticalInput: return "SubcriticalInput";
    case ErrorKind::UnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace tubesol
