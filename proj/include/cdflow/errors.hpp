#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cdflow {

enum class ErrorKind {
  NonIntegrable,
  NonConvex,
  InvalidWeight,
  TailUnreachable,
  ShapeMismatch,
  DimensionForbidden,
  Degenerate,
  OutOfRange,
  NonpositiveCurvature,
  NoFeasiblePair,
  PositivityLost,
  StepRejected,
  SolverStall,
  DegenerateDenominator,
  LineSearchFail,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonIntegrable: return "NonIntegrable";
    case ErrorKind::NonConvex: return "NonConvex";
    case ErrorKind::InvalidWeight: return "InvalidWeight";
    case ErrorKind::TailUnreachable: return "TailUnreachable";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DimensionForbidden: return "DimensionForbidden";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NonpositiveCurvature: return "NonpositiveCurvature";
    case ErrorKind::NoFeasiblePair: return "NoFeasiblePair";
    case ErrorKind::PositivityLost: return "PositivityLost";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::SolverStall: return "SolverStall";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::LineSearchFail: return "LineSearchFail";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

// Numerical failures (as opposed to inputs outside an admissible range).
constexpr bool is_numerical_failure(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PositivityLost:
    case ErrorKind::StepRejected:
    case ErrorKind::SolverStall:
    case ErrorKind::LineSearchFail:
    case ErrorKind::NoFeasiblePair:
      return true;
    default:
      return false;
  }
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

// n must avoid the band [0, 1] in one dimension.
inline void require_dimension(double n) {
  require(!(n >= 0.0 && n <= 1.0), ErrorKind::DimensionForbidden,
          "n = " + std::to_string(n) + " lies in the forbidden band [0,1]");
}

}  // namespace cdflow
