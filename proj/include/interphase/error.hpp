#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace interphase {

enum class ErrorKind {
  OutOfRange,
  InvalidModel,
  NoEquilibrium,
  GeometryViolation,
  UnsupportedGeometry,
  Degenerate,
  NoRoot,
  SingularProblem,
  IllConditioned,
  IncompatibleData,
  UnsupportedMode,
  QuadratureGridMismatch,
  ConstraintDrift,
  StepRejected,
  ConfigError,
};

constexpr std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::NoEquilibrium: return "NoEquilibrium";
    case ErrorKind::GeometryViolation: return "GeometryViolation";
    case ErrorKind::UnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::SingularProblem: return "SingularProblem";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::IncompatibleData: return "IncompatibleData";
    case ErrorKind::UnsupportedMode: return "UnsupportedMode";
    case ErrorKind::QuadratureGridMismatch: return "QuadratureGridMismatch";
    case ErrorKind::ConstraintDrift: return "ConstraintDrift";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above, so
/// callers (the CLI in particular) can map it to an exit status and a name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace interphase
