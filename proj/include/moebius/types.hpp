#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace moebius {

using Vec3 = Eigen::Vector3d;
using Points = std::vector<Vec3>;

inline constexpr double kPi = 3.14159265358979323846;

/// Failure categories surfaced by the library. The CLI maps these onto exit codes.
enum class ErrorKind {
  NonEmbedded,
  DegenerateCurve,
  InvalidCurve,
  EpsilonOutOfRange,
  CoincidentPoints,
  ParamError,
  FlatPoint,
  StepRejected,
  ConfigError,
  NotReached,
  EventStale,
  ParseError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonEmbedded: return "NonEmbedded";
    case ErrorKind::DegenerateCurve: return "DegenerateCurve";
    case ErrorKind::InvalidCurve: return "InvalidCurve";
    case ErrorKind::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::ParamError: return "ParamError";
    case ErrorKind::FlatPoint: return "FlatPoint";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::NotReached: return "NotReached";
    case ErrorKind::EventStale: return "EventStale";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

/// Thrown by the flow steppers when a step must be retried; carries the suggested step size.
class StepRejected : public Error {
 public:
  StepRejected(const std::string& what, double suggested_dt)
      : Error(ErrorKind::StepRejected, what), suggested_dt_(suggested_dt) {}

  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

}  // namespace moebius
