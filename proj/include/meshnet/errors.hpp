#pragma once

#include <stdexcept>
#include <string>

namespace meshnet {

/// Error categories raised across the library. The CLI maps them onto exit
/// codes.
enum class ErrorKind {
  kNotSkew,
  kInvalidRotation,
  kDegenerateThrust,
  kDegenerateAxes,
  kIntegrationDiverged,
  kMissingGain,
  kDegenerateGains,
  kInfeasible,
  kNumericalFailure,
  kPriorNotPD,
  kEpsilonTooSmall,
  kUnknownAgent,
  kParseError,
  kValidationError,
  kIoError,
  kZeroDisturbance,
  kCodesignInfeasible,
  kInvalidArgument,
};

const char* to_string(ErrorKind kind);

class MeshnetError : public std::runtime_error {
 public:
  MeshnetError(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace meshnet
