#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace corrdyn {

/// Failure categories raised by the library. The CLI maps each one to a
/// distinct process exit code.
enum class Errc {
  InvalidArgument,
  ParseError,
  InvalidComponent,
  NonConvergence,
  ZeroPolynomial,
  InsufficientPairs,
  LengthMismatch,
  EmptyPath,
  IndexOutOfRange,
  ScheduleEmpty,
  TrajectoryEscape,
  NotAPartition,
  PushforwardMismatch,
  NoValidCandidates,
  FamilyEmpty,
  PreconditionViolated,
  DegenerateStart,
  NotConverged,
  PreimageOutsideSupport,
  NonPositiveEigenfunction,
  ConfigMismatch,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace corrdyn
