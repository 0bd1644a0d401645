#include "corrdyn/error.hpp"

namespace corrdyn {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidComponent: return "InvalidComponent";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::ZeroPolynomial: return "ZeroPolynomial";
    case Errc::InsufficientPairs: return "InsufficientPairs";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyPath: return "EmptyPath";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ScheduleEmpty: return "ScheduleEmpty";
    case Errc::TrajectoryEscape: return "TrajectoryEscape";
    case Errc::NotAPartition: return "NotAPartition";
    case Errc::PushforwardMismatch: return "PushforwardMismatch";
    case Errc::NoValidCandidates: return "NoValidCandidates";
    case Errc::FamilyEmpty: return "FamilyEmpty";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::DegenerateStart: return "DegenerateStart";
    case Errc::NotConverged: return "NotConverged";
    case Errc::PreimageOutsideSupport: return "PreimageOutsideSupport";
    case Errc::NonPositiveEigenfunction: return "NonPositiveEigenfunction";
    case Errc::ConfigMismatch: return "ConfigMismatch";
  }
  return "Unknown";
}

}  // namespace corrdyn
