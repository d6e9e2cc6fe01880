#include "vw/error.hpp"

namespace vw {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::OutOfSpan: return "OutOfSpan";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::LevelSetNotFound: return "LevelSetNotFound";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::TrajectoryLeftW: return "TrajectoryLeftW";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::NotOnLevelSet: return "NotOnLevelSet";
    case ErrorCode::NonPositiveSPlus: return "NonPositiveSPlus";
    case ErrorCode::InvalidConstants: return "InvalidConstants";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::BNotPositiveDefinite: return "BNotPositiveDefinite";
    case ErrorCode::ConditionGViolated: return "ConditionGViolated";
    case ErrorCode::SingularKinetic: return "SingularKinetic";
    case ErrorCode::ConstantsInvalid: return "ConstantsInvalid";
    case ErrorCode::UnboundedSublevel: return "UnboundedSublevel";
    case ErrorCode::SpanTooShort: return "SpanTooShort";
    case ErrorCode::NoInteriorCandidate: return "NoInteriorCandidate";
    case ErrorCode::AnchorsNotCauchy: return "AnchorsNotCauchy";
    case ErrorCode::MalformedReport: return "MalformedReport";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

static std::string decorate(ErrorCode code, const std::string& what) {
  return std::string(to_string(code)) + ": " + what;
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(decorate(code, what)), code_(code) {}

Error::Error(ErrorCode code, const std::string& what, double t, Eigen::VectorXd state)
    : std::runtime_error(decorate(code, what)), code_(code), t_(t), state_(std::move(state)) {}

}  // namespace vw
