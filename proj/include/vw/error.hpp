#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>

namespace vw {

enum class ErrorCode {
  StepSizeUnderflow,
  NonFiniteState,
  MaxStepsExceeded,
  OutOfSpan,
  NonFiniteValue,
  EmptyRegion,
  LevelSetNotFound,
  WindowTooShort,
  TrajectoryLeftW,
  NearSingular,
  NotOnLevelSet,
  NonPositiveSPlus,
  InvalidConstants,
  HypothesisViolated,
  BNotPositiveDefinite,
  ConditionGViolated,
  SingularKinetic,
  ConstantsInvalid,
  UnboundedSublevel,
  SpanTooShort,
  NoInteriorCandidate,
  AnchorsNotCauchy,
  MalformedReport,
  ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  Error(ErrorCode code, const std::string& what, double t, Eigen::VectorXd state);

  ErrorCode code() const { return code_; }
  std::optional<double> time() const { return t_; }
  const Eigen::VectorXd& state() const { return state_; }

 private:
  ErrorCode code_;
  std::optional<double> t_;
  Eigen::VectorXd state_;
};

}  // namespace vw
