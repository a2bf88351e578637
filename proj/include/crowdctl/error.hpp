#pragma once

#include <stdexcept>
#include <string>

namespace crowdctl {

enum class ErrorCode {
  IntegrationDiverged,
  SizeMismatch,
  TooLargeN,
  InvalidArgument,
  WaypointNotFound,
  InfeasibleAssignment,
  RadiiDegenerate,
  PerturbationFailed,
  HorizonBelowInfimum,
  InfeasibleScenario,
  VerificationFailed,
  OutOfRange,
  Parse,
  Validation,
  PlanMismatch,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crowdctl
