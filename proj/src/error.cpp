#include "crowdctl/error.hpp"

namespace crowdctl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IntegrationDiverged: return "integration-diverged";
    case ErrorCode::SizeMismatch: return "size-mismatch";
    case ErrorCode::TooLargeN: return "too-large-n";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::WaypointNotFound: return "waypoint-not-found";
    case ErrorCode::InfeasibleAssignment: return "infeasible-assignment";
    case ErrorCode::RadiiDegenerate: return "radii-degenerate";
    case ErrorCode::PerturbationFailed: return "perturbation-failed";
    case ErrorCode::HorizonBelowInfimum: return "horizon-below-infimum";
    case ErrorCode::InfeasibleScenario: return "infeasible-scenario";
    case ErrorCode::VerificationFailed: return "verification-failed";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::Parse: return "parse-error";
    case ErrorCode::Validation: return "validation-error";
    case ErrorCode::PlanMismatch: return "plan-mismatch";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown";
}

}  // namespace crowdctl
