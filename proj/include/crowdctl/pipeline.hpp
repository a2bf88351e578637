#pragma once

#include "crowdctl/assignment.hpp"
#include "crowdctl/control.hpp"
#include "crowdctl/minimal_time.hpp"
#include "crowdctl/transport.hpp"

#include <cstdint>
#include <optional>

namespace crowdctl {

struct PlannerParams {
  FlowSettings flow;
  double delta = 0.1;
  double epsilon = 1e-2;
  int radius_samples = 512;
  int caratheodory_samples = 2000;
  std::uint64_t seed = 0;
};

/// Everything produced while synthesizing a control.
struct Synthesis {
  MinimalTimeReport report;        // requested mode, original targets
  Configuration steered_targets;   // the targets, or their perturbation in approximate mode
  MinimalTimeReport steered_report;  // exact report towards steered_targets
  Waypoints waypoints;
  Assignment assignment;
  ControlPlan plan;
  CaratheodoryReport caratheodory;
};

/// Exact synthesis towards `targets` at `horizon`, given the open-mode hitting
/// times of (config0, targets). Runs waypoint selection, the space-time
/// assignment, the crossing certificate, tube radii and the admissibility check.
Synthesis synthesize_exact(const VectorField& field, const Configuration& config0,
                           const Configuration& targets, const ConvexRegion& region,
                           const MinimalTimeReport& exact_report, double horizon,
                           const PlannerParams& params);

/// Minimal time, then a control at `horizon` (default: infimum + delta).
/// Approximate mode perturbs the targets within epsilon first.
Synthesis plan_control(const VectorField& field, const Configuration& config0,
                       const Configuration& config1, const ConvexRegion& region,
                       ControlMode mode, std::optional<double> horizon,
                       const PlannerParams& params);

}  // namespace crowdctl
