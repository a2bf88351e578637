#include "crowdctl/pipeline.hpp"

#include "crowdctl/error.hpp"

#include <sstream>

namespace crowdctl {

namespace {

std::vector<double> present(const std::vector<std::optional<double>>& times) {
  std::vector<double> out;
  for (const auto& t : times) out.push_back(t.value());
  return out;
}

}  // namespace

Synthesis synthesize_exact(const VectorField& field, const Configuration& config0,
                           const Configuration& targets, const ConvexRegion& region,
                           const MinimalTimeReport& exact_report, double horizon,
                           const PlannerParams& params) {
  if (!exact_report.feasible) {
    throw Error(ErrorCode::InfeasibleScenario,
                check_geometric_condition(exact_report.hitting).describe());
  }
  const double infimum = *exact_report.infimum_time;
  if (!(horizon > infimum)) {
    std::ostringstream os;
    os << "horizon below infimum time (" << horizon << " <= " << infimum << ")";
    throw Error(ErrorCode::HorizonBelowInfimum, os.str());
  }

  Synthesis s;
  s.steered_targets = targets;
  s.steered_report = exact_report;
  const auto forward = present(exact_report.hitting.t0);
  const auto backward = present(exact_report.hitting.t1);
  s.waypoints = choose_waypoints(field, config0, targets, region, forward, backward, horizon,
                                 horizon - infimum, params.flow);
  s.assignment = solve_assignment(build_cost_matrix(s.waypoints));
  const SegmentBundle bundle = build_segments(s.waypoints, s.assignment.permutation);

  s.plan = assemble_plan(config0, targets, s.waypoints, bundle, params.flow.step);
  s.plan.min_separation = check_non_crossing(bundle.segments);
  const Radii radii = compute_radii(s.plan, field, region, params.radius_samples);
  for (Index i = 0; i < s.plan.size(); ++i) {
    s.plan.agents[i].inner_radius = radii.inner(i);
    s.plan.agents[i].outer_radius = radii.outer(i);
  }
  s.plan.control_bound = control_bound(s.plan, field);

  s.caratheodory =
      verify_caratheodory(s.plan, field, region, params.caratheodory_samples, params.seed);
  if (!s.caratheodory.passed()) {
    std::ostringstream os;
    os << "control fails the admissibility check (sup " << s.caratheodory.sup_norm << " vs bound "
       << s.plan.control_bound << ", Lipschitz ratio " << s.caratheodory.max_lipschitz_ratio
       << " vs budget " << s.caratheodory.lipschitz_budget << ")";
    throw Error(ErrorCode::VerificationFailed, os.str());
  }
  return s;
}

Synthesis plan_control(const VectorField& field, const Configuration& config0,
                       const Configuration& config1, const ConvexRegion& region,
                       ControlMode mode, std::optional<double> horizon,
                       const PlannerParams& params) {
  if (config0.size() != config1.size()) {
    throw Error(ErrorCode::SizeMismatch, "configurations have different sizes");
  }
  const HittingTimes hitting =
      configuration_hitting_times(field, config0, config1, region, params.flow);
  const MinimalTimeReport report = minimal_time_from_hitting(hitting, mode);
  if (!report.feasible) {
    throw Error(ErrorCode::InfeasibleScenario,
                check_geometric_condition(hitting, mode).describe());
  }
  const double T = horizon.value_or(*report.infimum_time + params.delta);
  if (!(T > *report.infimum_time)) {
    std::ostringstream os;
    os << "horizon below infimum time (" << T << " <= " << *report.infimum_time << ")";
    throw Error(ErrorCode::HorizonBelowInfimum, os.str());
  }

  Synthesis s;
  if (mode == ControlMode::Exact) {
    s = synthesize_exact(field, config0, config1, region, report, T, params);
  } else {
    const Configuration targets =
        build_approx_targets(field, config1, region, hitting, params.epsilon, params.flow);
    const MinimalTimeReport steered = minimal_time_from_hitting(
        configuration_hitting_times(field, config0, targets, region, params.flow),
        ControlMode::Exact);
    if (!steered.feasible || !(T > *steered.infimum_time)) {
      throw Error(ErrorCode::PerturbationFailed,
                  "perturbed targets do not reduce the exact infimum below the horizon");
    }
    s = synthesize_exact(field, config0, targets, region, steered, T, params);
  }
  s.report = report;
  return s;
}

}  // namespace crowdctl
