#pragma once

#include "crowdctl/flow.hpp"
#include "crowdctl/minimal_time.hpp"
#include "crowdctl/transport.hpp"
#include "crowdctl/types.hpp"

#include <cstdint>
#include <vector>

namespace crowdctl {

/// Three-phase plan for one agent: free flow from `start` until
/// `entry_time`, straight motion at `velocity` from `entry_point` to
/// `exit_point` during [entry_time, exit_time], then free flow to `target`
/// at the horizon. The control tube is the ball pair inner_radius < outer_radius
/// around the straight phase.
struct AgentPlan {
  VecX start;
  VecX target;
  double entry_time = 0.0;
  double exit_time = 0.0;
  VecX entry_point;
  VecX exit_point;
  VecX velocity;
  double inner_radius = 0.0;
  double outer_radius = 0.0;

  bool in_window(double t) const { return t >= entry_time && t <= exit_time; }
  VecX segment_point(double t) const;
};

struct ControlPlan {
  double horizon = 0.0;
  double step = 1e-3;  // integration step used to build the waypoints
  Permutation permutation;
  std::vector<AgentPlan> agents;
  double control_bound = 0.0;
  double min_separation = 0.0;

  Index size() const { return static_cast<Index>(agents.size()); }
  Index dimension() const { return agents.empty() ? 0 : agents.front().start.size(); }
};

/// Assembles the unradiused plan from waypoints and the assignment.
/// `targets` are the configuration the waypoints were built from.
ControlPlan assemble_plan(const Configuration& config0, const Configuration& targets,
                          const Waypoints& waypoints, const SegmentBundle& segments,
                          double step);

/// Plan with empty control windows: every agent follows the free flow.
ControlPlan free_flow_plan(const VectorField& field, const Configuration& config0,
                           double horizon, double step);

/// Position of agent i at time t in [0, horizon]. Phase boundaries belong to
/// the straight segment.
VecX plan_trajectory(const ControlPlan& plan, Index i, double t, const VectorField& field,
                     double step);

/// Positions of every agent at the given increasing times; one d x m block per agent.
std::vector<MatX> sample_trajectories(const ControlPlan& plan, const VectorField& field,
                                      std::span<const double> times, double step);

struct Radii {
  VecX inner;
  VecX outer;
};

/// Tube radii: R_i = 0.45 min(clearance of the segment, half the smallest
/// sampled distance to any other agent), r_i = R_i / 2, then shrunk by half
/// (at most 6 times) for agents whose tubes fail the containment or
/// disjointness checks on a staggered grid.
Radii compute_radii(const ControlPlan& plan, const VectorField& field, const ConvexRegion& region,
                    int samples = 512);

/// Quintic smoothstep cutoff: 1 inside r, 0 outside R.
double bump(double rho, double inner, double outer);

/// Control value u(x, t); zero outside every active outer ball.
VecX eval_control(const ControlPlan& plan, const VecX& x, double t, const VectorField& field);

/// Upper bound on |u| over every tube, including the field's variation across the ball.
double control_bound(const ControlPlan& plan, const VectorField& field);

struct SimulationResult {
  std::vector<double> times;
  std::vector<MatX> samples;  // d x n per recorded time
  Configuration final_configuration;
  double endpoint_error = 0.0;
  double control_sup_norm = 0.0;
};

/// Closed-loop RK4 of x' = v(x) + 1_omega(x) u(x, t) for all agents. Every
/// window boundary is a grid point, so the control is smooth in time on each
/// integration step. Samples are recorded every `output_stride` steps and at
/// the horizon. The endpoint error is the configuration distance to `target`.
SimulationResult simulate(const ControlPlan& plan, const Configuration& config0,
                          const Configuration& target, const VectorField& field,
                          const ConvexRegion& region, double step, int output_stride = 10);

/// Perturbed targets y1_i within epsilon of x1_i whose backward trajectories
/// reach the open region at the closure entry time.
Configuration build_approx_targets(const VectorField& field, const Configuration& config1,
                                   const ConvexRegion& region, const HittingTimes& hitting,
                                   double epsilon, const FlowSettings& settings);

struct CaratheodoryReport {
  double sup_norm = 0.0;
  double max_lipschitz_ratio = 0.0;
  double lipschitz_budget = 0.0;
  bool bounded = true;
  bool lipschitz = true;
  bool passed() const { return bounded && lipschitz; }
};

/// Samples 1_omega u near the tubes: sup-norm against plan.control_bound and
/// finite-difference ratios against L_v + 1.875 M / (R - r).
CaratheodoryReport verify_caratheodory(const ControlPlan& plan, const VectorField& field,
                                       const ConvexRegion& region, int samples,
                                       std::uint64_t seed = 0);

}  // namespace crowdctl
