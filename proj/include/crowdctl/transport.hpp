#pragma once

#include "crowdctl/assignment.hpp"
#include "crowdctl/flow.hpp"
#include "crowdctl/types.hpp"

#include <span>
#include <vector>

namespace crowdctl {

/// Entry waypoints y0_i = flow(x0_i, s0_i) and exit waypoints
/// y1_j = flow(x1_j, -s1_j), all in the open region.
struct Waypoints {
  MatX entry_points;  // d x n, indexed by initial agent
  VecX entry_times;   // s0
  MatX exit_points;   // d x n, indexed by target
  VecX exit_margins;  // s1; the exit waypoint is reached at horizon - s1
  double horizon = 0.0;
  double delta = 0.0;

  Index size() const { return entry_times.size(); }
  double exit_time(Index j) const { return horizon - exit_margins(j); }
};

/// Picks s = t + delta/6 for each agent and target, scanning 32 uniform
/// instants of (t, t + delta/3) when the candidate does not land in the open
/// region. `backward_times` are the entry times used on the target side
/// (open-mode t1 for exact control).
Waypoints choose_waypoints(const VectorField& field, const Configuration& config0,
                           const Configuration& config1, const ConvexRegion& region,
                           std::span<const double> forward_times,
                           std::span<const double> backward_times, double horizon,
                           double delta, const FlowSettings& settings);

/// K_ij = |(y0_i, s0_i) - (y1_j, T - s1_j)| in R^{d+1} when s0_i < T - s1_j,
/// forbidden otherwise.
CostMatrix build_cost_matrix(const Waypoints& waypoints);

/// Straight space-time segment from (from, t_from) to (to, t_to).
struct Segment {
  VecX from;
  double t_from;
  VecX to;
  double t_to;

  VecX at(double t) const {
    const double span = t_to - t_from;
    if (span <= 0.0) return from;
    const double a = (t - t_from) / span;
    return (1.0 - a) * from + a * to;
  }
  VecX velocity() const {
    const double span = t_to - t_from;
    if (span <= 0.0) return VecX::Zero(from.size());
    return (to - from) / span;
  }
};

struct SegmentBundle {
  std::vector<Segment> segments;  // indexed by initial agent
  Permutation permutation;
};

SegmentBundle build_segments(const Waypoints& waypoints, const Permutation& permutation);

/// Minimum over pairs with overlapping time windows of the spatial distance
/// between the two segments at equal times. The squared distance is quadratic
/// in t, so each pair is minimized in closed form over the overlap.
/// Returns +inf when no pair overlaps.
double check_non_crossing(std::span<const Segment> segments);

}  // namespace crowdctl
