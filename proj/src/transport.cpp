#include "crowdctl/transport.hpp"

#include "crowdctl/error.hpp"
#include "crowdctl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace crowdctl {

namespace {

constexpr int kScanSteps = 32;

struct Waypoint {
  VecX point;
  double time;
};

// Entry instant for one trajectory: forward from x when `sign` is +1,
// backward when -1.
Waypoint pick_instant(const VectorField& field, const VecX& x, const ConvexRegion& region,
                      double entry, double delta, double sign, const FlowSettings& settings,
                      const char* side, Index label) {
  const double candidate = entry + delta / 6.0;
  VecX y = flow(field, x, sign * candidate, settings.step, settings.working_box);
  if (region.contains(y, Membership::Open)) return {y, candidate};

  const double width = delta / 3.0;
  for (int k = 1; k < kScanSteps; ++k) {
    const double s = entry + width * static_cast<double>(k) / kScanSteps;
    y = flow(field, x, sign * s, settings.step, settings.working_box);
    if (region.contains(y, Membership::Open)) return {y, s};
  }
  std::ostringstream os;
  os << "no " << side << " waypoint in the open region for index " << label
     << " within (" << entry << ", " << entry + width
     << "); the trajectory only grazes the region, try approximate control";
  throw Error(ErrorCode::WaypointNotFound, os.str());
}

}  // namespace

Waypoints choose_waypoints(const VectorField& field, const Configuration& config0,
                           const Configuration& config1, const ConvexRegion& region,
                           std::span<const double> forward_times,
                           std::span<const double> backward_times, double horizon,
                           double delta, const FlowSettings& settings) {
  const Index n = config0.size();
  if (config1.size() != n || static_cast<Index>(forward_times.size()) != n ||
      static_cast<Index>(backward_times.size()) != n) {
    throw Error(ErrorCode::SizeMismatch, "waypoint inputs differ in size");
  }
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "waypoint delta must be positive");

  Waypoints w;
  w.horizon = horizon;
  w.delta = delta;
  w.entry_points.resize(config0.dimension(), n);
  w.exit_points.resize(config0.dimension(), n);
  w.entry_times.resize(n);
  w.exit_margins.resize(n);

  parallel_for(2 * n, [&](Index job) {
    const Index i = job / 2;
    if (job % 2 == 0) {
      const Waypoint p = pick_instant(field, config0.point(i), region, forward_times[i], delta,
                                      +1.0, settings, "entry", i);
      w.entry_points.col(i) = p.point;
      w.entry_times(i) = p.time;
    } else {
      const Waypoint p = pick_instant(field, config1.point(i), region, backward_times[i], delta,
                                      -1.0, settings, "exit", i);
      w.exit_points.col(i) = p.point;
      w.exit_margins(i) = p.time;
    }
  });
  return w;
}

CostMatrix build_cost_matrix(const Waypoints& w) {
  const Index n = w.size();
  CostMatrix cost(MatX::Zero(n, n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double t_exit = w.exit_time(j);
      if (w.entry_times(i) < t_exit) {
        const double dt = t_exit - w.entry_times(i);
        cost.values(i, j) =
            std::sqrt((w.entry_points.col(i) - w.exit_points.col(j)).squaredNorm() + dt * dt);
      } else {
        cost.forbid(i, j);
      }
    }
  }
  return cost;
}

SegmentBundle build_segments(const Waypoints& w, const Permutation& permutation) {
  SegmentBundle bundle;
  bundle.permutation = permutation;
  for (Index i = 0; i < w.size(); ++i) {
    const int j = permutation[i];
    bundle.segments.push_back(
        {w.entry_points.col(i), w.entry_times(i), w.exit_points.col(j), w.exit_time(j)});
  }
  return bundle;
}

double check_non_crossing(std::span<const Segment> segments) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (std::size_t j = i + 1; j < segments.size(); ++j) {
      const Segment& a = segments[i];
      const Segment& b = segments[j];
      const double lo = std::max(a.t_from, b.t_from);
      const double hi = std::min(a.t_to, b.t_to);
      if (lo > hi) continue;
      // a(t) - b(t) = p + q (t - lo), affine in t.
      const VecX p = a.at(lo) - b.at(lo);
      const VecX q = a.velocity() - b.velocity();
      double tau = 0.0;
      const double qq = q.squaredNorm();
      if (qq > 0.0) tau = std::clamp(-p.dot(q) / qq, 0.0, hi - lo);
      best = std::min(best, (p + tau * q).norm());
    }
  }
  return best;
}

}  // namespace crowdctl
