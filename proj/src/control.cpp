#include "crowdctl/control.hpp"

#include "crowdctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace crowdctl {

namespace {

constexpr double kMinRadius = 1e-9;
constexpr int kMaxShrinks = 6;

}  // namespace

VecX AgentPlan::segment_point(double t) const {
  const double span = exit_time - entry_time;
  if (span <= 0.0) return entry_point;
  const double a = (t - entry_time) / span;
  return (1.0 - a) * entry_point + a * exit_point;
}

ControlPlan assemble_plan(const Configuration& config0, const Configuration& targets,
                          const Waypoints& w, const SegmentBundle& segments, double step) {
  ControlPlan plan;
  plan.horizon = w.horizon;
  plan.step = step;
  plan.permutation = segments.permutation;
  for (Index i = 0; i < config0.size(); ++i) {
    const int j = segments.permutation[i];
    AgentPlan a;
    a.start = config0.point(i);
    a.target = targets.point(j);
    a.entry_time = w.entry_times(i);
    a.exit_time = w.exit_time(j);
    a.entry_point = w.entry_points.col(i);
    a.exit_point = w.exit_points.col(j);
    a.velocity = (a.exit_point - a.entry_point) / (a.exit_time - a.entry_time);
    plan.agents.push_back(std::move(a));
  }
  return plan;
}

ControlPlan free_flow_plan(const VectorField& field, const Configuration& config0,
                           double horizon, double step) {
  ControlPlan plan;
  plan.horizon = horizon;
  plan.step = step;
  for (Index i = 0; i < config0.size(); ++i) {
    AgentPlan a;
    a.start = config0.point(i);
    a.target = flow(field, a.start, horizon, step);
    a.entry_time = horizon;
    a.exit_time = horizon;
    a.entry_point = a.target;
    a.exit_point = a.target;
    a.velocity = VecX::Zero(a.start.size());
    plan.permutation.push_back(static_cast<int>(i));
    plan.agents.push_back(std::move(a));
  }
  plan.min_separation = std::numeric_limits<double>::infinity();
  return plan;
}

VecX plan_trajectory(const ControlPlan& plan, Index i, double t, const VectorField& field,
                     double step) {
  if (t < 0.0 || t > plan.horizon || i < 0 || i >= plan.size()) {
    std::ostringstream os;
    os << "plan_trajectory: time " << t << " outside [0, " << plan.horizon << "] or bad agent";
    throw Error(ErrorCode::OutOfRange, os.str());
  }
  const AgentPlan& a = plan.agents[i];
  if (a.in_window(t)) return a.segment_point(t);
  if (t < a.entry_time) return flow(field, a.start, t, step);
  return flow(field, a.target, t - plan.horizon, step);
}

std::vector<MatX> sample_trajectories(const ControlPlan& plan, const VectorField& field,
                                      std::span<const double> times, double step) {
  const Index m = static_cast<Index>(times.size());
  std::vector<MatX> out;
  for (const AgentPlan& a : plan.agents) {
    MatX z(a.start.size(), m);
    // Forward march through the first phase.
    VecX x = a.start;
    double t_prev = 0.0;
    for (Index k = 0; k < m && times[k] < a.entry_time; ++k) {
      x = flow(field, x, times[k] - t_prev, step);
      t_prev = times[k];
      z.col(k) = x;
    }
    // Backward march through the last phase.
    x = a.target;
    t_prev = plan.horizon;
    for (Index k = m - 1; k >= 0 && times[k] > a.exit_time; --k) {
      x = flow(field, x, times[k] - t_prev, step);
      t_prev = times[k];
      z.col(k) = x;
    }
    for (Index k = 0; k < m; ++k) {
      if (a.in_window(times[k])) z.col(k) = a.segment_point(times[k]);
    }
    out.push_back(std::move(z));
  }
  return out;
}

Radii compute_radii(const ControlPlan& plan, const VectorField& field, const ConvexRegion& region,
                    int samples) {
  const Index n = plan.size();
  if (n >= 2 && !(plan.min_separation > 0.0)) {
    throw Error(ErrorCode::RadiiDegenerate,
                "straight segments intersect; no disjoint control tubes exist");
  }
  samples = std::max(samples, 2);
  std::vector<double> grid(samples);
  std::vector<double> staggered(samples - 1);
  for (int k = 0; k < samples; ++k) grid[k] = plan.horizon * k / (samples - 1);
  for (int k = 0; k + 1 < samples; ++k) staggered[k] = 0.5 * (grid[k] + grid[k + 1]);

  const auto z = sample_trajectories(plan, field, grid, plan.step);

  VecX clearance(n);
  VecX neighbour = VecX::Constant(n, std::numeric_limits<double>::infinity());
  for (Index i = 0; i < n; ++i) {
    const AgentPlan& a = plan.agents[i];
    // Clearance is concave along a segment, so its endpoints bound it.
    clearance(i) = std::min(region.clearance(a.entry_point), region.clearance(a.exit_point));
    for (int k = 0; k < samples; ++k) {
      if (a.in_window(grid[k])) clearance(i) = std::min(clearance(i), region.clearance(z[i].col(k)));
    }
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      neighbour(i) = std::min(neighbour(i), (z[i] - z[j]).colwise().norm().minCoeff());
    }
  }

  Radii radii;
  radii.outer.resize(n);
  for (Index i = 0; i < n; ++i) {
    radii.outer(i) = 0.45 * std::min(clearance(i), 0.5 * neighbour(i));
  }
  radii.inner = 0.5 * radii.outer;

  const auto zs = sample_trajectories(plan, field, staggered, plan.step);
  for (int round = 0;; ++round) {
    if (radii.outer.size() > 0 && !(radii.outer.minCoeff() >= kMinRadius)) {
      std::ostringstream os;
      os << "control tube radius fell below " << kMinRadius;
      throw Error(ErrorCode::RadiiDegenerate, os.str());
    }
    std::vector<char> violating(n, false);
    for (Index i = 0; i < n; ++i) {
      const AgentPlan& a = plan.agents[i];
      for (std::size_t k = 0; k < staggered.size(); ++k) {
        if (a.in_window(staggered[k]) &&
            region.clearance(zs[i].col(k)) + region.boundary_tol() < radii.outer(i)) {
          violating[i] = true;
        }
      }
      for (Index j = i + 1; j < n; ++j) {
        const double gap = (zs[i] - zs[j]).colwise().norm().minCoeff();
        if (!(gap > radii.outer(i) + radii.outer(j))) violating[i] = violating[j] = true;
      }
    }
    if (std::none_of(violating.begin(), violating.end(), [](char v) { return v; })) break;
    if (round == kMaxShrinks) {
      throw Error(ErrorCode::RadiiDegenerate,
                  "control tubes still overlap or leave the region after shrinking");
    }
    for (Index i = 0; i < n; ++i) {
      if (violating[i]) {
        radii.outer(i) *= 0.5;
        radii.inner(i) *= 0.5;
      }
    }
  }
  return radii;
}

double bump(double rho, double inner, double outer) {
  if (rho <= inner) return 1.0;
  if (rho >= outer) return 0.0;
  const double s = (rho - inner) / (outer - inner);
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

namespace {

// Control from a single agent's tube, or nullopt when x is outside its ball.
std::optional<VecX> tube_control(const AgentPlan& a, const VecX& x, double t,
                                 const VectorField& field) {
  const double rho = (x - a.segment_point(t)).norm();
  if (!(rho < a.outer_radius)) return std::nullopt;
  return VecX((a.velocity - field(x)) * bump(rho, a.inner_radius, a.outer_radius));
}

}  // namespace

VecX eval_control(const ControlPlan& plan, const VecX& x, double t, const VectorField& field) {
  for (const AgentPlan& a : plan.agents) {
    if (!a.in_window(t)) continue;
    if (auto u = tube_control(a, x, t, field)) return *u;
  }
  return VecX::Zero(x.size());
}

double control_bound(const ControlPlan& plan, const VectorField& field) {
  // |w - v(x)| is convex along the segment, so its endpoints bound it; the
  // ball adds at most L_v R.
  const double lip = field.lipschitz_constant();
  double bound = 0.0;
  for (const AgentPlan& a : plan.agents) {
    if (!(a.outer_radius > 0.0)) continue;
    const double ends = std::max((a.velocity - field(a.entry_point)).norm(),
                                 (a.velocity - field(a.exit_point)).norm());
    bound = std::max(bound, ends + lip * a.outer_radius);
  }
  return bound;
}

SimulationResult simulate(const ControlPlan& plan, const Configuration& config0,
                          const Configuration& target, const VectorField& field,
                          const ConvexRegion& region, double step, int output_stride) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulation step must be positive");
  if (config0.size() != plan.size()) {
    throw Error(ErrorCode::SizeMismatch, "plan and initial configuration differ in size");
  }
  output_stride = std::max(output_stride, 1);
  const double T = plan.horizon;

  std::vector<double> breaks{0.0, T};
  for (const AgentPlan& a : plan.agents) {
    for (double b : {a.entry_time, a.exit_time}) {
      if (b > 0.0 && b < T) breaks.push_back(b);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return b - a <= 1e-12; }),
               breaks.end());
  breaks.back() = T;

  SimulationResult result;
  MatX x = config0.points;
  result.times.push_back(0.0);
  result.samples.push_back(x);

  std::vector<const AgentPlan*> active;
  const auto velocity = [&](const VecX& p, double t) -> VecX {
    VecX vel = field(p);
    if (!region.contains(p, Membership::Open)) return vel;
    for (const AgentPlan* a : active) {
      if (auto u = tube_control(*a, p, t, field)) {
        result.control_sup_norm = std::max(result.control_sup_norm, u->norm());
        return vel + *u;
      }
    }
    return vel;
  };

  long long global_step = 0;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double lo = breaks[b];
    const double hi = breaks[b + 1];
    const double mid = 0.5 * (lo + hi);
    active.clear();
    for (const AgentPlan& a : plan.agents) {
      if (a.in_window(mid) && a.outer_radius > 0.0) active.push_back(&a);
    }
    const auto m = std::max<long long>(1, static_cast<long long>(std::ceil((hi - lo) / step - 1e-9)));
    const double h = (hi - lo) / static_cast<double>(m);
    for (long long k = 0; k < m; ++k) {
      const double t = lo + h * static_cast<double>(k);
      for (Index i = 0; i < x.cols(); ++i) {
        const VecX p = x.col(i);
        const VecX k1 = velocity(p, t);
        const VecX k2 = velocity(p + 0.5 * h * k1, t + 0.5 * h);
        const VecX k3 = velocity(p + 0.5 * h * k2, t + 0.5 * h);
        const VecX k4 = velocity(p + h * k3, t + h);
        x.col(i) = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      if (!x.allFinite()) {
        throw Error(ErrorCode::IntegrationDiverged, "closed-loop simulation diverged");
      }
      ++global_step;
      const bool last = (b + 2 == breaks.size()) && (k + 1 == m);
      if (global_step % output_stride == 0 || last) {
        result.times.push_back(last ? T : lo + h * static_cast<double>(k + 1));
        result.samples.push_back(x);
      }
    }
  }

  result.final_configuration = Configuration(x);
  result.endpoint_error = configuration_distance(result.final_configuration, target).value;
  return result;
}

Configuration build_approx_targets(const VectorField& field, const Configuration& config1,
                                   const ConvexRegion& region, const HittingTimes& hitting,
                                   double epsilon, const FlowSettings& settings) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  constexpr int kMaxHalvings = 20;
  constexpr double kActiveTol = 1e-6;

  Configuration out = config1;
  for (Index i = 0; i < config1.size(); ++i) {
    const VecX x1 = config1.point(i);
    if (region.contains(x1, Membership::Open)) continue;
    if (!hitting.t1_bar[i]) {
      std::ostringstream os;
      os << "target " << i << " has no closure entry time";
      throw Error(ErrorCode::PerturbationFailed, os.str());
    }
    const double tb = *hitting.t1_bar[i];
    const VecX touch = flow(field, x1, -tb, settings.step, settings.working_box);

    // Inward direction: minus the average outward normal of the faces touched.
    VecX outward = VecX::Zero(x1.size());
    double nearest = -std::numeric_limits<double>::infinity();
    const HalfSpace<double>* nearest_face = nullptr;
    for (const auto& h : region.halfspaces()) {
      const double g = h.normal.dot(touch) - h.offset;
      if (g >= -kActiveTol) outward += h.normal;
      if (g > nearest) {
        nearest = g;
        nearest_face = &h;
      }
    }
    if (outward.norm() < 1e-12) outward = nearest_face->normal;
    const VecX inward = -outward.normalized();

    bool done = false;
    double eta = epsilon / 4.0;
    for (int attempt = 0; attempt <= kMaxHalvings && !done; ++attempt, eta *= 0.5) {
      const VecX pushed = touch + eta * inward;
      const VecX y1 = flow(field, pushed, tb, settings.step, settings.working_box);
      const VecX back = flow(field, y1, -tb, settings.step, settings.working_box);
      if ((y1 - x1).norm() <= epsilon && region.contains(back, Membership::Open)) {
        out.points.col(i) = y1;
        done = true;
      }
    }
    if (!done) {
      std::ostringstream os;
      os << "could not perturb target " << i << " into a point whose backward trajectory "
         << "enters the open region within epsilon " << epsilon;
      throw Error(ErrorCode::PerturbationFailed, os.str());
    }
  }
  return out;
}

CaratheodoryReport verify_caratheodory(const ControlPlan& plan, const VectorField& field,
                                       const ConvexRegion& region, int samples,
                                       std::uint64_t seed) {
  CaratheodoryReport report;
  std::vector<Index> tubes;
  for (Index i = 0; i < plan.size(); ++i) {
    const AgentPlan& a = plan.agents[i];
    if (a.outer_radius > 0.0 && a.exit_time > a.entry_time) tubes.push_back(i);
  }
  if (tubes.empty() || samples <= 0) return report;

  const double lip = field.lipschitz_constant();
  for (Index i : tubes) {
    const AgentPlan& a = plan.agents[i];
    report.lipschitz_budget = std::max(
        report.lipschitz_budget,
        lip + 1.875 * plan.control_bound / (a.outer_radius - a.inner_radius));
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, tubes.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index d = plan.dimension();
  const auto direction = [&] {
    VecX dir(d);
    for (Index k = 0; k < d; ++k) dir(k) = gauss(rng);
    return VecX(dir.normalized());
  };
  const auto masked = [&](const VecX& x, double t) {
    if (!region.contains(x, Membership::Open)) return VecX(VecX::Zero(d));
    return eval_control(plan, x, t, field);
  };

  for (int s = 0; s < samples; ++s) {
    const AgentPlan& a = plan.agents[tubes[pick(rng)]];
    const double t = a.entry_time + unit(rng) * (a.exit_time - a.entry_time);
    const VecX x = a.segment_point(t) + direction() * (1.2 * a.outer_radius * unit(rng));
    const VecX u = masked(x, t);
    report.sup_norm = std::max(report.sup_norm, u.norm());

    const double dist = a.outer_radius * (1e-4 + 0.25 * unit(rng));
    const VecX x2 = x + dist * direction();
    const double ratio = (masked(x2, t) - u).norm() / (x2 - x).norm();
    report.max_lipschitz_ratio = std::max(report.max_lipschitz_ratio, ratio);
  }
  report.bounded = report.sup_norm <= plan.control_bound + 1e-9;
  report.lipschitz = std::isfinite(report.max_lipschitz_ratio) &&
                     report.max_lipschitz_ratio <= report.lipschitz_budget * (1.0 + 1e-6) + 1e-12;
  return report;
}

}  // namespace crowdctl
