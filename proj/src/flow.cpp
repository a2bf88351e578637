#include "crowdctl/flow.hpp"

#include "crowdctl/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace crowdctl {

namespace {

constexpr double kBisectionTol = 1e-9;
constexpr double kGoldenTol = 1e-12;

struct Sample {
  double t;
  VecX x;
  double g;  // region violation; <= 0 means inside
};

// Bisection between `outside` (violation > 0) and a time `inside_t` known to
// be inside. Positions are re-integrated from the outside sample.
double refine_entry(const VectorField& field, const ConvexRegion& region, Membership mode,
                    const Sample& outside, double inside_t, const FlowSettings& settings) {
  double lo = outside.t;
  double hi = inside_t;
  while (hi - lo > kBisectionTol) {
    const double mid = 0.5 * (lo + hi);
    const VecX x = flow(field, outside.x, mid - outside.t, settings.step, settings.working_box);
    if (region.contains(x, mode)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

std::optional<double> hitting_time(const VectorField& field, const VecX& x,
                                   const ConvexRegion& region, Direction direction,
                                   Membership mode, const FlowSettings& settings) {
  if (!(settings.t_max > 0.0) || !(settings.step > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "hitting_time needs t_max > 0 and step > 0");
  }
  if (region.contains(x, mode)) return 0.0;

  // Integrate the field whose forward flow is the requested direction.
  const VectorField active = direction == Direction::Forward ? field : field.reversed();
  const double h = settings.step;
  const auto violation = [&](const VecX& p) { return region.violation(p, mode); };

  Sample before{0.0, x, violation(x)};  // two samples back
  Sample current = before;
  bool have_before = false;

  const auto steps = static_cast<long long>(std::ceil(settings.t_max / h));
  for (long long k = 1; k <= steps; ++k) {
    const double t_next = std::min(static_cast<double>(k) * h, settings.t_max);
    VecX x_next = rk4_step(active, current.x, t_next - current.t);
    check_state(x_next, settings.working_box);
    const double g_next = violation(x_next);

    if (g_next <= 0.0) {
      return refine_entry(active, region, mode, current, t_next, settings);
    }

    // Grazing check: the violation dipped at `current`, so its minimum lies
    // in [before.t, t_next]. Only worth refining when the dip gets close.
    if (have_before && current.g < before.g && current.g <= g_next) {
      const double reach = std::max(before.g - current.g, g_next - current.g);
      if (current.g <= 4.0 * reach + region.boundary_tol()) {
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = before.t;
        double b = t_next;
        const auto g_at = [&](double t) {
          return violation(flow(active, before.x, t - before.t, h, settings.working_box));
        };
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double gc = g_at(c);
        double gd = g_at(d);
        while (b - a > kGoldenTol) {
          if (gc <= 0.0 || gd <= 0.0) break;
          if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g_at(c);
          } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g_at(d);
          }
        }
        const double t_min = gc <= gd ? c : d;
        if (std::min(gc, gd) <= 0.0) {
          return refine_entry(active, region, mode, before, t_min, settings);
        }
      }
    }

    before = std::move(current);
    current = Sample{t_next, std::move(x_next), g_next};
    have_before = true;
  }
  return std::nullopt;
}

HittingTimes configuration_hitting_times(const VectorField& field,
                                         const Configuration& config0,
                                         const Configuration& config1,
                                         const ConvexRegion& region,
                                         const FlowSettings& settings) {
  if (config0.size() != config1.size()) {
    throw Error(ErrorCode::SizeMismatch, "configurations have different sizes");
  }
  const Index n = config0.size();
  HittingTimes out;
  out.t0.resize(n);
  out.t0_bar.resize(n);
  out.t1.resize(n);
  out.t1_bar.resize(n);
  out.horizon = settings.t_max;

  // 4n independent searches; each writes its own slot.
  parallel_for(4 * n, [&](Index job) {
    const Index i = job / 4;
    switch (job % 4) {
      case 0:
        out.t0[i] = hitting_time(field, config0.point(i), region, Direction::Forward,
                                 Membership::Open, settings);
        break;
      case 1:
        out.t0_bar[i] = hitting_time(field, config0.point(i), region, Direction::Forward,
                                     Membership::Closure, settings);
        break;
      case 2:
        out.t1[i] = hitting_time(field, config1.point(i), region, Direction::Backward,
                                 Membership::Open, settings);
        break;
      default:
        out.t1_bar[i] = hitting_time(field, config1.point(i), region, Direction::Backward,
                                     Membership::Closure, settings);
        break;
    }
  });
  return out;
}

}  // namespace crowdctl
