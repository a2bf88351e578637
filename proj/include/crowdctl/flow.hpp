#pragma once

#include "crowdctl/error.hpp"
#include "crowdctl/field.hpp"
#include "crowdctl/region.hpp"
#include "crowdctl/types.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace crowdctl {

/// One classical Runge-Kutta step of size h.
template <typename Scalar, typename Derived>
Vec<Scalar> rk4_step(const VectorFieldT<Scalar>& field,
                     const Eigen::MatrixBase<Derived>& x, Scalar h) {
  const Vec<Scalar> k1 = field(x);
  const Vec<Scalar> k2 = field(x + (h / 2) * k1);
  const Vec<Scalar> k3 = field(x + (h / 2) * k2);
  const Vec<Scalar> k4 = field(x + h * k3);
  return x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

template <typename Scalar>
void check_state(const Vec<Scalar>& x, const std::optional<Box<Scalar>>& working_box) {
  if (!x.allFinite()) {
    throw Error(ErrorCode::IntegrationDiverged, "integration produced a non-finite state");
  }
  if (working_box && !working_box->contains(x)) {
    throw Error(ErrorCode::IntegrationDiverged, "trajectory left the working box");
  }
}

/// Flow map: RK4 approximation of the solution at signed time t.
///
/// Takes floor(|t|/step) full steps and one shortened step for the
/// remainder. Negative t integrates the reversed field.
template <typename Scalar, typename Derived>
Vec<Scalar> flow(const VectorFieldT<Scalar>& field, const Eigen::MatrixBase<Derived>& x0,
                 Scalar t, Scalar step,
                 const std::optional<Box<Scalar>>& working_box = std::nullopt) {
  using std::abs;
  using std::floor;
  if (!(step > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "flow step must be positive");
  if (!std::isfinite(static_cast<double>(t))) {
    throw Error(ErrorCode::InvalidArgument, "flow time must be finite");
  }
  Vec<Scalar> x = x0;
  if (t == Scalar(0)) return x;

  const VectorFieldT<Scalar> active = t < Scalar(0) ? field.reversed() : field;
  const Scalar duration = abs(t);
  const auto full_steps = static_cast<long long>(floor(duration / step));
  const Scalar remainder = duration - static_cast<Scalar>(full_steps) * step;
  for (long long k = 0; k < full_steps; ++k) {
    x = rk4_step(active, x, step);
    check_state(x, working_box);
  }
  if (remainder > Scalar(0)) {
    x = rk4_step(active, x, remainder);
    check_state(x, working_box);
  }
  return x;
}

enum class Direction { Forward, Backward };

/// Integration settings shared by every flow-based computation.
struct FlowSettings {
  double step = 1e-3;
  double t_max = 100.0;
  std::optional<BoxX> working_box;
};

/// First time t in [0, t_max] at which the forward (or backward) free
/// trajectory from x satisfies region membership in the given mode.
///
/// The trajectory is sampled every `step`. A membership transition between
/// two samples is refined by bisection to 1e-9. Local minima of the
/// region violation between samples are refined by golden-section search so
/// that a trajectory grazing the region between two samples is still caught.
std::optional<double> hitting_time(const VectorField& field, const VecX& x,
                                   const ConvexRegion& region, Direction direction,
                                   Membership mode, const FlowSettings& settings);

/// Entry times of every agent: forward from config0, backward from config1,
/// in both membership modes. Missing entries mean no hit within the horizon.
struct HittingTimes {
  std::vector<std::optional<double>> t0;      // forward, open
  std::vector<std::optional<double>> t0_bar;  // forward, closure
  std::vector<std::optional<double>> t1;      // backward, open
  std::vector<std::optional<double>> t1_bar;  // backward, closure
  double horizon = 0.0;

  Index size() const { return static_cast<Index>(t0.size()); }
};

HittingTimes configuration_hitting_times(const VectorField& field,
                                         const Configuration& config0,
                                         const Configuration& config1,
                                         const ConvexRegion& region,
                                         const FlowSettings& settings);

}  // namespace crowdctl
