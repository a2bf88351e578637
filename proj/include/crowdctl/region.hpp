#pragma once

#include "crowdctl/error.hpp"
#include "crowdctl/types.hpp"

#include <string>
#include <vector>

namespace crowdctl {

enum class Membership { Open, Closure };

template <typename Scalar>
struct HalfSpace {
  Vec<Scalar> normal;  // unit, outward
  Scalar offset;       // normal . x <= offset
};

/// Convex polyhedral region given as an intersection of half-spaces.
///
/// Open membership requires `interior_margin` clearance from every face;
/// closure membership tolerates `boundary_tol` of slack.
template <typename Scalar>
class ConvexRegionT {
 public:
  static constexpr double kDefaultInteriorMargin = 1e-7;
  static constexpr double kDefaultBoundaryTol = 1e-9;

  ConvexRegionT() = default;

  /// Normals must already be unit length (within 1e-12).
  explicit ConvexRegionT(std::vector<HalfSpace<Scalar>> halfspaces,
                         Scalar interior_margin = Scalar(kDefaultInteriorMargin),
                         Scalar boundary_tol = Scalar(kDefaultBoundaryTol))
      : halfspaces_(std::move(halfspaces)),
        interior_margin_(interior_margin),
        boundary_tol_(boundary_tol) {
    if (halfspaces_.empty()) {
      throw Error(ErrorCode::InvalidArgument, "region needs at least one half-space");
    }
    const Index d = halfspaces_.front().normal.size();
    for (const auto& h : halfspaces_) {
      if (h.normal.size() != d) {
        throw Error(ErrorCode::SizeMismatch, "half-space normals differ in dimension");
      }
      using std::abs;
      if (abs(h.normal.norm() - Scalar(1)) > Scalar(1e-12)) {
        throw Error(ErrorCode::InvalidArgument, "half-space normal is not unit length");
      }
    }
  }

  /// Rescales each (normal, offset) pair so that the normal has unit length.
  static ConvexRegionT normalized(std::vector<HalfSpace<Scalar>> halfspaces,
                                  Scalar interior_margin = Scalar(kDefaultInteriorMargin),
                                  Scalar boundary_tol = Scalar(kDefaultBoundaryTol)) {
    for (auto& h : halfspaces) {
      const Scalar n = h.normal.norm();
      if (!(n > Scalar(0))) {
        throw Error(ErrorCode::InvalidArgument, "half-space normal is zero");
      }
      h.normal /= n;
      h.offset /= n;
    }
    return ConvexRegionT(std::move(halfspaces), interior_margin, boundary_tol);
  }

  /// Axis-aligned box [lo, hi] as 2d half-spaces.
  static ConvexRegionT box(const Vec<Scalar>& lo, const Vec<Scalar>& hi,
                           Scalar interior_margin = Scalar(kDefaultInteriorMargin),
                           Scalar boundary_tol = Scalar(kDefaultBoundaryTol)) {
    std::vector<HalfSpace<Scalar>> hs;
    for (Index k = 0; k < lo.size(); ++k) {
      Vec<Scalar> n = Vec<Scalar>::Zero(lo.size());
      n(k) = Scalar(1);
      hs.push_back({n, hi(k)});
      hs.push_back({-n, -lo(k)});
    }
    return ConvexRegionT(std::move(hs), interior_margin, boundary_tol);
  }

  Index dimension() const { return halfspaces_.front().normal.size(); }
  const std::vector<HalfSpace<Scalar>>& halfspaces() const { return halfspaces_; }
  Scalar interior_margin() const { return interior_margin_; }
  Scalar boundary_tol() const { return boundary_tol_; }

  /// min_k (offset_k - normal_k . x); the distance to the boundary for interior points.
  template <typename Derived>
  Scalar clearance(const Eigen::MatrixBase<Derived>& x) const {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (const auto& h : halfspaces_) best = std::min(best, h.offset - h.normal.dot(x));
    return best;
  }

  /// Membership is equivalent to `violation(x, mode) <= 0`.
  template <typename Derived>
  Scalar violation(const Eigen::MatrixBase<Derived>& x, Membership mode) const {
    const Scalar slack = mode == Membership::Open ? interior_margin_ : -boundary_tol_;
    return slack - clearance(x);
  }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x, Membership mode) const {
    return violation(x, mode) <= Scalar(0);
  }

 private:
  std::vector<HalfSpace<Scalar>> halfspaces_;
  Scalar interior_margin_ = Scalar(kDefaultInteriorMargin);
  Scalar boundary_tol_ = Scalar(kDefaultBoundaryTol);
};

using ConvexRegion = ConvexRegionT<double>;

struct ChebyshevBall {
  VecX center;
  double radius;  // capped for unbounded regions
};

/// Largest inscribed ball, by linear programming. Returns nullopt for an empty region.
/// The radius is capped at `radius_cap` when the region is unbounded.
std::optional<ChebyshevBall> chebyshev_ball(const ConvexRegion& region,
                                            double radius_cap = 1e6);

/// Throws Validation unless the open interior holds a ball wider than the interior margin.
void check_nonempty_interior(const ConvexRegion& region);

}  // namespace crowdctl
