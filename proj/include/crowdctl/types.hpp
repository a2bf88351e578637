#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <limits>
#include <optional>
#include <vector>

namespace crowdctl {

using Index = Eigen::Index;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Box = Eigen::AlignedBox<Scalar, Eigen::Dynamic>;

using VecX = Vec<double>;
using MatX = Mat<double>;
using BoxX = Box<double>;

/// Agent labels are zero-based. `perm[i]` is the target index assigned to agent i.
using Permutation = std::vector<int>;

/// n labelled points in R^d, stored one point per column (d x n).
struct Configuration {
  MatX points;

  Configuration() = default;
  explicit Configuration(MatX pts) : points(std::move(pts)) {}

  Index dimension() const { return points.rows(); }
  Index size() const { return points.cols(); }
  auto point(Index i) const { return points.col(i); }
};

/// Smallest distance between two distinct points; +inf for fewer than two points.
inline double min_pairwise_distance(const Configuration& config) {
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < config.size(); ++i) {
    for (Index j = i + 1; j < config.size(); ++j) {
      best = std::min(best, (config.point(i) - config.point(j)).norm());
    }
  }
  return best;
}

inline bool is_disjoint(const Configuration& config) {
  return min_pairwise_distance(config) > 0.0;
}

/// Largest distance between any two points of the union of both configurations.
inline double scene_diameter(const Configuration& a, const Configuration& b) {
  MatX all(a.dimension(), a.size() + b.size());
  all << a.points, b.points;
  double best = 0.0;
  for (Index i = 0; i < all.cols(); ++i) {
    for (Index j = i + 1; j < all.cols(); ++j) {
      best = std::max(best, (all.col(i) - all.col(j)).norm());
    }
  }
  return best;
}

}  // namespace crowdctl
