#pragma once

#include "crowdctl/types.hpp"

namespace crowdctl {

inline constexpr double kInfiniteCost = 1e18;

/// Square cost matrix with forbidden entries. Forbidden entries hold the
/// kInfiniteCost sentinel in `values` and are flagged in `forbidden`.
struct CostMatrix {
  MatX values;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> forbidden;

  CostMatrix() = default;
  explicit CostMatrix(const MatX& finite_values)
      : values(finite_values),
        forbidden(Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
            finite_values.rows(), finite_values.cols(), false)) {}

  Index size() const { return values.rows(); }
  bool is_infinite(Index i, Index j) const { return forbidden(i, j); }
  void forbid(Index i, Index j) {
    values(i, j) = kInfiniteCost;
    forbidden(i, j) = true;
  }
};

struct Assignment {
  Permutation permutation;  // row i -> column permutation[i]
  double total_cost;
};

double assignment_cost(const CostMatrix& cost, const Permutation& perm);

/// Min-sum assignment by the Hungarian algorithm (O(n^3)), followed by a pass
/// that picks the lexicographically smallest permutation among the optima.
/// Throws InfeasibleAssignment if every permutation uses a forbidden entry.
Assignment solve_assignment(const CostMatrix& cost);

/// Enumerates all n! permutations; lexicographically smallest optimum. n <= 10.
Assignment exhaustive_assignment(const CostMatrix& cost);

}  // namespace crowdctl
