#pragma once

#include "crowdctl/flow.hpp"
#include "crowdctl/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crowdctl {

enum class ControlMode { Exact, Approximate };

/// Result of the sorted-pairing formula.
///
/// `pairing[i]` is the target index whose backward time is paired with
/// agent i's forward time. The sorted lists are the times in pairing order:
/// forward increasing, backward decreasing.
struct MinimalTimeReport {
  ControlMode mode = ControlMode::Exact;
  bool feasible = false;
  std::optional<double> infimum_time;
  std::optional<double> actuation_threshold;
  Permutation pairing;
  std::vector<double> forward_times_sorted;
  std::vector<double> backward_times_sorted;
  HittingTimes hitting;
};

struct PairingResult {
  double value;
  Permutation pairing;
};

/// min over permutations of max_i (forward[i] + backward[perm[i]]), computed by
/// pairing increasing forward times with decreasing backward times. Ties keep
/// the original index order.
PairingResult sorted_pairing(std::span<const double> forward, std::span<const double> backward);

/// Exhaustive min-max over all n! permutations. Returns the lexicographically
/// smallest optimal permutation. n is limited to 10.
PairingResult brute_force_minimal_time(std::span<const double> forward,
                                       std::span<const double> backward);

inline constexpr Index kBruteForceMaxN = 10;

/// Builds the report from precomputed hitting times. Exact mode uses open
/// backward entry times, approximate mode the closure ones.
MinimalTimeReport minimal_time_from_hitting(const HittingTimes& hitting, ControlMode mode);

MinimalTimeReport exact_minimal_time(const VectorField& field, const Configuration& config0,
                                     const Configuration& config1, const ConvexRegion& region,
                                     const FlowSettings& settings);

MinimalTimeReport approx_minimal_time(const VectorField& field, const Configuration& config0,
                                      const Configuration& config1, const ConvexRegion& region,
                                      const FlowSettings& settings);

/// Permutation-invariant distance: (1/n) min over matchings of the summed
/// Euclidean distances.
struct ConfigDistance {
  double value;
  Permutation matching;
};

ConfigDistance configuration_distance(const Configuration& config0, const Configuration& config1);

/// Agents whose free trajectories never reach the open region within the horizon.
struct GeometricConditionReport {
  std::vector<Index> forward_blocked;   // initial agents
  std::vector<Index> backward_blocked;  // target points
  bool satisfied() const { return forward_blocked.empty() && backward_blocked.empty(); }
  std::string describe() const;
};

/// Approximate mode judges the target side by closure entry.
GeometricConditionReport check_geometric_condition(const HittingTimes& hitting,
                                                   ControlMode mode = ControlMode::Exact);

GeometricConditionReport check_geometric_condition(const VectorField& field,
                                                   const Configuration& config0,
                                                   const Configuration& config1,
                                                   const ConvexRegion& region,
                                                   const FlowSettings& settings);

}  // namespace crowdctl
