#include "crowdctl/minimal_time.hpp"

#include "crowdctl/assignment.hpp"
#include "crowdctl/error.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace crowdctl {

PairingResult sorted_pairing(std::span<const double> forward, std::span<const double> backward) {
  if (forward.size() != backward.size()) {
    throw Error(ErrorCode::SizeMismatch, "forward and backward time lists differ in length");
  }
  const std::size_t n = forward.size();
  std::vector<int> by_forward(n);
  std::vector<int> by_backward(n);
  std::iota(by_forward.begin(), by_forward.end(), 0);
  std::iota(by_backward.begin(), by_backward.end(), 0);
  std::stable_sort(by_forward.begin(), by_forward.end(),
                   [&](int a, int b) { return forward[a] < forward[b]; });
  std::stable_sort(by_backward.begin(), by_backward.end(),
                   [&](int a, int b) { return backward[a] > backward[b]; });

  PairingResult out{0.0, Permutation(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.pairing[by_forward[k]] = by_backward[k];
    out.value = std::max(out.value, forward[by_forward[k]] + backward[by_backward[k]]);
  }
  return out;
}

PairingResult brute_force_minimal_time(std::span<const double> forward,
                                       std::span<const double> backward) {
  if (forward.size() != backward.size()) {
    throw Error(ErrorCode::SizeMismatch, "forward and backward time lists differ in length");
  }
  const auto n = static_cast<Index>(forward.size());
  if (n > kBruteForceMaxN) {
    std::ostringstream os;
    os << "brute-force oracle is limited to n <= " << kBruteForceMaxN << " (got " << n << ")";
    throw Error(ErrorCode::TooLargeN, os.str());
  }
  Permutation perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  PairingResult best{std::numeric_limits<double>::infinity(), perm};
  do {
    double worst = 0.0;
    for (Index i = 0; i < n; ++i) worst = std::max(worst, forward[i] + backward[perm[i]]);
    if (worst < best.value) best = {worst, perm};
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (n == 0) best.value = 0.0;
  return best;
}

MinimalTimeReport minimal_time_from_hitting(const HittingTimes& hitting, ControlMode mode) {
  MinimalTimeReport report;
  report.mode = mode;
  report.hitting = hitting;

  const auto& backward = mode == ControlMode::Exact ? hitting.t1 : hitting.t1_bar;
  const Index n = hitting.size();
  std::vector<double> fwd(n);
  std::vector<double> bwd(n);
  for (Index i = 0; i < n; ++i) {
    if (!hitting.t0[i] || !backward[i]) {
      report.feasible = false;
      return report;
    }
    fwd[i] = *hitting.t0[i];
    bwd[i] = *backward[i];
  }

  const PairingResult pairing = sorted_pairing(fwd, bwd);
  report.feasible = true;
  report.infimum_time = pairing.value;
  report.pairing = pairing.pairing;

  double threshold = 0.0;
  for (Index i = 0; i < n; ++i) threshold = std::max({threshold, fwd[i], bwd[i]});
  report.actuation_threshold = threshold;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fwd[a] < fwd[b]; });
  for (int i : order) {
    report.forward_times_sorted.push_back(fwd[i]);
    report.backward_times_sorted.push_back(bwd[report.pairing[i]]);
  }
  return report;
}

MinimalTimeReport exact_minimal_time(const VectorField& field, const Configuration& config0,
                                     const Configuration& config1, const ConvexRegion& region,
                                     const FlowSettings& settings) {
  return minimal_time_from_hitting(
      configuration_hitting_times(field, config0, config1, region, settings), ControlMode::Exact);
}

MinimalTimeReport approx_minimal_time(const VectorField& field, const Configuration& config0,
                                      const Configuration& config1, const ConvexRegion& region,
                                      const FlowSettings& settings) {
  return minimal_time_from_hitting(
      configuration_hitting_times(field, config0, config1, region, settings),
      ControlMode::Approximate);
}

ConfigDistance configuration_distance(const Configuration& config0,
                                      const Configuration& config1) {
  if (config0.size() != config1.size()) {
    throw Error(ErrorCode::SizeMismatch, "configurations have different sizes");
  }
  if (config0.dimension() != config1.dimension() && config0.size() > 0) {
    throw Error(ErrorCode::SizeMismatch, "configurations have different dimensions");
  }
  const Index n = config0.size();
  if (n == 0) return {0.0, {}};
  MatX cost(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) cost(i, j) = (config0.point(i) - config1.point(j)).norm();
  }
  const Assignment a = solve_assignment(CostMatrix(cost));
  return {a.total_cost / static_cast<double>(n), a.permutation};
}

std::string GeometricConditionReport::describe() const {
  std::ostringstream os;
  for (Index i : forward_blocked) {
    os << "agent " << i << ": forward trajectory never enters the control region\n";
  }
  for (Index j : backward_blocked) {
    os << "target " << j << ": backward trajectory never enters the control region\n";
  }
  return os.str();
}

GeometricConditionReport check_geometric_condition(const HittingTimes& hitting,
                                                   ControlMode mode) {
  const auto& backward = mode == ControlMode::Exact ? hitting.t1 : hitting.t1_bar;
  GeometricConditionReport report;
  for (Index i = 0; i < hitting.size(); ++i) {
    if (!hitting.t0[i]) report.forward_blocked.push_back(i);
    if (!backward[i]) report.backward_blocked.push_back(i);
  }
  return report;
}

GeometricConditionReport check_geometric_condition(const VectorField& field,
                                                   const Configuration& config0,
                                                   const Configuration& config1,
                                                   const ConvexRegion& region,
                                                   const FlowSettings& settings) {
  return check_geometric_condition(
      configuration_hitting_times(field, config0, config1, region, settings));
}

}  // namespace crowdctl
