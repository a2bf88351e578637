#include "crowdctl/commands.hpp"

#include "crowdctl/assignment.hpp"
#include "crowdctl/pipeline.hpp"
#include "crowdctl/scenario.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace crowdctl {

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InfeasibleScenario:
      return 2;
    case ErrorCode::WaypointNotFound:
    case ErrorCode::InfeasibleAssignment:
    case ErrorCode::RadiiDegenerate:
    case ErrorCode::PerturbationFailed:
      return 3;
    case ErrorCode::VerificationFailed:
      return 4;
    default:
      return 1;
  }
}

ControlMode parse_mode(const std::string& name) {
  if (name == "exact") return ControlMode::Exact;
  if (name == "approx") return ControlMode::Approximate;
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + name + "' (expected exact|approx)");
}

std::pair<int, int> parse_sizes(const std::string& text) {
  const auto bad = [&]() -> std::pair<int, int> {
    throw Error(ErrorCode::InvalidArgument, "invalid size range '" + text + "' (expected a..b)");
  };
  try {
    const auto dots = text.find("..");
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const int n = std::stoi(text, &used);
      if (used != text.size()) return bad();
      return {n, n};
    }
    const std::string lo = text.substr(0, dots);
    const std::string hi = text.substr(dots + 2);
    const int a = std::stoi(lo, &used);
    if (used != lo.size()) return bad();
    const int b = std::stoi(hi, &used);
    if (used != hi.size() || a > b) return bad();
    return {a, b};
  } catch (const std::logic_error&) {
    return bad();
  }
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("none"); }

int report_error(const Error& e, std::ostream& err) {
  err << "error (" << to_string(e.code()) << "): " << e.what();
  if (e.code() == ErrorCode::WaypointNotFound) err << " (try --mode approx)";
  err << '\n';
  return exit_code(e.code());
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return report_error(e, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_min_time(const std::filesystem::path& path, ControlMode mode, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path);
    const HittingTimes hitting =
        configuration_hitting_times(s.field, s.initial, s.target, s.region, s.flow_settings());
    const MinimalTimeReport r = minimal_time_from_hitting(hitting, mode);

    out << "mode: " << (mode == ControlMode::Exact ? "exact" : "approx") << '\n';
    out << "agents: " << s.initial.size() << '\n';
    for (Index i = 0; i < hitting.size(); ++i) {
      out << "  " << i << ": t0=" << fmt(hitting.t0[i]) << " t0_bar=" << fmt(hitting.t0_bar[i])
          << " t1=" << fmt(hitting.t1[i]) << " t1_bar=" << fmt(hitting.t1_bar[i]) << '\n';
    }
    int status = 0;
    if (r.feasible) {
      out << "M = " << fmt(*r.infimum_time) << '\n';
      out << "M* = " << fmt(*r.actuation_threshold) << '\n';
      out << "pairing:";
      for (std::size_t i = 0; i < r.pairing.size(); ++i) out << ' ' << i << "->" << r.pairing[i];
      out << '\n';
    } else {
      err << "infeasible: geometric condition fails\n"
          << check_geometric_condition(hitting, mode).describe();
      status = exit_code(ErrorCode::InfeasibleScenario);
    }
    out << report_to_json(r).dump() << '\n';
    return status;
  });
}

int cmd_plan(const std::filesystem::path& path, ControlMode mode, std::optional<double> horizon,
             const std::filesystem::path& out_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path);
    const Synthesis syn = plan_control(s.field, s.initial, s.target, s.region, mode, horizon,
                                       s.planner_params());
    PlanFile file{scenario_hash(s), mode, syn.report, syn.plan};
    write_file_atomic(out_path, plan_file_to_json(file).dump(2) + "\n");

    out << "T = " << fmt(syn.plan.horizon) << '\n';
    out << "permutation:";
    for (int j : syn.plan.permutation) out << ' ' << j;
    out << '\n';
    out << "min_separation = " << fmt(syn.plan.min_separation) << '\n';
    out << "control_bound = " << fmt(syn.plan.control_bound) << '\n';
    out << "wrote " << out_path.string() << '\n';
    return 0;
  });
}

int cmd_simulate(const std::filesystem::path& path, const std::filesystem::path& plan_path,
                 const std::filesystem::path& out_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(path);
    const PlanFile file = plan_file_from_json(nlohmann::json::parse(read_file(plan_path)));
    const std::string hash = scenario_hash(s);
    if (file.scenario_hash != hash) {
      throw Error(ErrorCode::PlanMismatch, "plan was built for scenario " + file.scenario_hash +
                                               ", not " + hash);
    }
    if (file.plan.size() != s.initial.size()) {
      throw Error(ErrorCode::PlanMismatch, "plan and scenario differ in agent count");
    }
    const SimulationResult result = simulate(file.plan, s.initial, s.target, s.field, s.region,
                                             s.params.step, s.params.output_stride);
    write_file_atomic(out_path, trajectory_csv(result));
    std::filesystem::path summary_path = out_path;
    summary_path.replace_extension(".summary.json");
    write_file_atomic(summary_path, simulation_summary(file.plan, result).dump(2) + "\n");

    out << "endpoint_error = " << fmt(result.endpoint_error) << '\n';
    out << "control_sup_norm = " << fmt(result.control_sup_norm) << '\n';
    out << "wrote " << out_path.string() << " and " << summary_path.string() << '\n';
    return 0;
  });
}

namespace {

std::vector<double> uniform_times(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> dist(0.0, 10.0);
  std::vector<double> out(n);
  for (double& t : out) t = dist(rng);
  return out;
}

Configuration random_configuration(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  MatX pts(2, n);
  for (Index i = 0; i < n; ++i) pts.col(i) << dist(rng), dist(rng);
  return Configuration(pts);
}

// Brute force is n! per trial; the larger sizes get fewer trials.
int trials_for(int n, int trials) { return n <= 8 ? trials : std::max(1, trials / 20); }

SuiteResult sorted_vs_brute(int n, int trials, std::uint64_t seed) {
  SuiteResult r{"sorted-vs-brute", n};
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(n));
  for (int k = 0; k < trials_for(n, trials); ++k) {
    const auto fwd = uniform_times(rng, n);
    const auto bwd = uniform_times(rng, n);
    const double a = sorted_pairing(fwd, bwd).value;
    const double b = brute_force_minimal_time(fwd, bwd).value;
    (std::abs(a - b) <= 1e-12 ? r.passed : r.failed)++;
  }
  return r;
}

SuiteResult hungarian_vs_exhaustive(int n, int trials, std::uint64_t seed) {
  SuiteResult r{"hungarian-vs-exhaustive", n};
  std::mt19937_64 rng(seed * 1000033ULL + static_cast<std::uint64_t>(n));
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::bernoulli_distribution forbid(0.15);
  for (int k = 0; k < trials_for(n, trials); ++k) {
    MatX m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) m(i, j) = value(rng);
    CostMatrix cost(m);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (forbid(rng)) cost.forbid(i, j);
    std::optional<double> fast;
    std::optional<double> slow;
    try {
      fast = solve_assignment(cost).total_cost;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleAssignment) throw;
    }
    try {
      slow = exhaustive_assignment(cost).total_cost;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleAssignment) throw;
    }
    const bool ok = fast.has_value() == slow.has_value() &&
                    (!fast || std::abs(*fast - *slow) <= 1e-9 * std::max(1.0, std::abs(*slow)));
    (ok ? r.passed : r.failed)++;
  }
  return r;
}

SuiteResult distance_axioms(int n, int trials, std::uint64_t seed) {
  SuiteResult r{"distance-axioms", n};
  std::mt19937_64 rng(seed * 1000037ULL + static_cast<std::uint64_t>(n));
  for (int k = 0; k < trials; ++k) {
    const Configuration x = random_configuration(rng, n);
    const Configuration y = random_configuration(rng, n);
    const Configuration z = random_configuration(rng, n);
    Permutation relabel(n);
    std::iota(relabel.begin(), relabel.end(), 0);
    std::shuffle(relabel.begin(), relabel.end(), rng);
    MatX shuffled(2, n);
    for (Index i = 0; i < n; ++i) shuffled.col(i) = y.points.col(relabel[i]);

    const double xy = configuration_distance(x, y).value;
    const double yx = configuration_distance(y, x).value;
    const double xz = configuration_distance(x, z).value;
    const double yz = configuration_distance(y, z).value;
    const double xx = configuration_distance(x, x).value;
    const double xs = configuration_distance(x, Configuration(shuffled)).value;
    const bool ok = std::abs(xx) <= 1e-12 && xy > 0.0 && std::abs(xy - yx) <= 1e-9 &&
                    xz <= xy + yz + 1e-9 && std::abs(xs - xy) <= 1e-9;
    (ok ? r.passed : r.failed)++;
  }
  return r;
}

}  // namespace

std::vector<SuiteResult> run_checks(const CheckOptions& o) {
  if (o.min_n < 1) throw Error(ErrorCode::InvalidArgument, "sizes must be at least 1");
  if (o.max_n > kBruteForceMaxN) {
    throw Error(ErrorCode::TooLargeN, "oracle checks are limited to n <= " +
                                          std::to_string(kBruteForceMaxN) + ", got " +
                                          std::to_string(o.max_n));
  }
  if (o.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be positive");
  std::vector<SuiteResult> out;
  for (int n = o.min_n; n <= o.max_n; ++n) {
    out.push_back(sorted_vs_brute(n, o.trials, o.seed));
    out.push_back(hungarian_vs_exhaustive(n, o.trials, o.seed));
    if (n <= 6) out.push_back(distance_axioms(n, o.trials, o.seed));
  }
  return out;
}

int cmd_check(const CheckOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    int passed = 0;
    int failed = 0;
    for (const SuiteResult& r : run_checks(options)) {
      out << r.name << " n=" << r.n << ": " << r.passed << " passed, " << r.failed << " failed\n";
      passed += r.passed;
      failed += r.failed;
    }
    out << "total: " << passed << " passed, " << failed << " failed\n";
    return failed == 0 ? 0 : exit_code(ErrorCode::VerificationFailed);
  });
}

}  // namespace crowdctl
