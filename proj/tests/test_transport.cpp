#include "crowdctl/transport.hpp"

#include "crowdctl/minimal_time.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace crowdctl;
using gen::vec2;

namespace {

std::vector<double> present(const std::vector<std::optional<double>>& t) {
  std::vector<double> out;
  for (const auto& x : t) out.push_back(*x);
  return out;
}

struct Built {
  Waypoints waypoints;
  Assignment assignment;
};

Built build(const gen::RandomScenario& sc, double delta = 0.1) {
  const FlowSettings s;
  const auto r = exact_minimal_time(sc.field, sc.initial, sc.target, sc.region, s);
  REQUIRE(r.feasible);
  const double T = *r.infimum_time + delta;
  Built b;
  b.waypoints = choose_waypoints(sc.field, sc.initial, sc.target, sc.region, present(r.hitting.t0),
                                 present(r.hitting.t1), T, delta, s);
  b.assignment = solve_assignment(build_cost_matrix(b.waypoints));
  return b;
}

}  // namespace

TEST_CASE("entry waypoint sits delta/6 after the entry time") {
  const VectorField v = VectorField::constant(vec2(1.0, 0.0));
  const ConvexRegion box = ConvexRegion::box(vec2(-2.0, -1.5), vec2(0.0, 1.5));
  const Configuration c0(MatX(vec2(-3.0, 0.0)));
  const Configuration c1(MatX(vec2(1.0, 0.0)));
  const FlowSettings s;
  const auto r = exact_minimal_time(v, c0, c1, box, s);
  const Waypoints w = choose_waypoints(v, c0, c1, box, present(r.hitting.t0),
                                       present(r.hitting.t1), 2.1, 0.1, s);
  CHECK(std::abs(w.entry_times(0) - (1.0 + 0.1 / 6)) <= 1e-6);
  CHECK(std::abs(w.entry_points(0, 0) - (-2.0 + 0.1 / 6)) <= 1e-6);
  CHECK(std::abs(w.entry_points(1, 0)) <= 1e-12);
  CHECK(box.contains(w.entry_points.col(0), Membership::Open));
  CHECK(box.contains(w.exit_points.col(0), Membership::Open));
  CHECK(w.exit_time(0) > w.entry_times(0));
}

TEST_CASE("an agent already inside gets the waypoint at delta/6") {
  const VectorField v = VectorField::constant(vec2(1.0, 0.0));
  const ConvexRegion box = ConvexRegion::box(vec2(-2.0, -1.5), vec2(0.0, 1.5));
  const Configuration c0(MatX(vec2(-1.0, 0.0)));
  const Configuration c1(MatX(vec2(1.0, 0.0)));
  const std::vector<double> fwd{0.0};
  const std::vector<double> bwd{1.0};
  const Waypoints w = choose_waypoints(v, c0, c1, box, fwd, bwd, 1.1, 0.1, FlowSettings{});
  CHECK(w.entry_times(0) == doctest::Approx(0.1 / 6));
  CHECK(w.entry_points(0, 0) == doctest::Approx(-1.0 + 0.1 / 6));
}

TEST_CASE("a grazing exit side has no waypoint") {
  MatX a(2, 2);
  a << -0.1, -1.0, 1.0, -0.1;
  const VectorField v = VectorField::affine(a, VecX::Zero(2));
  const ConvexRegion box = ConvexRegion::box(vec2(-1.0, 1.0), vec2(1.0, 3.0));
  const Configuration c0(MatX(vec2(2.0, 0.0)));
  const Configuration c1(MatX(oracle::spiral_flow(-0.1, vec2(0.1, 1.0), 1.0)));
  FlowSettings s;
  const auto r = approx_minimal_time(v, c0, c1, box, s);
  REQUIRE(r.feasible);
  const std::vector<double> fwd{*r.hitting.t0[0]};
  const std::vector<double> bwd{*r.hitting.t1_bar[0]};
  try {
    choose_waypoints(v, c0, c1, box, fwd, bwd, *r.infimum_time + 0.1, 0.1, s);
    FAIL("expected WaypointNotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WaypointNotFound);
  }
}

TEST_CASE("cost matrix entries") {
  Waypoints w;
  w.entry_points = MatX(vec2(-2.0, 0.0));
  w.entry_times = VecX::Constant(1, 1.0);
  w.exit_points = MatX(vec2(0.0, 0.0));
  w.horizon = 2.0;
  w.exit_margins = VecX::Constant(1, 0.5);
  w.delta = 0.1;
  const CostMatrix k = build_cost_matrix(w);
  CHECK(k.values(0, 0) == doctest::Approx(std::sqrt(4.25)));
  CHECK_FALSE(k.is_infinite(0, 0));

  w.exit_margins(0) = 1.0;  // exit time equals entry time
  const CostMatrix forbidden = build_cost_matrix(w);
  CHECK(forbidden.is_infinite(0, 0));
  CHECK(forbidden.values(0, 0) == kInfiniteCost);

  w.exit_points = MatX(vec2(-2.0, 0.0));
  w.exit_margins(0) = 0.5;
  w.horizon = 1.5;
  w.entry_times(0) = 0.999;
  const CostMatrix near = build_cost_matrix(w);
  CHECK(near.values(0, 0) == doctest::Approx(0.001));
}

TEST_CASE("small assignment examples") {
  MatX diag(2, 2);
  diag << 1, 10, 10, 1;
  const Assignment a = solve_assignment(CostMatrix(diag));
  CHECK(a.permutation == Permutation{0, 1});
  CHECK(a.total_cost == 2.0);
  MatX anti(2, 2);
  anti << 10, 1, 1, 10;
  const Assignment b = solve_assignment(CostMatrix(anti));
  CHECK(b.permutation == Permutation{1, 0});
  CHECK(b.total_cost == 2.0);
}

TEST_CASE("ties resolve to the lexicographically smallest permutation") {
  MatX flat = MatX::Ones(4, 4);
  CHECK(solve_assignment(CostMatrix(flat)).permutation == Permutation{0, 1, 2, 3});
  MatX m(3, 3);
  m << 1, 1, 5,
       1, 1, 5,
       5, 5, 1;
  CHECK(solve_assignment(CostMatrix(m)).permutation == Permutation{0, 1, 2});
  m << 5, 1, 1,
       1, 5, 1,
       1, 1, 5;
  CHECK(solve_assignment(CostMatrix(m)).permutation == Permutation{1, 2, 0});
  CHECK(exhaustive_assignment(CostMatrix(m)).permutation == Permutation{1, 2, 0});
}

TEST_CASE("forbidden entries are avoided or reported") {
  MatX m(2, 2);
  m << 0, 0, 0, 0;
  CostMatrix k(m);
  k.forbid(0, 0);
  CHECK(solve_assignment(k).permutation == Permutation{1, 0});
  k.forbid(0, 1);
  try {
    solve_assignment(k);
    FAIL("expected InfeasibleAssignment");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleAssignment);
  }
}

TEST_CASE("Hungarian matches exhaustive search on random matrices") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::bernoulli_distribution forbid(0.2);
  for (int n = 1; n <= 7; ++n) {
    for (int k = 0; k < 60; ++k) {
      MatX m(n, n);
      std::vector<std::vector<bool>> mask(n, std::vector<bool>(n, false));
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = value(rng);
      CostMatrix cost(m);
      const bool with_forbidden = k % 2 == 1;
      if (with_forbidden) {
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j)
            if (forbid(rng)) {
              cost.forbid(i, j);
              mask[i][j] = true;
            }
      }
      const double expect = oracle::min_sum_assignment(m, mask);
      if (!std::isfinite(expect)) {
        CHECK_THROWS_AS(solve_assignment(cost), Error);
        continue;
      }
      const Assignment a = solve_assignment(cost);
      CHECK(std::abs(a.total_cost - expect) <= 1e-9);
      CHECK(std::abs(assignment_cost(cost, a.permutation) - a.total_cost) <= 1e-9);
      if (n <= 6) CHECK(a.permutation == exhaustive_assignment(cost).permutation);
    }
  }
}

TEST_CASE("crossed and straight pairings in one dimension") {
  // Agents enter at 0 (time 1) and 1 (time 0); exits at 3 (time 2) and 2 (time 3).
  const auto seg = [](double a, double ta, double b, double tb) {
    return Segment{VecX::Constant(1, a), ta, VecX::Constant(1, b), tb};
  };
  const std::vector<Segment> crossed{seg(0, 1, 3, 2), seg(1, 0, 2, 3)};
  CHECK(check_non_crossing(crossed) <= 1e-12);
  const std::vector<Segment> straight{seg(0, 1, 2, 3), seg(1, 0, 3, 2)};
  CHECK(check_non_crossing(straight) == doctest::Approx(2.0));
  const std::vector<Segment> one{seg(0, 0, 1, 1)};
  CHECK(std::isinf(check_non_crossing(one)));
}

TEST_CASE("crossing certificate matches dense sampling") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_real_distribution<double> time(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<Segment> segs;
    for (int i = 0; i < 2; ++i) {
      const double t0 = time(rng);
      segs.push_back({vec2(coord(rng), coord(rng)), t0, vec2(coord(rng), coord(rng)), t0 + 1.0});
    }
    const double lo = std::max(segs[0].t_from, segs[1].t_from);
    const double hi = std::min(segs[0].t_to, segs[1].t_to);
    const double certified = check_non_crossing(segs);
    if (lo > hi) {
      CHECK(std::isinf(certified));
      continue;
    }
    double sampled = oracle::kInf;
    for (int s = 0; s <= 2000; ++s) {
      const double t = lo + (hi - lo) * s / 2000.0;
      sampled = std::min(sampled, (segs[0].at(t) - segs[1].at(t)).norm());
    }
    CHECK(certified <= sampled + 1e-12);
    CHECK(certified >= sampled - 1e-3);
  }
}

TEST_CASE("optimal assignment is locally optimal and non-crossing") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto sc = gen::feasible_scenario(2 + static_cast<int>(seed % 5), seed % 2 == 1, seed);
    const Built b = build(sc);
    const CostMatrix k = build_cost_matrix(b.waypoints);
    const Permutation& p = b.assignment.permutation;
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = i + 1; j < p.size(); ++j) {
        Permutation q = p;
        std::swap(q[i], q[j]);
        CHECK(assignment_cost(k, q) >= b.assignment.total_cost - 1e-12);
      }
    }
    const SegmentBundle bundle = build_segments(b.waypoints, p);
    CHECK(check_non_crossing(bundle.segments) > 0.0);
    for (const Segment& s : bundle.segments) {
      for (int q = 1; q < 100; ++q) {
        const double t = s.t_from + (s.t_to - s.t_from) * q / 100.0;
        CHECK(sc.region.contains(s.at(t), Membership::Open));
      }
    }
  }
}

TEST_CASE("crossing scenario swaps the identity pairing") {
  const VectorField v = VectorField::constant(vec2(1.0, 0.0));
  const ConvexRegion box = ConvexRegion::box(vec2(-1.0, -1.0), vec2(1.0, 1.0));
  MatX a(2, 4);
  a << -2.0, -2.0, -3.0, -3.0,
        0.5, -0.5, 0.2, -0.2;
  MatX b(2, 4);
  b << 2.0, 2.0, 3.0, 3.0,
      -0.5, 0.5, -0.2, 0.2;
  gen::RandomScenario sc{v, box, Configuration(a), Configuration(b), false};
  const Built built = build(sc);
  CHECK(built.assignment.permutation != Permutation{0, 1, 2, 3});
  const SegmentBundle bundle = build_segments(built.waypoints, built.assignment.permutation);
  CHECK(check_non_crossing(bundle.segments) > 0.0);
}
