#include <doctest.h>

#include <cmath>
#include <random>

#include "mixmerge/planner.hpp"
#include "oracles.hpp"

using namespace mixmerge;

namespace {

oracle::Limits to_oracle(const ConstraintParams& c) {
  return {c.u_min, c.u_max, c.v_min, c.v_max, c.t_min, c.d_min, c.t_h};
}

PlanRequest to_request(const oracle::Instance& in) {
  PlanRequest req;
  req.t_plan = in.t_plan;
  req.p = in.p;
  req.v = in.v;
  for (std::size_t k = 0; k < in.exits.size(); ++k)
    req.neighbor_exits.push_back({static_cast<int>(k) + 10, in.exits[k]});
  if (in.has_pred) req.predecessor = CubicTrajectory::affine(in.p_pred, in.v_pred, in.t_plan, in.pred_tf);
  return req;
}

PlanRequest simple(double p, double v) {
  PlanRequest req;
  req.p = p;
  req.v = v;
  return req;
}

}  // namespace

TEST_CASE("feasible time range examples") {
  ConstraintParams lim;
  CHECK(feasible_time_range(-300.0, 24.0, lim).lower == doctest::Approx(12.01).epsilon(1e-12));
  CHECK(feasible_time_range(-300.0, 25.0, lim).lower == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(feasible_time_range(-300.0, 24.0, lim).upper == doctest::Approx(6 * 12.01));
  CHECK(feasible_time_range(-1e-9, 10.0, lim).lower < 1e-9);
  // Slow start over a long zone hits the cap.
  CHECK(feasible_time_range(-300.0, 0.0, lim).upper <= 120.0);
  for (double v : {0.0, 3.0, 12.0, 24.9, 25.0, 27.0})
    for (double p : {-300.0, -75.0, -3.0})
      CHECK(feasible_time_range(p, v, lim).lower ==
            doctest::Approx(oracle::kinematic_min_time(p, v, lim.u_max, lim.v_max)).epsilon(1e-12));
}

TEST_CASE("no-conflict examples") {
  const double a[] = {7.9, 12.1};
  CHECK(check_no_conflict(10.0, a, 2.0));
  const double b[] = {9.0};
  CHECK_FALSE(check_no_conflict(10.0, b, 2.0));
  CHECK(check_no_conflict(10.0, {}, 2.0));
}

TEST_CASE("rear-end check on cruising pairs") {
  const auto ego = CubicTrajectory::affine(-300.0, 24.0, 0.0, 12.5);
  const auto far = CubicTrajectory::affine(-260.0, 24.0, 0.0, 260.0 / 24.0);
  CHECK_FALSE(check_rear_end(ego, far, 10.0, 1.0, 0.0, far.tf));
  const auto near = CubicTrajectory::affine(-270.0, 24.0, 0.0, 270.0 / 24.0);
  const auto hit = check_rear_end(ego, near, 10.0, 1.0, 0.0, near.tf);
  REQUIRE(hit);
  CHECK(*hit == 0.0);
}

TEST_CASE("rear-end violation time matches dense sampling") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int found = 0;
  for (int i = 0; i < 300; ++i) {
    const double tf = 10.0 + 4.0 * U(rng);
    const auto ego = solve_boundary({0.0, tf, -300.0, 20.0 + 4.0 * U(rng), 0.0, 0.0});
    const auto lead = CubicTrajectory::affine(-300.0 + 40.0 + 30.0 * U(rng), 18.0 + 6.0 * U(rng), 0.0, 30.0);
    const auto got = check_rear_end(ego, lead, 10.0, 1.0, 0.0, tf);
    auto g = [&](double t) {
      return lead.position(t) - ego.position(t) - 10.0 - ego.speed(t) + 1e-9;
    };
    const auto ref = oracle::first_negative(g, 0.0, tf, 1e-3);
    REQUIRE(got.has_value() == ref.has_value());
    if (got) {
      ++found;
      CHECK(*got <= *ref + 1e-9);
      CHECK(*got > *ref - 1e-3 - 1e-9);
    }
  }
  CHECK(found > 20);
}

TEST_CASE("grid step scales with the travel time") {
  PlannerSettings s;
  CHECK(grid_step(12.0, s) == doctest::Approx(0.1));
  CHECK(grid_step(2.0, s) == doctest::Approx(0.02));
  CHECK(grid_step(0.01, s) == doctest::Approx(1e-3));
}

TEST_CASE("empty roads give the unconstrained minimum") {
  const auto res = plan(simple(-300.0, 24.0));
  REQUIRE(res.feasible());
  // 450 / T - 12 <= 25 needs T >= 12.162; the 0.1 s grid from 12.01 lands on 12.21.
  CHECK(res.tf() == doctest::Approx(12.21).epsilon(1e-9));
  CHECK(res.blocking == PlanCheck::Bounds);

  ConstraintParams lim;
  oracle::Instance in;
  in.p = -300.0;
  in.v = 24.0;
  const auto ref = oracle::brute_force_plan(in, to_oracle(lim), 1e-3);
  REQUIRE(ref);
  CHECK(*ref == doctest::Approx(450.0 / 37.0).epsilon(1e-4));
  CHECK(res.tf() >= *ref - 1e-9);
  CHECK(res.tf() - *ref <= 0.1 + 1e-9);
}

TEST_CASE("a neighbour exit blocks a band") {
  auto req = simple(-300.0, 24.0);
  req.neighbor_exits.push_back({7, 12.21 + 1.0});
  const auto res = plan(req);
  REQUIRE(res.feasible());
  CHECK(res.tf() >= 15.21 - 1e-9);
  CHECK(res.tf() < 15.21 + 0.1);
  CHECK(res.blocking == PlanCheck::NoConflict);
}

TEST_CASE("vehicle at top speed cruises") {
  const auto res = plan(simple(-300.0, 25.0));
  REQUIRE(res.feasible());
  CHECK(res.tf() == doctest::Approx(12.0));
  CHECK(std::fabs(res.trajectory->a) < 1e-12);
  CHECK(std::fabs(res.trajectory->b) < 1e-12);
}

TEST_CASE("a window narrower than the grid step between two bands is found") {
  auto req = simple(-300.0, 24.0);
  // Bands (11.96, 15.96) and (16.0, 20.0) leave a 40 ms gap.
  req.neighbor_exits = {{1, 13.96}, {2, 18.0}};
  const auto res = plan(req);
  REQUIRE(res.feasible());
  CHECK(res.tf() > 15.96);
  CHECK(res.tf() < 16.0);
}

TEST_CASE("plan at the conflict point is infeasible") {
  CHECK_FALSE(plan(simple(0.0, 20.0)).feasible());
}

TEST_CASE("incumbent exit time is tried between grid points") {
  auto req = simple(-300.0, 24.0);
  req.incumbent_tf = 12.175;
  const auto res = plan(req);
  REQUIRE(res.feasible());
  CHECK(res.tf() == 12.175);
  // Out-of-window incumbents are ignored.
  req.incumbent_tf = 11.0;
  CHECK(plan(req).tf() == doctest::Approx(12.21));
}

TEST_CASE("planner properties on random instances") {
  ConstraintParams lim;
  const auto L = to_oracle(lim);
  std::mt19937_64 rng(29);
  int feasible = 0;
  for (int i = 0; i < 150; ++i) {
    const auto in = oracle::random_instance(rng, L);
    const auto req = to_request(in);
    const auto res = plan(req);
    const auto again = plan(req);
    CHECK(res.feasible() == again.feasible());
    if (!res.feasible()) continue;
    ++feasible;
    CHECK(res.tf() == again.tf());
    CHECK(res.iterations == again.iterations);

    const auto& tr = *res.trajectory;
    CHECK_FALSE(bounds_check(tr, lim));
    for (double e : in.exits) CHECK(std::fabs(tr.tf - e) >= lim.t_min - 1e-9);
    if (in.has_pred) {
      auto g = [&](double t) {
        return in.p_pred + in.v_pred * (t - in.t_plan) - tr.position(t) - lim.d_min -
               lim.t_h * tr.speed(t) + 1e-7;
      };
      CHECK_FALSE(oracle::first_negative(g, in.t_plan, std::min(tr.tf, in.pred_tf), 1e-3));
    }

    // No earlier grid point passes the independent checks.
    const double tl = oracle::kinematic_min_time(in.p, in.v, L.u_max, L.v_max);
    const double step = grid_step(tl, req.settings);
    for (double tf = in.t_plan + tl; tf < tr.tf - 1e-9; tf += step)
      CHECK_FALSE(oracle::candidate_ok(in, L, tf, 1e-3));

    // Another neighbour never makes the plan earlier.
    auto more = req;
    more.neighbor_exits.push_back({99, in.t_plan + tl + 3.0 * std::uniform_real_distribution<double>(0, 1)(rng)});
    const auto res2 = plan(more);
    if (res2.feasible()) CHECK(res2.tf() >= res.tf() - 1e-9);
  }
  CHECK(feasible > 100);
}
