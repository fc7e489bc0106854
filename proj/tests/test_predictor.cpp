#include <doctest.h>

#include <cmath>
#include <random>

#include "mixmerge/predictor.hpp"
#include "oracles.hpp"

using namespace mixmerge;

namespace {

const NewellParams kW{5.0};

CubicTrajectory cubic(double a, double b, double c, double d, double t0 = 0.0, double tf = 100.0) {
  return CubicTrajectory{a, b, c, d, 0.0, t0, tf};
}

}  // namespace

TEST_CASE("time shift behind an affine leader") {
  const auto lead = CubicTrajectory::affine(-100.0, 20.0, 0.0, 10.0);
  CHECK(solve_time_shift(-150.0, lead, 0.0, kW) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("time shift behind a stopped leader") {
  const auto lead = CubicTrajectory::affine(-50.0, 0.0, 0.0, 100.0);
  CHECK(solve_time_shift(-100.0, lead, 0.0, kW) == doctest::Approx(10.0).epsilon(1e-10));
}

TEST_CASE("time shift behind a cubic leader") {
  const auto lead = cubic(-0.03, 0.9, 24.0, -300.0);
  const double tau = solve_time_shift(-320.0, lead, 0.0, kW);
  const double ref = oracle::bisect(
      [&](double x) { return lead.position(-x) - 5.0 * x + 320.0; }, 0.0, 10.0);
  CHECK(tau == doctest::Approx(ref).epsilon(1e-9));
  CHECK(std::fabs(lead.position(-tau) - 5.0 * tau + 320.0) < 1e-9);
}

TEST_CASE("follower ahead of its leader is an ordering error") {
  const auto lead = CubicTrajectory::affine(-100.0, 20.0, 0.0, 10.0);
  CHECK_THROWS_AS(solve_time_shift(-90.0, lead, 0.0, kW), OrderingError);
  CHECK_THROWS_AS(solve_time_shift(-100.0, lead, 0.0, kW), OrderingError);
}

TEST_CASE("shift examples") {
  const auto s1 = shift_trajectory(cubic(0, 0, 20, -100), 2.0, kW);
  CHECK(s1.a == 0.0);
  CHECK(s1.b == 0.0);
  CHECK(s1.c == doctest::Approx(20.0));
  CHECK(s1.d == doctest::Approx(-150.0));

  const auto s2 = shift_trajectory(cubic(-0.03, 0.9, 24, -300), 1.0, kW);
  CHECK(s2.a == doctest::Approx(-0.03));
  CHECK(s2.b == doctest::Approx(0.99));
  CHECK(s2.c == doctest::Approx(22.11));
  CHECK(s2.d == doctest::Approx(-328.07));
  CHECK(s2.position(1.0) == doctest::Approx(-305.0));

  const auto lead = cubic(-0.03, 0.9, 24, -300);
  const auto s0 = shift_trajectory(lead, 0.0, kW);
  CHECK(s0.a == lead.a);
  CHECK(s0.b == lead.b);
  CHECK(s0.c == lead.c);
  CHECK(s0.d == lead.d);
  const auto tiny = shift_trajectory(lead, 1e-6, kW);
  CHECK(tiny.d == doctest::Approx(lead.d - 24e-6 - 5e-6).epsilon(1e-12));
}

TEST_CASE("exit time examples") {
  CHECK(*predicted_exit_time(cubic(0, 0, 20, -150)) == doctest::Approx(7.5).epsilon(1e-9));

  const auto shifted = shift_trajectory(cubic(-0.03, 0.9, 24, -300), 1.0, kW);
  const auto t = predicted_exit_time(shifted);
  REQUIRE(t);
  CHECK(*t == doctest::Approx(11.15).epsilon(1e-3));
  const auto lead = cubic(-0.03, 0.9, 24, -300);
  const double plus5 = oracle::bisect([&](double x) { return lead.position(x) - 5.0; }, 0.0, 20.0);
  CHECK(*t == doctest::Approx(plus5 + 1.0).epsilon(1e-9));

  CHECK(*predicted_exit_time(CubicTrajectory::affine(0.0, 10.0, 4.0, 10.0)) == 4.0);
  CHECK_FALSE(predicted_exit_time(CubicTrajectory::affine(-100.0, 0.0, 0.0, 10.0)));
  CHECK_FALSE(predicted_exit_time(CubicTrajectory::affine(-1000.0, 1.0, 0.0, 10.0)));
}

TEST_CASE("lone HDV and a follower of an affine leader") {
  Registry reg(Geometry{}, ConstraintParams{});
  reg.register_arrival({VehicleClass::HDV, Road::Main, 23.0}, 0.0);
  reg.at(1).p = -200.0;
  const auto none = [](int) -> const CubicTrajectory* { return nullptr; };
  const auto lone = predict_hdv(1, 0.0, reg, kW, none);
  CHECK_FALSE(lone.tau);
  REQUIRE(lone.predicted_exit);
  CHECK(*lone.predicted_exit == doctest::Approx(200.0 / 23.0).epsilon(1e-9));

  reg.at(1).p = -100.0;
  reg.at(1).v = 20.0;
  reg.register_arrival({VehicleClass::HDV, Road::Main, 20.0}, 1.0);
  reg.at(2).p = -150.0;
  const auto lead = CubicTrajectory::affine(-100.0, 20.0, 0.0, 5.0);
  const auto rec = predict_hdv(2, 0.0, reg, kW, [&](int id) { return id == 1 ? &lead : nullptr; });
  REQUIRE(rec.tau);
  CHECK(*rec.tau == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(*rec.predicted_exit == doctest::Approx(7.5).epsilon(1e-9));
}

TEST_CASE("chain of two HDVs composes two shifts") {
  Registry reg(Geometry{}, ConstraintParams{});
  reg.register_arrival({VehicleClass::CAV, Road::Main, 22.0}, 0.0);
  reg.at(1).p = -120.0;
  reg.register_arrival({VehicleClass::HDV, Road::Main, 22.0}, 1.0);
  reg.at(2).p = -170.0;
  reg.register_arrival({VehicleClass::HDV, Road::Main, 22.0}, 2.0);
  reg.at(3).p = -235.0;
  const double t_now = 3.0;
  const auto plan = solve_boundary({t_now, t_now + 6.0, -120.0, 22.0, 0.0, 0.0});
  const auto recs = predict_all(t_now, reg, kW, {{1, plan}});
  REQUIRE(recs.size() == 2);
  const auto& r2 = recs.at(2);
  const auto& r3 = recs.at(3);
  REQUIRE(r2.tau);
  REQUIRE(r3.tau);

  const auto direct = shift_trajectory(shift_trajectory(plan, *r2.tau, kW), *r3.tau, kW);
  for (double t = t_now; t < t_now + 15.0; t += 0.5) {
    CHECK(r3.trajectory.position(t) == doctest::Approx(direct.position(t)).epsilon(1e-12));
    // Two shifts equal one shift by the summed delay.
    const double tt = *r2.tau + *r3.tau;
    CHECK(r3.trajectory.position(t) ==
          doctest::Approx(plan.position(t - tt) - kW.w * tt).epsilon(1e-9));
  }
  CHECK(r2.trajectory.position(t_now) == doctest::Approx(-170.0).epsilon(1e-9));
  CHECK(r3.trajectory.position(t_now) == doctest::Approx(-235.0).epsilon(1e-9));
}

TEST_CASE("shift identity on random leaders") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto lead = cubic(0.02 * U(rng), 0.5 * U(rng), 20.0 + 5.0 * U(rng), -150.0 + 100.0 * U(rng));
    const double tau = 5.0 + 5.0 * U(rng) + 1e-6;
    const NewellParams w{3.0 + 2.0 * U(rng)};
    const auto f = shift_trajectory(lead, tau, w);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double t = 30.0 * k / 99.0;
      worst = std::max(worst, std::fabs(f.position(t) - (lead.position(t - tau) - w.w * tau)));
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("shift map is strictly decreasing and shifted exits come later") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    // Leader decelerating gently from v0 to a positive speed over 20 s.
    const double v0 = 10.0 + 15.0 * U(rng);
    const auto lead = solve_boundary({0.0, 20.0, -250.0 * U(rng) - 50.0, v0, 0.0, 0.0});
    if (oracle::sampled_range([&](double t) { return lead.speed(t); }, -10.0, 20.0, 0.01).first < 0)
      continue;
    for (int k = 0; k < 20; ++k) {
      const double tau = 10.0 * U(rng);
      CHECK(-lead.speed(10.0 - tau) - kW.w < 0.0);
    }
    const double tau = 0.1 + 3.0 * U(rng);
    auto shifted = shift_trajectory(lead, tau, kW);
    shifted.t0 = lead.t0;
    const auto te_lead = predicted_exit_time(lead);
    const auto te_shift = predicted_exit_time(shifted);
    REQUIRE(te_lead);
    if (te_shift) {
      CHECK(*te_shift >= *te_lead);
      CHECK(std::fabs(shifted.position(*te_shift)) < 1e-6);
    }
    CHECK(std::fabs(lead.position(*te_lead)) < 1e-6);
  }
}
