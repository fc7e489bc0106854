#include "mixmerge/trajectory.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace mixmerge {

namespace {
// Absolute slack for bound comparisons; keeps exact cruise at v_max feasible.
constexpr double kBoundSlack = 1e-9;
}  // namespace

CubicTrajectory CubicTrajectory::affine(double p_ref, double v, double t_ref, double tf) {
  return CubicTrajectory{0.0, 0.0, v, p_ref, t_ref, t_ref, tf};
}

double CubicTrajectory::position(double t) const {
  const double s = t - origin;
  return ((a * s + b) * s + c) * s + d;
}

double CubicTrajectory::speed(double t) const {
  const double s = t - origin;
  return (3.0 * a * s + 2.0 * b) * s + c;
}

double CubicTrajectory::control(double t) const { return 6.0 * a * (t - origin) + 2.0 * b; }

KinematicState CubicTrajectory::eval(double t) const {
  return {position(t), speed(t), control(t)};
}

CubicTrajectory CubicTrajectory::rebased(double new_origin) const {
  // p(s + h) expanded in powers of s, h = new_origin - origin
  const double h = new_origin - origin;
  CubicTrajectory out = *this;
  out.origin = new_origin;
  out.a = a;
  out.b = 3.0 * a * h + b;
  out.c = (3.0 * a * h + 2.0 * b) * h + c;
  out.d = ((a * h + b) * h + c) * h + d;
  return out;
}

std::array<double, 4> CubicTrajectory::absolute_coefficients() const {
  const CubicTrajectory r = rebased(0.0);
  return {r.a, r.b, r.c, r.d};
}

CubicTrajectory solve_boundary(const BoundaryConditions& bc) {
  if (!(bc.tf > bc.t0)) throw std::invalid_argument("solve_boundary: tf must exceed t0");
  // In local time s = t - t0 the first two conditions pin d = p0 and c = v0;
  // the remaining pair
  //   a T^3 + b T^2 = pf - p0 - v0 T
  //   6 a T + 2 b   = uf
  // eliminates to a closed form.
  const double T = bc.tf - bc.t0;
  const double rhs = bc.pf - bc.p0 - bc.v0 * T;
  const double a = -(rhs - 0.5 * bc.uf * T * T) / (2.0 * T * T * T);
  const double b = 0.5 * bc.uf - 3.0 * a * T;
  return CubicTrajectory{a, b, bc.v0, bc.p0, bc.t0, bc.t0, bc.tf};
}

const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::ControlBelow: return "control_below";
    case BoundKind::ControlAbove: return "control_above";
    case BoundKind::SpeedBelow: return "speed_below";
    case BoundKind::SpeedAbove: return "speed_above";
  }
  return "?";
}

std::optional<BoundViolation> bounds_check(const CubicTrajectory& traj,
                                           const ConstraintParams& limits) {
  std::vector<double> points{traj.t0, traj.tf};
  if (traj.a != 0.0) {
    const double vertex = traj.origin - traj.b / (3.0 * traj.a);
    if (vertex > traj.t0 && vertex < traj.tf) points.push_back(vertex);
  }
  std::sort(points.begin(), points.end());

  for (double t : points) {
    const KinematicState s = traj.eval(t);
    // u is affine, so its extremes sit on the interval ends
    if (t == traj.t0 || t == traj.tf) {
      if (s.u < limits.u_min - kBoundSlack) return BoundViolation{BoundKind::ControlBelow, t, s.u};
      if (s.u > limits.u_max + kBoundSlack) return BoundViolation{BoundKind::ControlAbove, t, s.u};
    }
    if (s.v < limits.v_min - kBoundSlack) return BoundViolation{BoundKind::SpeedBelow, t, s.v};
    if (s.v > limits.v_max + kBoundSlack) return BoundViolation{BoundKind::SpeedAbove, t, s.v};
  }
  return std::nullopt;
}

}  // namespace mixmerge
