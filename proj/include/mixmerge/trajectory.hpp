#pragma once

#include <array>
#include <optional>

#include "mixmerge/scenario.hpp"

namespace mixmerge {

struct KinematicState {
  double p = 0.0;
  double v = 0.0;
  double u = 0.0;
};

/// Cubic position profile p(t) = a s^3 + b s^2 + c s + d with s = t - origin.
///
/// Coefficients are stored relative to a local time origin so that plans made
/// late in a long run stay well conditioned; absolute_coefficients() expands
/// them to the t = 0 origin. An affine trajectory is the a = b = 0 case.
/// [t0, tf] is the validity interval; evaluation outside it is extrapolation.
struct CubicTrajectory {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double origin = 0.0;
  double t0 = 0.0;
  double tf = 0.0;

  static CubicTrajectory affine(double p_ref, double v, double t_ref, double tf);

  double position(double t) const;
  double speed(double t) const;
  double control(double t) const;
  KinematicState eval(double t) const;

  std::array<double, 4> absolute_coefficients() const;
  /// Same curve, coefficients re-expressed around another origin.
  CubicTrajectory rebased(double new_origin) const;
};

struct BoundaryConditions {
  double t0 = 0.0;
  double tf = 0.0;
  double p0 = 0.0;
  double v0 = 0.0;
  double pf = 0.0;
  double uf = 0.0;
};

/// Energy-optimal unconstrained arc through the four boundary conditions
/// p(t0)=p0, v(t0)=v0, p(tf)=pf, u(tf)=uf. Throws std::invalid_argument if
/// tf <= t0.
CubicTrajectory solve_boundary(const BoundaryConditions& bc);

enum class BoundKind { ControlBelow, ControlAbove, SpeedBelow, SpeedAbove };
const char* to_string(BoundKind k);

struct BoundViolation {
  BoundKind kind;
  double t;
  double value;
};

/// Checks u and v against the limits over [t0, tf] analytically: u is affine
/// (endpoints suffice) and v is quadratic (endpoints plus its vertex).
/// Returns the earliest violating check point.
std::optional<BoundViolation> bounds_check(const CubicTrajectory& traj,
                                           const ConstraintParams& limits);

}  // namespace mixmerge
