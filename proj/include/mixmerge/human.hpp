#pragma once

#include <cstdint>
#include <optional>

#include "mixmerge/scenario.hpp"

namespace mixmerge {

/// Intelligent driver model parameters.
struct IdmParams {
  double v_bar = 23.0;  ///< desired speed [m/s]
  double d_bar = 10.0;  ///< desired stopping distance [m]
  double T = 2.0;       ///< desired time gap [s]
  double a = 1.0;       ///< maximum acceleration [m/s^2]
  double b = 1.5;       ///< comfortable deceleration [m/s^2]
  void validate() const;
};

struct DriverProfile {
  int id = 0;
  IdmParams params;
  std::uint64_t seed = 0;
};

/// Unclamped IDM acceleration toward a leader `gap` metres ahead. The
/// desired gap s* is floored at zero. Requires gap > 0.
double idm_accel_raw(double v_k, double v_j, double gap, const IdmParams& params);

/// Free-road IDM (spacing term dropped).
double idm_free_accel(double v_k, const IdmParams& params);

/// idm_accel_raw clamped to [u_min, u_max]. Throws std::domain_error if gap <= 0.
double idm_accel(double v_k, double v_j, double gap, const IdmParams& params,
                 const ConstraintParams& limits);

/// Multiplies every field by an independent U[1 - width, 1 + width] factor
/// drawn from the stream keyed by `seed`.
IdmParams perturb_params(const IdmParams& base, std::uint64_t seed, double width = 0.3);

struct HdvCommand {
  double u = 0.0;
  std::optional<int> leader;
  std::optional<double> gap;
  bool breakdown = false;  ///< gap <= 0: u_min applied
};

/// Control of an in-zone vehicle driven by IDM; inside the merging zone the
/// leader is the projected predecessor from either road.
HdvCommand hdv_control(int id, const Registry& registry, const IdmParams& params);

}  // namespace mixmerge
