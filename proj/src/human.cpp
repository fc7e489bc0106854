#include "mixmerge/human.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mixmerge/rng.hpp"

namespace mixmerge {

void IdmParams::validate() const {
  if (!(v_bar > 0.0)) throw std::invalid_argument("idm.v_bar must be > 0");
  if (!(d_bar > 0.0)) throw std::invalid_argument("idm.d_bar must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("idm.T must be > 0");
  if (!(a > 0.0)) throw std::invalid_argument("idm.a must be > 0");
  if (!(b > 0.0)) throw std::invalid_argument("idm.b must be > 0");
}

double idm_free_accel(double v_k, const IdmParams& params) {
  const double r = v_k / params.v_bar;
  return params.a * (1.0 - r * r * r * r);
}

double idm_accel_raw(double v_k, double v_j, double gap, const IdmParams& params) {
  const double s_star = std::max(
      0.0, params.d_bar + v_k * params.T - v_k * (v_j - v_k) / (2.0 * std::sqrt(params.a * params.b)));
  const double q = s_star / gap;
  return idm_free_accel(v_k, params) - params.a * q * q;
}

double idm_accel(double v_k, double v_j, double gap, const IdmParams& params,
                 const ConstraintParams& limits) {
  if (!(gap > 0.0)) throw std::domain_error("idm_accel: non-positive gap");
  return std::clamp(idm_accel_raw(v_k, v_j, gap, params), limits.u_min, limits.u_max);
}

IdmParams perturb_params(const IdmParams& base, std::uint64_t seed, double width) {
  if (width == 0.0) return base;
  auto rng = make_stream(seed, "idm-perturbation");
  std::uniform_real_distribution<double> factor(1.0 - width, 1.0 + width);
  IdmParams out = base;
  out.v_bar *= factor(rng);
  out.d_bar *= factor(rng);
  out.T *= factor(rng);
  out.a *= factor(rng);
  out.b *= factor(rng);
  return out;
}

HdvCommand hdv_control(int id, const Registry& registry, const IdmParams& params) {
  const Vehicle& k = registry.at(id);
  const ConstraintParams& limits = registry.limits();
  HdvCommand cmd;
  cmd.leader = registry.predecessor(id, registry.in_merging_zone(id));
  if (!cmd.leader) {
    cmd.u = std::clamp(idm_free_accel(k.v, params), limits.u_min, limits.u_max);
    return cmd;
  }
  const Vehicle& j = registry.at(*cmd.leader);
  cmd.gap = j.p - k.p;
  if (!(*cmd.gap > 0.0)) {
    cmd.breakdown = true;
    cmd.u = limits.u_min;
    return cmd;
  }
  cmd.u = idm_accel(k.v, j.v, *cmd.gap, params, limits);
  return cmd;
}

}  // namespace mixmerge
