#include "mixmerge/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixmerge {

void RiskParams::validate() const {
  if (!(T_cr_same > 0.0)) throw std::invalid_argument("T_cr_same must be > 0");
  if (!(T_cr_neighbor > 0.0)) throw std::invalid_argument("T_cr_neighbor must be > 0");
  if (!(v_tilde >= 0.0)) throw std::invalid_argument("v_tilde must be >= 0");
}

std::optional<double> time_to_conflict_same(double p_i, double v_i, double p_k, double v_k,
                                            double d_min) {
  const double closing = v_i - v_k;
  if (!(closing > 0.0)) return std::nullopt;
  return std::max(0.0, (p_k - p_i - d_min) / closing);
}

std::optional<double> time_to_conflict_neighbor(double p_i, double v_i, double p_k, double v_k,
                                                double d_min) {
  if (!(v_i > 0.0) || !(v_k > 0.0)) return std::nullopt;
  return std::abs((-p_i - d_min) / v_i - (-p_k - d_min) / v_k);
}

bool should_replan(const ConflictMetrics& metrics, double v_i, bool in_merging_zone,
                   const RiskParams& params) {
  if (metrics.T_same && *metrics.T_same < params.T_cr_same) return true;
  if (in_merging_zone && metrics.T_neighbor && *metrics.T_neighbor < params.T_cr_neighbor)
    return true;
  return v_i < params.v_tilde;
}

}  // namespace mixmerge
