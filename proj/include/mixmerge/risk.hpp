#pragma once

#include <optional>

namespace mixmerge {

struct RiskParams {
  double T_cr_same = 3.0;
  double T_cr_neighbor = 2.0;
  double v_tilde = 12.5;
  void validate() const;
};

struct ConflictMetrics {
  std::optional<double> T_same;
  std::optional<double> T_neighbor;
};

/// Time until the gap to the same-road leader k shrinks to d_min; only
/// defined while the ego vehicle is closing in.
std::optional<double> time_to_conflict_same(double p_i, double v_i, double p_k, double v_k,
                                            double d_min);

/// Gap between the constant-speed conflict-point crossings of two vehicles on
/// neighboring roads. Undefined if either vehicle is stopped.
std::optional<double> time_to_conflict_neighbor(double p_i, double v_i, double p_k, double v_k,
                                                double d_min);

bool should_replan(const ConflictMetrics& metrics, double v_i, bool in_merging_zone,
                   const RiskParams& params);

}  // namespace mixmerge
