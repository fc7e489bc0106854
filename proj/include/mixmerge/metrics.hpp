#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixmerge/engine.hpp"

namespace mixmerge {

class UndefinedMetric : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mean of (t_exit - t_entry) over exited vehicles. Throws UndefinedMetric
/// when nobody exited.
double average_travel_time(const SimLog& log);

/// (exits - 1) * 3600 / (last exit - first exit) in veh/h. Throws
/// UndefinedMetric with fewer than two exits or a zero-length window.
double output_flux(const SimLog& log);

struct EnergySample {
  double t = 0.0;
  double v = 0.0;
  double u = 0.0;
};

/// Trapezoidal integral of v * max(0, u) over time-ordered samples.
double energy_per_mass(std::span<const EnergySample> samples);

enum class ViolationKind {
  RearEnd,      ///< CAV follower breaks p_k - p_i >= d_min + t_h v_i
  MinDistance,  ///< any same-road pair closer than d_min
  Crossing,     ///< opposite-road crossings closer than t_min, at least one a CAV
  IdmBreakdown, ///< human model saw a non-positive gap
};
const char* to_string(ViolationKind k);

struct ViolationEvent {
  ViolationKind kind = ViolationKind::RearEnd;
  double t = 0.0;
  int id = 0;        ///< follower, or the later crossing
  int other = 0;     ///< leader, or the earlier crossing
  double magnitude = 0.0;  ///< deficit [m] or [s]
  double observed = 0.0;   ///< gap [m] or crossing gap [s]
};

struct SafetyReport {
  std::vector<ViolationEvent> events;

  std::size_t count(ViolationKind kind) const;
  /// Crossing events whose gap is below `threshold` seconds.
  std::size_t crossings_below(double threshold) const;
  /// MinDistance events whose gap is below `threshold` metres.
  std::size_t distances_below(double threshold) const;
};

/// Post-hoc scan of a log: every step for same-road deficits, every
/// opposite-road exit pair for crossing deficits.
SafetyReport safety_audit(const SimLog& log, const ConstraintParams& limits);

struct RunMetrics {
  double avg_travel_time = 0.0;
  double output_flux = 0.0;
  double mean_energy = 0.0;
  std::map<std::string, std::size_t> violations;
  int replans = 0;
  int vehicles = 0;
};

RunMetrics compute_run_metrics(const SimLog& log, const ConstraintParams& limits);

}  // namespace mixmerge
