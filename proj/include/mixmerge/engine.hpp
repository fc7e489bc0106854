#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixmerge/human.hpp"
#include "mixmerge/planner.hpp"
#include "mixmerge/predictor.hpp"
#include "mixmerge/risk.hpp"
#include "mixmerge/scenario.hpp"
#include "mixmerge/trajectory.hpp"

namespace mixmerge {

/// Invalid configuration; `field()` names the offending SimConfig field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Explicit arrival used instead of the random arrival process.
struct ScriptedArrival {
  double t = 0.0;
  Road road = Road::Main;
  VehicleClass cls = VehicleClass::HDV;
  double v0 = 0.0;
  std::optional<IdmParams> idm;  ///< HDV parameters; perturbed base if empty
};

struct SimConfig {
  Geometry geometry;
  ConstraintParams limits;
  NewellParams newell;
  RiskParams risk;
  IdmParams idm_base;
  double idm_perturbation = 0.3;
  double volume = 1500.0;      ///< total over both roads [veh/h]
  double penetration = 0.0;    ///< CAV fraction
  double arrival_speed_min = 22.0;
  double arrival_speed_max = 24.0;
  /// Per-road inter-arrival standard deviation [s]; half the mean when empty.
  std::optional<double> inter_arrival_stddev;
  double dt = 0.05;
  int total_vehicles = 1000;
  std::uint64_t seed = 1;
  bool replanning = true;
  double replan_cooldown = 0.5;
  double fallback_retry = 1.0;
  PlannerSettings planner;
  std::vector<ScriptedArrival> arrivals;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

struct StepRecord {
  double t = 0.0;
  int id = 0;
  VehicleClass cls = VehicleClass::HDV;
  Road road = Road::Main;
  double p = 0.0;
  double v = 0.0;
  double u = 0.0;
  std::optional<double> plan_epoch;
  bool replanned = false;
};

struct VehicleSummary {
  int id = 0;
  VehicleClass cls = VehicleClass::HDV;
  Road road = Road::Main;
  double t_entry = 0.0;
  double t_exit = 0.0;
  double travel_time = 0.0;
  double energy = 0.0;
  int replans = 0;
};

enum class EventKind { Plan, Replan, Infeasible, FallbackPlan, IdmBreakdown };
const char* to_string(EventKind k);

struct LogEvent {
  double t = 0.0;
  EventKind kind = EventKind::Plan;
  int id = 0;
  int other = 0;
  double value = 0.0;
};

struct SimLog {
  std::vector<StepRecord> records;       ///< ordered by (t, id)
  std::vector<VehicleSummary> summaries; ///< in exit order
  std::vector<LogEvent> events;
  int arrivals = 0;
  int replans = 0;
  bool completed = false;
  double end_time = 0.0;
};

struct PendingArrival {
  double t = 0.0;
  Road road = Road::Main;
  VehicleClass cls = VehicleClass::HDV;
  double v0 = 0.0;
  IdmParams idm;
};

/// Arrival schedule: two independent per-road streams at half the volume
/// each, merged and cut at total_vehicles. Scripted arrivals pass through.
std::vector<PendingArrival> generate_arrivals(const SimConfig& config);

struct IntegratedState {
  double p = 0.0;
  double v = 0.0;
};

/// Semi-implicit Euler: v' = clamp(v + u dt), then p' = p + v' dt.
IntegratedState integrate(double p, double v, double u, double dt, double v_floor,
                          double v_ceil);

/// Exact motion under constant u over dt. Planned CAVs use this with u taken
/// at the step midpoint, which keeps v exact and p second order along a cubic.
IntegratedState integrate_exact(double p, double v, double u, double dt);

class Simulation {
 public:
  explicit Simulation(SimConfig config);

  /// Advances the world by one dt: arrivals, planning, risk monitoring,
  /// control, integration, exits.
  void step();
  bool done() const;
  double time() const { return t_; }

  const Registry& registry() const { return registry_; }
  const SimLog& log() const { return log_; }
  SimLog take_log();

  /// Committed plan of a CAV, if any.
  const CubicTrajectory* plan_of(int id) const;

 private:
  struct Agent {
    IdmParams idm;
    std::optional<CubicTrajectory> plan;
    std::optional<double> plan_epoch;
    double last_plan = -1e300;
    double next_retry = 0.0;
    int replans = 0;
    double energy = 0.0;
    std::optional<double> last_power;  ///< v * max(0, u) at the previous record
  };

  void admit_arrivals();
  bool try_plan(int id, bool replan);
  ConflictMetrics conflict_metrics(int id) const;
  void monitor_and_replan(std::vector<int>& replanned);

  SimConfig config_;
  Registry registry_;
  std::deque<PendingArrival> pending_[2];
  std::map<int, Agent> agents_;
  SimLog log_;
  double t_ = 0.0;
  double horizon_ = 0.0;
};

SimLog run(const SimConfig& config);

}  // namespace mixmerge
