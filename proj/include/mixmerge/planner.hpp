#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mixmerge/scenario.hpp"
#include "mixmerge/trajectory.hpp"

namespace mixmerge {

struct PlannerSettings {
  double step = 0.1;            ///< exit-time grid spacing [s] ...
  double step_fraction = 0.01;  ///< ... shrunk to this fraction of t_lower when smaller
  double upper_factor = 6.0;    ///< t_upper = upper_factor * t_lower ...
  double upper_cap = 120.0;     ///< ... capped here [s]
};

struct NeighborExit {
  int id = 0;
  double t_exit = 0.0;
};

struct PlanRequest {
  int id = 0;
  double t_plan = 0.0;
  double p = 0.0;
  double v = 0.0;
  std::vector<NeighborExit> neighbor_exits;
  /// Same-road predecessor motion; its tf is the predecessor's exit time.
  std::optional<CubicTrajectory> predecessor;
  /// Exit time of the plan being replaced. It joins the grid as an extra
  /// candidate so a re-plan cannot lose its slot to grid misalignment.
  std::optional<double> incumbent_tf;
  ConstraintParams limits;
  PlannerSettings settings;
};

enum class PlanCheck { Bounds, NoConflict, RearEnd };
const char* to_string(PlanCheck c);

struct PlanResult {
  std::optional<CubicTrajectory> trajectory;  ///< empty: infeasible
  int iterations = 0;
  /// Check that rejected the grid point just before the returned one.
  std::optional<PlanCheck> blocking;

  bool feasible() const { return trajectory.has_value(); }
  double tf() const { return trajectory->tf; }
};

struct TravelTimeRange {
  double lower = 0.0;
  double upper = 0.0;
};

/// Travel-time window from the plan epoch: the lower end is the kinematic
/// minimum (full throttle up to v_max, then cruise).
TravelTimeRange feasible_time_range(double p, double v, const ConstraintParams& limits,
                                    const PlannerSettings& settings = {});

bool check_no_conflict(double tf, std::span<const double> neighbor_exits, double t_min);

/// Earliest time in [t_a, t_b] where
///   g(t) = p_pred(t) - p_ego(t) - d_min - t_h v_ego(t)
/// goes negative, or nullopt if it never does. g is a cubic, so this is
/// exact up to root-bracketing tolerance (1e-9 s).
std::optional<double> check_rear_end(const CubicTrajectory& ego, const CubicTrajectory& pred,
                                     double d_min, double t_h, double t_a, double t_b);

/// Grid spacing used for a plan whose minimal travel time is t_lower.
double grid_step(double t_lower, const PlannerSettings& settings);

/// Minimal-time exit search over tf = t_plan + t_lower + n * grid_step, with
/// the incumbent tf and the edges t_k +/- (t_min + 1 ms) of each neighbour band
/// merged in as extra candidates in time order.
PlanResult plan(const PlanRequest& req);

}  // namespace mixmerge
