#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>

#include "mixmerge/scenario.hpp"
#include "mixmerge/trajectory.hpp"

namespace mixmerge {

struct NewellParams {
  double w = 5.0;  ///< backward wave speed [m/s]
  void validate() const;
};

/// Predicted motion of one vehicle, made at `made_at`. Free-flow predictions
/// (no leader, or a degraded leader relation) carry no tau.
struct PredictionRecord {
  int id = 0;
  CubicTrajectory trajectory;
  std::optional<double> tau;
  std::optional<double> predicted_exit;  ///< empty: no crossing within the horizon
  double made_at = 0.0;
};

class OrderingError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kPredictionHorizon = 120.0;

/// Solves p_leader(t_now - tau) - w tau = p_follower for tau > 0 by bracketed
/// bisection. Throws OrderingError when the follower is not behind the leader
/// or no bracket exists.
double solve_time_shift(double p_follower, const CubicTrajectory& leader, double t_now,
                        const NewellParams& params);

/// Follower trajectory p_k(t) = p_j(t - tau) - w tau, as coefficients.
CubicTrajectory shift_trajectory(const CubicTrajectory& leader, double tau,
                                 const NewellParams& params);

/// Smallest t >= traj.t0 with p(t) = 0, searched up to traj.t0 + horizon.
std::optional<double> predicted_exit_time(const CubicTrajectory& traj,
                                          double horizon = kPredictionHorizon);

/// Returns the trajectory a leader should be extrapolated along, or nullptr
/// when the leader has none yet.
using TrajectoryLookup = std::function<const CubicTrajectory*(int id)>;

/// Newell prediction of one vehicle. The leader is the projected predecessor
/// inside the merging zone and the same-road predecessor elsewhere.
PredictionRecord predict_hdv(int id, double t_now, const Registry& registry,
                             const NewellParams& params, const TrajectoryLookup& leader_trajectory);

/// Predicts every in-zone vehicle that has no committed plan, front to back,
/// so each leader is resolved before its followers. `planned` holds the
/// committed CAV trajectories keyed by id.
std::map<int, PredictionRecord> predict_all(double t_now, const Registry& registry,
                                            const NewellParams& params,
                                            const std::map<int, CubicTrajectory>& planned);

}  // namespace mixmerge
