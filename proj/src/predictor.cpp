#include "mixmerge/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mixmerge {

void NewellParams::validate() const {
  if (!(w > 0.0)) throw std::invalid_argument("w must be > 0");
}

double solve_time_shift(double p_follower, const CubicTrajectory& leader, double t_now,
                        const NewellParams& params) {
  auto residual = [&](double tau) {
    return leader.position(t_now - tau) - params.w * tau - p_follower;
  };
  if (!(residual(0.0) > 0.0)) throw OrderingError("follower is not behind its leader");

  double lo = 0.0;
  double hi = 1.0;
  constexpr double kMaxShift = 1e5;
  while (residual(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxShift) throw OrderingError("no time shift bracket found");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double r = residual(mid);
    if (r == 0.0) return mid;
    (r > 0.0 ? lo : hi) = mid;
  }
  return std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
}

CubicTrajectory shift_trajectory(const CubicTrajectory& leader, double tau,
                                 const NewellParams& params) {
  const double a = leader.a, b = leader.b, c = leader.c, d = leader.d;
  CubicTrajectory out = leader;
  out.a = a;
  out.b = b - 3.0 * a * tau;
  out.c = c + 3.0 * a * tau * tau - 2.0 * b * tau;
  out.d = d - a * tau * tau * tau + b * tau * tau - c * tau - params.w * tau;
  out.t0 = leader.t0 + tau;
  out.tf = leader.tf + tau;
  return out;
}

std::optional<double> predicted_exit_time(const CubicTrajectory& traj, double horizon) {
  const double start = traj.t0;
  const double end = start + horizon;
  if (traj.position(start) >= 0.0) return start;

  // Split the window at the stationary points of p so every piece is monotone.
  std::vector<double> cuts{start};
  const double qa = 3.0 * traj.a, qb = 2.0 * traj.b, qc = traj.c;
  auto add_cut = [&](double s) {
    const double t = traj.origin + s;
    if (t > start && t < end) cuts.push_back(t);
  };
  if (qa != 0.0) {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      // numerically stable pair of quadratic roots
      const double q = -0.5 * (qb + std::copysign(sq, qb));
      if (q != 0.0) {
        add_cut(q / qa);
        add_cut(qc / q);
      } else {
        add_cut(0.0);
      }
    }
  } else if (qb != 0.0) {
    add_cut(-qc / qb);
  }
  cuts.push_back(end);
  std::sort(cuts.begin(), cuts.end());

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i];
    double hi = cuts[i + 1];
    if (traj.position(hi) < 0.0) continue;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (traj.position(mid) < 0.0 ? lo : hi) = mid;
    }
    return hi;
  }
  return std::nullopt;
}

namespace {

PredictionRecord free_flow(const Vehicle& k, double t_now) {
  PredictionRecord rec;
  rec.id = k.id;
  rec.made_at = t_now;
  rec.trajectory = CubicTrajectory::affine(k.p, k.v, t_now, t_now + kPredictionHorizon);
  rec.predicted_exit = predicted_exit_time(rec.trajectory);
  if (rec.predicted_exit) rec.trajectory.tf = *rec.predicted_exit;
  return rec;
}

}  // namespace

PredictionRecord predict_hdv(int id, double t_now, const Registry& registry,
                             const NewellParams& params, const TrajectoryLookup& leader_trajectory) {
  const Vehicle& k = registry.at(id);
  const auto leader = registry.predecessor(id, registry.in_merging_zone(id));
  if (!leader) return free_flow(k, t_now);

  const CubicTrajectory* lead = leader_trajectory(*leader);
  if (lead == nullptr) return free_flow(k, t_now);

  double tau = 0.0;
  try {
    tau = solve_time_shift(k.p, *lead, t_now, params);
  } catch (const OrderingError&) {
    return free_flow(k, t_now);
  }
  if (!(tau > 0.0)) return free_flow(k, t_now);

  PredictionRecord rec;
  rec.id = id;
  rec.made_at = t_now;
  rec.tau = tau;
  rec.trajectory = shift_trajectory(*lead, tau, params);
  rec.trajectory.t0 = t_now;
  rec.trajectory.tf = t_now + kPredictionHorizon;
  rec.predicted_exit = predicted_exit_time(rec.trajectory);
  if (rec.predicted_exit) rec.trajectory.tf = *rec.predicted_exit;
  return rec;
}

std::map<int, PredictionRecord> predict_all(double t_now, const Registry& registry,
                                            const NewellParams& params,
                                            const std::map<int, CubicTrajectory>& planned) {
  std::vector<const Vehicle*> order;
  for (const Vehicle& v : registry.vehicles()) order.push_back(&v);
  std::sort(order.begin(), order.end(), [](const Vehicle* x, const Vehicle* y) {
    if (x->p != y->p) return x->p > y->p;
    return x->id < y->id;
  });

  std::map<int, PredictionRecord> out;
  const TrajectoryLookup lookup = [&](int leader) -> const CubicTrajectory* {
    if (auto it = planned.find(leader); it != planned.end()) return &it->second;
    if (auto it = out.find(leader); it != out.end()) return &it->second.trajectory;
    return nullptr;
  };
  for (const Vehicle* v : order) {
    if (planned.count(v->id)) continue;
    out.emplace(v->id, predict_hdv(v->id, t_now, registry, params, lookup));
  }
  return out;
}

}  // namespace mixmerge
