#include "mixmerge/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixmerge {

namespace {
constexpr double kGapSlack = 1e-9;
constexpr double kMinStep = 1e-3;
// Band-edge candidates sit this far outside the band, so that execution error
// in the simulator cannot tip an exact-edge slot under t_min.
constexpr double kEdgeGuard = 1e-3;
}

const char* to_string(PlanCheck c) {
  switch (c) {
    case PlanCheck::Bounds: return "bounds";
    case PlanCheck::NoConflict: return "no_conflict";
    case PlanCheck::RearEnd: return "rear_end";
  }
  return "?";
}

TravelTimeRange feasible_time_range(double p, double v, const ConstraintParams& limits,
                                    const PlannerSettings& settings) {
  if (!(p < 0.0)) throw std::invalid_argument("feasible_time_range: position must be upstream");
  if (!(v >= 0.0)) throw std::invalid_argument("feasible_time_range: speed must be >= 0");
  const double distance = -p;
  double lower = 0.0;
  if (v >= limits.v_max) {
    lower = distance / v;
  } else {
    const double t_acc = (limits.v_max - v) / limits.u_max;
    const double d_acc = (limits.v_max * limits.v_max - v * v) / (2.0 * limits.u_max);
    if (d_acc >= distance)
      lower = (-v + std::sqrt(v * v + 2.0 * limits.u_max * distance)) / limits.u_max;
    else
      lower = t_acc + (distance - d_acc) / limits.v_max;
  }
  const double upper = std::min(settings.upper_factor * lower, settings.upper_cap);
  return {lower, std::max(upper, lower)};
}

bool check_no_conflict(double tf, std::span<const double> neighbor_exits, double t_min) {
  return std::all_of(neighbor_exits.begin(), neighbor_exits.end(),
                     [&](double tk) { return std::abs(tf - tk) >= t_min - kGapSlack; });
}

std::optional<double> check_rear_end(const CubicTrajectory& ego, const CubicTrajectory& pred,
                                     double d_min, double t_h, double t_a, double t_b) {
  if (t_b < t_a) return std::nullopt;

  // g as a cubic in s = t - t_a. Both curves are rebased to t_a so their
  // coefficients can be subtracted.
  const CubicTrajectory e = ego.rebased(t_a);
  const CubicTrajectory k = pred.rebased(t_a);
  const double ga = k.a - e.a;
  const double gb = k.b - e.b - 3.0 * t_h * e.a;
  const double gc = k.c - e.c - 2.0 * t_h * e.b;
  const double gd = k.d - e.d - d_min - t_h * e.c;
  auto h = [&](double s) { return ((ga * s + gb) * s + gc) * s + gd + kGapSlack; };
  const double span = t_b - t_a;

  // Split at the real roots of g' so h is monotone on every piece.
  double cuts[4] = {0.0, span, span, span};
  int n = 2;
  auto cut = [&](double s) {
    if (s > 0.0 && s < span) cuts[n++] = s;
  };
  const double qa = 3.0 * ga, qb = 2.0 * gb, qc = gc;
  if (qa != 0.0) {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
      if (q != 0.0) {
        cut(q / qa);
        cut(qc / q);
      }
    }
  } else if (qb != 0.0) {
    cut(-qc / qb);
  }
  std::sort(cuts, cuts + n);

  if (h(0.0) < 0.0) return t_a;
  for (int i = 0; i + 1 < n; ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    if (!(h(hi) < 0.0)) continue;
    // h(lo) >= 0 > h(hi): keep the invariant while halving.
    while (hi - lo > 1e-9) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) < 0.0 ? hi : lo) = mid;
    }
    return t_a + hi;
  }
  return std::nullopt;
}

double grid_step(double t_lower, const PlannerSettings& settings) {
  return std::clamp(settings.step_fraction * t_lower, kMinStep, settings.step);
}

PlanResult plan(const PlanRequest& req) {
  PlanResult result;
  if (!(req.p < 0.0)) return result;

  const TravelTimeRange range = feasible_time_range(req.p, req.v, req.limits, req.settings);
  std::vector<double> exits;
  exits.reserve(req.neighbor_exits.size());
  for (const NeighborExit& n : req.neighbor_exits) exits.push_back(n.t_exit);

  const double step = grid_step(range.lower, req.settings);
  const int max_n = static_cast<int>(std::floor((range.upper - range.lower) / step + 1e-9));
  const double first = req.t_plan + range.lower;
  const double last = first + max_n * step;

  // Off-grid candidates: the incumbent slot and the edges of every neighbour's
  // blocked band. Feasible windows between two bands can be narrower than the
  // step; their edges are exactly where they open and close.
  std::vector<double> extra;
  auto add_extra = [&](double tf) {
    if (tf >= first && tf <= last) extra.push_back(tf);
  };
  if (req.incumbent_tf) add_extra(*req.incumbent_tf);
  for (double e : exits) {
    add_extra(e - req.limits.t_min - kEdgeGuard);
    add_extra(e + req.limits.t_min + kEdgeGuard);
  }
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  std::size_t next_extra = 0;

  std::optional<PlanCheck> last_failure;
  auto attempt = [&](double tf) -> bool {
    ++result.iterations;
    const CubicTrajectory cand = solve_boundary({req.t_plan, tf, req.p, req.v, 0.0, 0.0});
    if (bounds_check(cand, req.limits)) {
      last_failure = PlanCheck::Bounds;
      return false;
    }
    if (!check_no_conflict(tf, exits, req.limits.t_min)) {
      last_failure = PlanCheck::NoConflict;
      return false;
    }
    if (req.predecessor) {
      const double t_b = std::min(tf, req.predecessor->tf);
      if (check_rear_end(cand, *req.predecessor, req.limits.d_min, req.limits.t_h, req.t_plan,
                         t_b)) {
        last_failure = PlanCheck::RearEnd;
        return false;
      }
    }
    result.trajectory = cand;
    result.blocking = last_failure;
    return true;
  };

  for (int n = 0; n <= max_n; ++n) {
    const double tf = first + n * step;
    for (; next_extra < extra.size() && extra[next_extra] < tf; ++next_extra)
      if (attempt(extra[next_extra])) return result;
    if (attempt(tf)) return result;
  }
  for (; next_extra < extra.size(); ++next_extra)
    if (attempt(extra[next_extra])) return result;
  result.blocking = last_failure;
  return result;
}

}  // namespace mixmerge
