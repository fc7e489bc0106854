#include "mixmerge/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mixmerge/rng.hpp"

namespace mixmerge {

ConfigError::ConfigError(std::string field, const std::string& what)
    : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Plan: return "plan";
    case EventKind::Replan: return "replan";
    case EventKind::Infeasible: return "infeasible";
    case EventKind::FallbackPlan: return "fallback_plan";
    case EventKind::IdmBreakdown: return "idm_breakdown";
  }
  return "?";
}

namespace {

template <class Fn>
void check_field(const char* field, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

void SimConfig::validate() const {
  check_field("geometry", [&] { Geometry(geometry.control_zone_length, geometry.merging_zone_length); });
  check_field("limits", [&] { limits.validate(); });
  check_field("newell", [&] { newell.validate(); });
  check_field("risk", [&] { risk.validate(); });
  check_field("idm", [&] { idm_base.validate(); });
  require(idm_perturbation >= 0.0 && idm_perturbation < 1.0, "idm_perturbation", "must be in [0, 1)");
  require(volume > 0.0, "volume", "must be > 0");
  require(penetration >= 0.0 && penetration <= 1.0, "penetration", "must be in [0, 1]");
  require(arrival_speed_min >= 0.0, "arrival_speed_min", "must be >= 0");
  require(arrival_speed_max >= arrival_speed_min, "arrival_speed_max", "must be >= arrival_speed_min");
  if (inter_arrival_stddev)
    require(*inter_arrival_stddev >= 0.0, "inter_arrival_stddev", "must be >= 0");
  require(dt > 0.0, "dt", "must be > 0");
  require(total_vehicles >= 0, "total_vehicles", "must be >= 0");
  require(replan_cooldown >= 0.0, "replan_cooldown", "must be >= 0");
  require(fallback_retry > 0.0, "fallback_retry", "must be > 0");
  require(planner.step > 0.0, "planner.step", "must be > 0");
  require(planner.upper_factor >= 1.0, "planner.upper_factor", "must be >= 1");
  require(planner.upper_cap > 0.0, "planner.upper_cap", "must be > 0");
  require(planner.step_fraction > 0.0, "planner.step_fraction", "must be > 0");
  for (const ScriptedArrival& a : arrivals) {
    require(a.v0 >= 0.0, "arrivals", "v0 must be >= 0");
    if (a.idm) check_field("arrivals", [&] { a.idm->validate(); });
  }
}

std::vector<PendingArrival> generate_arrivals(const SimConfig& config) {
  std::vector<PendingArrival> out;
  if (!config.arrivals.empty()) {
    for (std::size_t n = 0; n < config.arrivals.size(); ++n) {
      const ScriptedArrival& s = config.arrivals[n];
      IdmParams idm = s.idm ? *s.idm
                            : perturb_params(config.idm_base, stream_key(config.seed, "driver", 2, n),
                                             config.idm_perturbation);
      out.push_back({s.t, s.road, s.cls, s.v0, idm});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const PendingArrival& x, const PendingArrival& y) { return x.t < y.t; });
    return out;
  }

  const auto n_total = static_cast<std::size_t>(config.total_vehicles);
  const double mean = 2.0 * 3600.0 / config.volume;
  const double stddev = config.inter_arrival_stddev.value_or(0.5 * mean);
  constexpr double kMinHeadway = 0.1;

  for (Road road : {Road::Main, Road::Ramp}) {
    const auto r = static_cast<std::uint64_t>(road);
    auto gaps = make_stream(config.seed, "inter-arrival", r);
    std::normal_distribution<double> gap_dist(mean, stddev);
    double t = 0.0;
    for (std::size_t n = 0; n < n_total; ++n) {
      double gap = gap_dist(gaps);
      while (gap < kMinHeadway) gap = gap_dist(gaps);
      t += gap;

      auto speed_rng = make_stream(config.seed, "speed", r, n);
      auto class_rng = make_stream(config.seed, "class", r, n);
      std::uniform_real_distribution<double> speed(config.arrival_speed_min, config.arrival_speed_max);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      PendingArrival a;
      a.t = t;
      a.road = road;
      a.v0 = config.arrival_speed_max > config.arrival_speed_min ? speed(speed_rng)
                                                                  : config.arrival_speed_min;
      a.cls = unit(class_rng) < config.penetration ? VehicleClass::CAV : VehicleClass::HDV;
      a.idm = perturb_params(config.idm_base, stream_key(config.seed, "driver", r, n),
                             config.idm_perturbation);
      out.push_back(a);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PendingArrival& x, const PendingArrival& y) {
    if (x.t != y.t) return x.t < y.t;
    return x.road < y.road;
  });
  out.resize(std::min(out.size(), n_total));
  return out;
}

IntegratedState integrate(double p, double v, double u, double dt, double v_floor,
                          double v_ceil) {
  const double v_next = std::clamp(v + u * dt, v_floor, v_ceil);
  return {p + v_next * dt, v_next};
}

IntegratedState integrate_exact(double p, double v, double u, double dt) {
  return {p + (v + 0.5 * u * dt) * dt, v + u * dt};
}

namespace {

// Fraction of the step at which p + v s + u s^2 / 2 reaches 0, for a vehicle
// known to cross within the step.
double crossing_fraction(double p, double v, double u, double dt) {
  const double qa = 0.5 * u, qb = v, qc = p;
  double s = dt;
  if (std::abs(qa) < 1e-12) {
    if (qb > 0.0) s = -qc / qb;
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
      double best = dt;
      for (double r : {q / qa, q != 0.0 ? qc / q : dt})
        if (r >= 0.0 && r <= dt) best = std::min(best, r);
      s = best;
    }
  }
  return std::clamp(s / dt, 0.0, 1.0);
}

}  // namespace

Simulation::Simulation(SimConfig config)
    : config_(std::move(config)), registry_(config_.geometry, config_.limits) {
  config_.validate();
  double last = 0.0;
  for (const PendingArrival& a : generate_arrivals(config_)) {
    pending_[a.road == Road::Main ? 0 : 1].push_back(a);
    last = std::max(last, a.t);
  }
  // guard against runs that never drain
  horizon_ = last + 3600.0;
}

const CubicTrajectory* Simulation::plan_of(int id) const {
  auto it = agents_.find(id);
  if (it == agents_.end() || !it->second.plan) return nullptr;
  return &*it->second.plan;
}

bool Simulation::done() const {
  return (pending_[0].empty() && pending_[1].empty() && registry_.empty()) || t_ > horizon_;
}

SimLog Simulation::take_log() { return std::move(log_); }

void Simulation::admit_arrivals() {
  // Heads of both road queues enter in scheduled order; a blocked head defers
  // only its own road.
  std::vector<int> fresh_cavs;
  bool blocked[2] = {false, false};
  while (true) {
    int pick = -1;
    for (int r = 0; r < 2; ++r) {
      if (blocked[r] || pending_[r].empty() || pending_[r].front().t > t_ + 1e-9) continue;
      if (pick < 0 || pending_[r].front().t < pending_[pick].front().t) pick = r;
    }
    if (pick < 0) break;
    const PendingArrival a = pending_[pick].front();
    const auto id = registry_.register_arrival({a.cls, a.road, a.v0}, t_);
    if (!id) {
      blocked[pick] = true;
      continue;
    }
    pending_[pick].pop_front();
    ++log_.arrivals;
    Agent agent;
    agent.idm = a.idm;
    agents_.emplace(*id, agent);
    if (a.cls == VehicleClass::CAV) fresh_cavs.push_back(*id);
  }
  for (int id : fresh_cavs) try_plan(id, false);
}

bool Simulation::try_plan(int id, bool replan) {
  Agent& agent = agents_.at(id);
  const Vehicle& ego = registry_.at(id);
  if (!(ego.p < 0.0)) return false;

  std::map<int, CubicTrajectory> planned;
  for (const auto& [other, ag] : agents_)
    if (ag.plan && registry_.contains(other)) planned.emplace(other, *ag.plan);
  const auto predictions = predict_all(t_, registry_, config_.newell, planned);

  auto motion_of = [&](int k) -> const CubicTrajectory* {
    if (auto it = planned.find(k); it != planned.end()) return &it->second;
    if (auto it = predictions.find(k); it != predictions.end()) return &it->second.trajectory;
    return nullptr;
  };
  auto exit_of = [&](int k) -> std::optional<double> {
    if (auto it = planned.find(k); it != planned.end()) return it->second.tf;
    if (auto it = predictions.find(k); it != predictions.end()) return it->second.predicted_exit;
    return std::nullopt;
  };

  PlanRequest req;
  req.id = id;
  req.t_plan = t_;
  req.p = ego.p;
  req.v = ego.v;
  req.limits = config_.limits;
  req.settings = config_.planner;
  for (int k : registry_.neighbors(id).neighbor_road)
    if (auto tf = exit_of(k)) req.neighbor_exits.push_back({k, *tf});
  if (auto k = registry_.predecessor(id, false))
    if (const CubicTrajectory* m = motion_of(*k)) req.predecessor = *m;
  if (agent.plan) req.incumbent_tf = agent.plan->tf;

  const bool was_planned = agent.plan.has_value();
  const PlanResult result = plan(req);
  agent.last_plan = t_;
  if (!result.feasible()) {
    agent.plan.reset();
    agent.plan_epoch.reset();
    agent.next_retry = t_ + config_.fallback_retry;
    log_.events.push_back({t_, EventKind::Infeasible, id, 0,
                           result.blocking ? static_cast<double>(*result.blocking) : -1.0});
    return false;
  }
  agent.plan = result.trajectory;
  agent.plan_epoch = t_;
  EventKind kind = EventKind::Plan;
  if (replan) kind = was_planned ? EventKind::Replan : EventKind::FallbackPlan;
  log_.events.push_back({t_, kind, id, 0, result.tf()});
  return true;
}

ConflictMetrics Simulation::conflict_metrics(int id) const {
  const Vehicle& ego = registry_.at(id);
  const double d_min = config_.limits.d_min;
  ConflictMetrics m;
  if (auto k = registry_.predecessor(id, false)) {
    const Vehicle& lead = registry_.at(*k);
    m.T_same = time_to_conflict_same(ego.p, ego.v, lead.p, lead.v, d_min);
  }
  if (registry_.in_merging_zone(id)) {
    for (int k : registry_.neighbors(id).neighbor_road) {
      if (!registry_.in_merging_zone(k)) continue;
      const Vehicle& other = registry_.at(k);
      const auto tn = time_to_conflict_neighbor(ego.p, ego.v, other.p, other.v, d_min);
      if (tn && (!m.T_neighbor || *tn < *m.T_neighbor)) m.T_neighbor = tn;
    }
  }
  return m;
}

void Simulation::monitor_and_replan(std::vector<int>& replanned) {
  std::vector<int> cavs;
  for (const Vehicle& v : registry_.vehicles())
    if (v.cls == VehicleClass::CAV) cavs.push_back(v.id);

  for (int id : cavs) {
    Agent& agent = agents_.at(id);
    const Vehicle& ego = registry_.at(id);
    if (!agent.plan) {
      if (t_ + 1e-9 >= agent.next_retry && try_plan(id, true)) replanned.push_back(id);
      continue;
    }
    if (!config_.replanning) continue;
    if (t_ - agent.last_plan < config_.replan_cooldown - 1e-9) continue;
    if (!should_replan(conflict_metrics(id), ego.v, registry_.in_merging_zone(id), config_.risk))
      continue;
    ++agent.replans;
    ++log_.replans;
    try_plan(id, true);
    replanned.push_back(id);
  }
}

void Simulation::step() {
  if (done()) return;
  admit_arrivals();

  std::vector<int> replanned;
  monitor_and_replan(replanned);

  const double dt = config_.dt;
  const ConstraintParams& lim = config_.limits;

  // Controls are resolved against the pre-step snapshot.
  std::vector<double> controls;
  controls.reserve(registry_.vehicles().size());
  for (const Vehicle& v : registry_.vehicles()) {
    Agent& agent = agents_.at(v.id);
    double u = 0.0;
    if (agent.plan) {
      u = agent.plan->control(t_ + 0.5 * dt);
    } else {
      const HdvCommand cmd =
          hdv_control(v.id, registry_, v.cls == VehicleClass::CAV ? config_.idm_base : agent.idm);
      if (cmd.breakdown)
        log_.events.push_back({t_, EventKind::IdmBreakdown, v.id, cmd.leader.value_or(0),
                               cmd.gap.value_or(0.0)});
      u = cmd.u;
    }
    controls.push_back(u);
  }

  std::vector<int> exited;
  std::size_t idx = 0;
  for (Vehicle& v : registry_.vehicles()) {
    Agent& agent = agents_.at(v.id);
    const double u = controls[idx++];
    v.u = u;

    StepRecord rec;
    rec.t = t_;
    rec.id = v.id;
    rec.cls = v.cls;
    rec.road = v.road;
    rec.p = v.p;
    rec.v = v.v;
    rec.u = u;
    rec.plan_epoch = agent.plan_epoch;
    rec.replanned = std::find(replanned.begin(), replanned.end(), v.id) != replanned.end();
    log_.records.push_back(rec);

    const double power = v.v * std::max(0.0, u);
    if (agent.last_power) agent.energy += 0.5 * (*agent.last_power + power) * dt;
    agent.last_power = power;

    // Fallback CAVs stay inside the speed bounds; humans only stop at zero.
    const bool fallback_cav = v.cls == VehicleClass::CAV;
    const double v_floor = fallback_cav ? lim.v_min : 0.0;
    const double v_ceil = fallback_cav ? lim.v_max : std::numeric_limits<double>::infinity();
    const bool exact = agent.plan.has_value();
    const IntegratedState next =
        exact ? integrate_exact(v.p, v.v, u, dt) : integrate(v.p, v.v, u, dt, v_floor, v_ceil);
    if (next.p > 0.0) {
      // Semi-implicit motion is linear within the step; exact motion is quadratic.
      const double frac = exact ? crossing_fraction(v.p, v.v, u, dt)
                                : next.p > v.p ? (0.0 - v.p) / (next.p - v.p) : 1.0;
      v.t_exit = t_ + frac * dt;
      exited.push_back(v.id);
    }
    v.p = next.p;
    v.v = next.v;
  }

  t_ += dt;

  for (int id : exited) {
    const Vehicle v = registry_.retire(id);
    const Agent& agent = agents_.at(id);
    VehicleSummary s;
    s.id = id;
    s.cls = v.cls;
    s.road = v.road;
    s.t_entry = v.t_entry;
    s.t_exit = *v.t_exit;
    s.travel_time = s.t_exit - s.t_entry;
    s.energy = agent.energy;
    s.replans = agent.replans;
    log_.summaries.push_back(s);
    agents_.erase(id);
  }
  log_.end_time = t_;
  log_.completed = pending_[0].empty() && pending_[1].empty() && registry_.empty();
}

SimLog run(const SimConfig& config) {
  Simulation sim(config);
  while (!sim.done()) sim.step();
  return sim.take_log();
}

}  // namespace mixmerge
