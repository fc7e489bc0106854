#include "mixmerge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>

namespace mixmerge {

double average_travel_time(const SimLog& log) {
  if (log.summaries.empty()) throw UndefinedMetric("average travel time: no exited vehicles");
  double sum = 0.0;
  for (const VehicleSummary& s : log.summaries) sum += s.t_exit - s.t_entry;
  return sum / static_cast<double>(log.summaries.size());
}

double output_flux(const SimLog& log) {
  if (log.summaries.size() < 2) throw UndefinedMetric("output flux: fewer than two exits");
  double first = log.summaries.front().t_exit;
  double last = first;
  for (const VehicleSummary& s : log.summaries) {
    first = std::min(first, s.t_exit);
    last = std::max(last, s.t_exit);
  }
  if (!(last > first)) throw UndefinedMetric("output flux: zero-length exit window");
  return static_cast<double>(log.summaries.size() - 1) * 3600.0 / (last - first);
}

double energy_per_mass(std::span<const EnergySample> samples) {
  double total = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double f0 = samples[i - 1].v * std::max(0.0, samples[i - 1].u);
    const double f1 = samples[i].v * std::max(0.0, samples[i].u);
    total += 0.5 * (f0 + f1) * (samples[i].t - samples[i - 1].t);
  }
  return std::max(0.0, total);
}

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::RearEnd: return "rear_end";
    case ViolationKind::MinDistance: return "min_distance";
    case ViolationKind::Crossing: return "crossing";
    case ViolationKind::IdmBreakdown: return "idm_breakdown";
  }
  return "?";
}

std::size_t SafetyReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [&](const ViolationEvent& e) { return e.kind == kind; }));
}

std::size_t SafetyReport::crossings_below(double threshold) const {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [&](const ViolationEvent& e) {
    return e.kind == ViolationKind::Crossing && e.observed < threshold;
  }));
}

std::size_t SafetyReport::distances_below(double threshold) const {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [&](const ViolationEvent& e) {
    return e.kind == ViolationKind::MinDistance && e.observed < threshold;
  }));
}

namespace {

constexpr double kAuditSlack = 1e-9;

// Consecutive-step deficits of the same pair collapse into one event that
// keeps the first time and the worst deficit.
class EpisodeMerger {
 public:
  explicit EpisodeMerger(std::vector<ViolationEvent>& out) : out_(out) {}

  void add(const ViolationEvent& e, double prev_step_t) {
    const auto key = std::make_tuple(static_cast<int>(e.kind), e.id, e.other);
    auto it = open_.find(key);
    if (it != open_.end() && it->second.last_t == prev_step_t) {
      ViolationEvent& ev = out_[it->second.index];
      if (e.magnitude > ev.magnitude) {
        ev.magnitude = e.magnitude;
        ev.observed = e.observed;
      }
      it->second.last_t = e.t;
      return;
    }
    out_.push_back(e);
    open_[key] = {out_.size() - 1, e.t};
  }

 private:
  struct Open {
    std::size_t index;
    double last_t;
  };
  std::vector<ViolationEvent>& out_;
  std::map<std::tuple<int, int, int>, Open> open_;
};

}  // namespace

SafetyReport safety_audit(const SimLog& log, const ConstraintParams& limits) {
  SafetyReport report;
  EpisodeMerger merger(report.events);

  const auto& recs = log.records;
  double prev_t = std::nan("");
  std::vector<const StepRecord*> road_group;
  for (std::size_t begin = 0; begin < recs.size();) {
    std::size_t end = begin;
    while (end < recs.size() && recs[end].t == recs[begin].t) ++end;
    const double t = recs[begin].t;

    for (Road road : {Road::Main, Road::Ramp}) {
      road_group.clear();
      for (std::size_t i = begin; i < end; ++i)
        if (recs[i].road == road) road_group.push_back(&recs[i]);
      std::sort(road_group.begin(), road_group.end(), [](const StepRecord* x, const StepRecord* y) {
        if (x->p != y->p) return x->p > y->p;
        return x->id < y->id;
      });
      for (std::size_t i = 1; i < road_group.size(); ++i) {
        const StepRecord& lead = *road_group[i - 1];
        const StepRecord& follow = *road_group[i];
        const double gap = lead.p - follow.p;
        if (gap < limits.d_min - kAuditSlack)
          merger.add({ViolationKind::MinDistance, t, follow.id, lead.id, limits.d_min - gap, gap}, prev_t);
        const double required = limits.d_min + limits.t_h * follow.v;
        if (follow.cls == VehicleClass::CAV && gap < required - kAuditSlack)
          merger.add({ViolationKind::RearEnd, t, follow.id, lead.id, required - gap, gap}, prev_t);
      }
    }
    prev_t = t;
    begin = end;
  }

  std::vector<const VehicleSummary*> exits;
  for (const VehicleSummary& s : log.summaries) exits.push_back(&s);
  std::sort(exits.begin(), exits.end(), [](const VehicleSummary* x, const VehicleSummary* y) {
    if (x->t_exit != y->t_exit) return x->t_exit < y->t_exit;
    return x->id < y->id;
  });
  for (std::size_t i = 0; i < exits.size(); ++i) {
    for (std::size_t j = i + 1; j < exits.size(); ++j) {
      const double gap = exits[j]->t_exit - exits[i]->t_exit;
      if (gap >= limits.t_min - kAuditSlack) break;
      if (exits[j]->road == exits[i]->road) continue;
      // The crossing gap binds CAVs; two human drivers owe each other nothing.
      if (exits[i]->cls == VehicleClass::HDV && exits[j]->cls == VehicleClass::HDV) continue;
      report.events.push_back({ViolationKind::Crossing, exits[j]->t_exit, exits[j]->id, exits[i]->id,
                               limits.t_min - gap, gap});
    }
  }

  for (const LogEvent& e : log.events)
    if (e.kind == EventKind::IdmBreakdown)
      report.events.push_back({ViolationKind::IdmBreakdown, e.t, e.id, e.other, -e.value, e.value});

  return report;
}

RunMetrics compute_run_metrics(const SimLog& log, const ConstraintParams& limits) {
  RunMetrics m;
  m.vehicles = static_cast<int>(log.summaries.size());
  m.replans = log.replans;
  if (!log.summaries.empty()) {
    m.avg_travel_time = average_travel_time(log);
    double energy = 0.0;
    for (const VehicleSummary& s : log.summaries) energy += s.energy;
    m.mean_energy = energy / static_cast<double>(log.summaries.size());
  }
  if (log.summaries.size() >= 2) {
    try {
      m.output_flux = output_flux(log);
    } catch (const UndefinedMetric&) {
      m.output_flux = 0.0;
    }
  }
  const SafetyReport report = safety_audit(log, limits);
  for (ViolationKind k : {ViolationKind::RearEnd, ViolationKind::MinDistance, ViolationKind::Crossing,
                          ViolationKind::IdmBreakdown})
    m.violations[to_string(k)] = report.count(k);
  return m;
}

}  // namespace mixmerge
