#include "mixmerge/scenario.hpp"

#include <algorithm>
#include <string>

namespace mixmerge {

const char* to_string(VehicleClass c) { return c == VehicleClass::CAV ? "CAV" : "HDV"; }
const char* to_string(Road r) { return r == Road::Main ? "main" : "ramp"; }

Geometry::Geometry(double control_zone, double merging_zone)
    : control_zone_length(control_zone), merging_zone_length(merging_zone) {
  if (!(control_zone > 0.0)) throw std::invalid_argument("control_zone_length must be > 0");
  if (!(merging_zone > 0.0) || merging_zone > control_zone)
    throw std::invalid_argument("merging_zone_length must be in (0, control_zone_length]");
}

void ConstraintParams::validate() const {
  if (!(u_min < 0.0)) throw std::invalid_argument("u_min must be < 0");
  if (!(u_max > 0.0)) throw std::invalid_argument("u_max must be > 0");
  if (!(v_min >= 0.0)) throw std::invalid_argument("v_min must be >= 0");
  if (!(v_max > v_min)) throw std::invalid_argument("v_max must be > v_min");
  if (!(t_min > 0.0)) throw std::invalid_argument("t_min must be > 0");
  if (!(d_min > 0.0)) throw std::invalid_argument("d_min must be > 0");
  if (!(t_h > 0.0)) throw std::invalid_argument("t_h must be > 0");
}

LookupError::LookupError(int id) : std::out_of_range("unknown vehicle id " + std::to_string(id)) {}

Registry::Registry(Geometry geometry, ConstraintParams limits)
    : geometry_(geometry), limits_(limits) {
  limits_.validate();
}

bool Registry::entry_clear(Road road, double v0) const {
  auto last = last_on(road);
  if (!last) return true;
  const Vehicle& lead = at(*last);
  const double gap = lead.p - geometry_.entry();
  if (gap < limits_.d_min + limits_.t_h * v0) return false;
  // The entrant must also be able to stop d_min behind the leader's stopping
  // point at full braking; otherwise it enters onto a collision course.
  const double closing = v0 * v0 - lead.v * lead.v;
  return closing <= 0.0 || gap - limits_.d_min >= closing / (2.0 * -limits_.u_min);
}

std::optional<int> Registry::register_arrival(const ArrivalSpec& spec, double t) {
  const int slot = spec.road == Road::Main ? 0 : 1;
  if (t < last_arrival_[slot])
    throw std::invalid_argument("arrival time precedes an earlier arrival on the same road");
  if (!entry_clear(spec.road, spec.v0)) return std::nullopt;

  last_arrival_[slot] = t;
  Vehicle v;
  v.id = ++last_id_;
  v.cls = spec.cls;
  v.road = spec.road;
  v.p = geometry_.entry();
  v.v = spec.v0;
  v.t_entry = t;
  vehicles_.push_back(v);
  return v.id;
}

std::vector<Vehicle>::const_iterator Registry::find(int id) const {
  auto it = std::lower_bound(vehicles_.begin(), vehicles_.end(), id,
                             [](const Vehicle& v, int key) { return v.id < key; });
  if (it == vehicles_.end() || it->id != id) return vehicles_.end();
  return it;
}

bool Registry::contains(int id) const { return find(id) != vehicles_.end(); }

const Vehicle& Registry::at(int id) const {
  auto it = find(id);
  if (it == vehicles_.end()) throw LookupError(id);
  return *it;
}

Vehicle& Registry::at(int id) {
  auto it = find(id);
  if (it == vehicles_.end()) throw LookupError(id);
  return vehicles_[static_cast<std::size_t>(it - vehicles_.begin())];
}

Neighbors Registry::neighbors(int id) const {
  const Vehicle& ego = at(id);
  Neighbors out;
  for (const Vehicle& v : vehicles_) {
    if (v.id == id) continue;
    (v.road == ego.road ? out.same_road : out.neighbor_road).push_back(v.id);
  }
  return out;
}

std::optional<int> Registry::predecessor(int id, bool projected) const {
  const Vehicle& ego = at(id);
  std::optional<int> best;
  if (!projected) {
    for (const Vehicle& v : vehicles_) {
      if (v.id >= id) break;
      if (v.road == ego.road) best = v.id;
    }
    return best;
  }
  double best_p = 0.0;
  for (const Vehicle& v : vehicles_) {
    if (v.id == id || !(v.p > ego.p)) continue;
    // vehicles_ is id-ordered, so a strict comparison keeps the lower id on ties
    if (!best || v.p < best_p) {
      best = v.id;
      best_p = v.p;
    }
  }
  return best;
}

std::optional<int> Registry::last_on(Road road) const {
  for (auto it = vehicles_.rbegin(); it != vehicles_.rend(); ++it)
    if (it->road == road) return it->id;
  return std::nullopt;
}

Vehicle Registry::retire(int id) {
  auto it = find(id);
  if (it == vehicles_.end()) throw LookupError(id);
  Vehicle v = *it;
  vehicles_.erase(it);
  return v;
}

}  // namespace mixmerge
