#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mixmerge {

enum class VehicleClass { CAV, HDV };
enum class Road { Main, Ramp };

const char* to_string(VehicleClass c);
const char* to_string(Road r);
inline Road other(Road r) { return r == Road::Main ? Road::Ramp : Road::Main; }

/// Longitudinal road layout. The conflict point is the origin and every
/// in-zone position lies in [entry(), 0].
struct Geometry {
  double control_zone_length = 300.0;
  double merging_zone_length = 75.0;

  Geometry() = default;
  Geometry(double control_zone, double merging_zone);

  double entry() const { return -control_zone_length; }
  bool in_merging_zone(double p) const { return p >= -merging_zone_length && p <= 0.0; }
};

/// Control, speed and safety bounds shared by the planner, the human model
/// and the audits.
struct ConstraintParams {
  double u_min = -3.0;
  double u_max = 2.0;
  double v_min = 0.0;
  double v_max = 25.0;
  double t_min = 2.0;
  double d_min = 10.0;
  double t_h = 1.0;

  /// Throws std::invalid_argument naming the first field that breaks a sign rule.
  void validate() const;
};

struct Vehicle {
  int id = 0;
  VehicleClass cls = VehicleClass::HDV;
  Road road = Road::Main;
  double p = 0.0;
  double v = 0.0;
  double u = 0.0;
  double t_entry = 0.0;
  std::optional<double> t_exit;
};

struct ArrivalSpec {
  VehicleClass cls = VehicleClass::HDV;
  Road road = Road::Main;
  double v0 = 0.0;
};

struct Neighbors {
  std::vector<int> same_road;
  std::vector<int> neighbor_road;
};

class LookupError : public std::out_of_range {
 public:
  explicit LookupError(int id);
};

/// Vehicles currently inside the control zone, ordered by id (= entry order).
/// Single writer: the simulation loop. Every query is a pure read.
class Registry {
 public:
  Registry(Geometry geometry, ConstraintParams limits);

  const Geometry& geometry() const { return geometry_; }
  const ConstraintParams& limits() const { return limits_; }

  /// True when a vehicle entering on `road` at speed v0 would satisfy the
  /// rear-end envelope against the last vehicle already on that road and
  /// could still stop d_min behind it if it braked at u_min.
  bool entry_clear(Road road, double v0) const;

  /// Adds a vehicle at the entry position. Returns nullopt (deferred) when
  /// entry_clear fails. Throws std::invalid_argument if t goes backwards on
  /// the same road.
  std::optional<int> register_arrival(const ArrivalSpec& spec, double t);

  bool contains(int id) const;
  const Vehicle& at(int id) const;
  Vehicle& at(int id);
  std::span<const Vehicle> vehicles() const { return vehicles_; }
  std::span<Vehicle> vehicles() { return vehicles_; }
  bool empty() const { return vehicles_.empty(); }
  int last_id() const { return last_id_; }

  Neighbors neighbors(int id) const;

  /// projected=false: max-index same-road predecessor.
  /// projected=true: nearest vehicle strictly ahead by position on either
  /// road; equal positions resolve to the lower id.
  std::optional<int> predecessor(int id, bool projected) const;

  /// Last vehicle (highest id) on the given road, if any.
  std::optional<int> last_on(Road road) const;

  bool in_merging_zone(int id) const { return geometry_.in_merging_zone(at(id).p); }

  /// Removes a vehicle that crossed the conflict point.
  Vehicle retire(int id);

 private:
  std::vector<Vehicle>::const_iterator find(int id) const;

  Geometry geometry_;
  ConstraintParams limits_;
  std::vector<Vehicle> vehicles_;
  int last_id_ = 0;
  double last_arrival_[2] = {-1e300, -1e300};
};

}  // namespace mixmerge
