#include "mixmerge/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace mixmerge {

using nlohmann::json;

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

namespace {

json rounded(double x) { return std::stod(format_number(x)); }

class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(prefix_.empty() ? "<root>" : prefix_, "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    known_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(prefix_ + key, "wrong type");
    }
  }

  template <class T>
  void get_optional(const char* key, std::optional<T>& out) {
    known_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    T value{};
    get(key, value);
    out = value;
  }

  const json* child(const char* key) {
    known_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return prefix_ + key; }

  void finish() const {
    for (const auto& item : obj_.items())
      if (!known_.count(item.key())) throw ConfigError(prefix_ + item.key(), "unknown field");
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> known_;
};

IdmParams read_idm(const json& j, const std::string& prefix, IdmParams idm) {
  ObjectReader r(j, prefix);
  r.get("v_bar", idm.v_bar);
  r.get("d_bar", idm.d_bar);
  r.get("T", idm.T);
  r.get("a", idm.a);
  r.get("b", idm.b);
  r.finish();
  return idm;
}

json idm_json(const IdmParams& p) {
  return {{"v_bar", p.v_bar}, {"d_bar", p.d_bar}, {"T", p.T}, {"a", p.a}, {"b", p.b}};
}

Road parse_road(const json& j, const std::string& field) {
  if (j == "main") return Road::Main;
  if (j == "ramp") return Road::Ramp;
  throw ConfigError(field, "expected \"main\" or \"ramp\"");
}

VehicleClass parse_class(const json& j, const std::string& field) {
  if (j == "CAV") return VehicleClass::CAV;
  if (j == "HDV") return VehicleClass::HDV;
  throw ConfigError(field, "expected \"CAV\" or \"HDV\"");
}

}  // namespace

SimConfig config_from_json(const json& doc) {
  SimConfig c;
  ObjectReader root(doc, "");

  if (const json* g = root.child("geometry")) {
    ObjectReader r(*g, "geometry.");
    r.get("control_zone_length", c.geometry.control_zone_length);
    r.get("merging_zone_length", c.geometry.merging_zone_length);
    r.finish();
  }
  if (const json* l = root.child("limits")) {
    ObjectReader r(*l, "limits.");
    r.get("u_min", c.limits.u_min);
    r.get("u_max", c.limits.u_max);
    r.get("v_min", c.limits.v_min);
    r.get("v_max", c.limits.v_max);
    r.get("t_min", c.limits.t_min);
    r.get("d_min", c.limits.d_min);
    r.get("t_h", c.limits.t_h);
    r.finish();
  }
  if (const json* n = root.child("newell")) {
    ObjectReader r(*n, "newell.");
    r.get("w", c.newell.w);
    r.finish();
  }
  if (const json* k = root.child("risk")) {
    ObjectReader r(*k, "risk.");
    r.get("T_cr_same", c.risk.T_cr_same);
    r.get("T_cr_neighbor", c.risk.T_cr_neighbor);
    r.get("v_tilde", c.risk.v_tilde);
    r.finish();
  }
  if (const json* i = root.child("idm")) c.idm_base = read_idm(*i, "idm.", c.idm_base);
  root.get("idm_perturbation", c.idm_perturbation);
  root.get("volume", c.volume);
  root.get("penetration", c.penetration);
  root.get("arrival_speed_min", c.arrival_speed_min);
  root.get("arrival_speed_max", c.arrival_speed_max);
  root.get_optional("inter_arrival_stddev", c.inter_arrival_stddev);
  root.get("dt", c.dt);
  root.get("total_vehicles", c.total_vehicles);
  root.get("seed", c.seed);
  root.get("replanning", c.replanning);
  root.get("replan_cooldown", c.replan_cooldown);
  root.get("fallback_retry", c.fallback_retry);
  if (const json* p = root.child("planner")) {
    ObjectReader r(*p, "planner.");
    r.get("step", c.planner.step);
    r.get("upper_factor", c.planner.upper_factor);
    r.get("upper_cap", c.planner.upper_cap);
    r.get("step_fraction", c.planner.step_fraction);
    r.finish();
  }
  if (const json* arr = root.child("arrivals")) {
    if (!arr->is_array()) throw ConfigError("arrivals", "expected an array");
    for (std::size_t n = 0; n < arr->size(); ++n) {
      const std::string prefix = "arrivals[" + std::to_string(n) + "].";
      ObjectReader r((*arr)[n], prefix);
      ScriptedArrival a;
      r.get("t", a.t);
      r.get("v0", a.v0);
      if (const json* road = r.child("road")) a.road = parse_road(*road, r.path("road"));
      if (const json* cls = r.child("class")) a.cls = parse_class(*cls, r.path("class"));
      if (const json* idm = r.child("idm")) a.idm = read_idm(*idm, prefix + "idm.", c.idm_base);
      r.finish();
      c.arrivals.push_back(a);
    }
  }
  root.finish();
  c.validate();
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const SimConfig& c) {
  json j;
  j["geometry"] = {{"control_zone_length", c.geometry.control_zone_length},
                   {"merging_zone_length", c.geometry.merging_zone_length}};
  j["limits"] = {{"u_min", c.limits.u_min}, {"u_max", c.limits.u_max}, {"v_min", c.limits.v_min},
                 {"v_max", c.limits.v_max}, {"t_min", c.limits.t_min}, {"d_min", c.limits.d_min},
                 {"t_h", c.limits.t_h}};
  j["newell"] = {{"w", c.newell.w}};
  j["risk"] = {{"T_cr_same", c.risk.T_cr_same},
               {"T_cr_neighbor", c.risk.T_cr_neighbor},
               {"v_tilde", c.risk.v_tilde}};
  j["idm"] = idm_json(c.idm_base);
  j["idm_perturbation"] = c.idm_perturbation;
  j["volume"] = c.volume;
  j["penetration"] = c.penetration;
  j["arrival_speed_min"] = c.arrival_speed_min;
  j["arrival_speed_max"] = c.arrival_speed_max;
  j["inter_arrival_stddev"] = c.inter_arrival_stddev ? json(*c.inter_arrival_stddev) : json(nullptr);
  j["dt"] = c.dt;
  j["total_vehicles"] = c.total_vehicles;
  j["seed"] = c.seed;
  j["replanning"] = c.replanning;
  j["replan_cooldown"] = c.replan_cooldown;
  j["fallback_retry"] = c.fallback_retry;
  j["planner"] = {{"step", c.planner.step},
                  {"step_fraction", c.planner.step_fraction},
                  {"upper_factor", c.planner.upper_factor},
                  {"upper_cap", c.planner.upper_cap}};
  if (!c.arrivals.empty()) {
    json arr = json::array();
    for (const ScriptedArrival& a : c.arrivals) {
      json e = {{"t", a.t}, {"road", to_string(a.road)}, {"class", to_string(a.cls)}, {"v0", a.v0}};
      if (a.idm) e["idm"] = idm_json(*a.idm);
      arr.push_back(e);
    }
    j["arrivals"] = arr;
  }
  return j;
}

void write_trajectories_csv(std::ostream& out, const SimLog& log) {
  out << "t,id,class,road,p,v,u,plan_epoch,replanned\n";
  for (const StepRecord& r : log.records) {
    out << format_number(r.t) << ',' << r.id << ',' << to_string(r.cls) << ',' << to_string(r.road)
        << ',' << format_number(r.p) << ',' << format_number(r.v) << ',' << format_number(r.u) << ','
        << (r.plan_epoch ? format_number(*r.plan_epoch) : std::string()) << ','
        << (r.replanned ? 1 : 0) << '\n';
  }
}

void write_events_csv(std::ostream& out, const SimLog& log, const SafetyReport& report) {
  out << "t,kind,id,other,value\n";
  for (const LogEvent& e : log.events) {
    if (e.kind == EventKind::IdmBreakdown) continue;  // reported below with the audit
    out << format_number(e.t) << ',' << to_string(e.kind) << ',' << e.id << ',' << e.other << ','
        << format_number(e.value) << '\n';
  }
  for (const ViolationEvent& v : report.events)
    out << format_number(v.t) << ",violation_" << to_string(v.kind) << ',' << v.id << ',' << v.other
        << ',' << format_number(v.magnitude) << '\n';
}

json metrics_to_json(const RunMetrics& m) {
  json v = json::object();
  for (const auto& [kind, n] : m.violations) v[kind] = n;
  return {{"avg_travel_time", rounded(m.avg_travel_time)},
          {"output_flux", rounded(m.output_flux)},
          {"mean_energy", rounded(m.mean_energy)},
          {"violations", v},
          {"replan_count", m.replans},
          {"vehicles", m.vehicles}};
}

}  // namespace mixmerge
