#include <doctest.h>

#include <sstream>

#include "mixmerge/io.hpp"
#include "mixmerge/sweep.hpp"

using namespace mixmerge;
using nlohmann::json;

namespace {

std::string field_of(const json& doc) {
  try {
    config_from_json(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("numbers carry nine significant digits") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(12345678.9) == "12345678.9");
  CHECK(format_number(-300.0) == "-300");
}

TEST_CASE("missing keys keep defaults") {
  const SimConfig c = config_from_json(json::object());
  CHECK(c.volume == 1500.0);
  CHECK(c.limits.v_max == 25.0);
  CHECK(c.dt == 0.05);
  CHECK_FALSE(c.inter_arrival_stddev);
}

TEST_CASE("bad configs name the field") {
  CHECK(field_of({{"penetration", 1.5}}) == "penetration");
  CHECK(field_of({{"volume", -3}}) == "volume");
  CHECK(field_of({{"limits", {{"v_max", "fast"}}}}) == "limits.v_max");
  CHECK(field_of({{"limits", {{"speed", 3}}}}) == "limits.speed");
  CHECK(field_of({{"colour", "red"}}) == "colour");
  CHECK(field_of({{"arrivals", {{{"t", 0}, {"road", "side"}}}}}) == "arrivals[0].road");
  CHECK(field_of({{"arrivals", {{{"t", 0}, {"idm", {{"T", -1}}}}}}}) == "arrivals");
  CHECK(field_of({{"dt", 0}}) == "dt");
  CHECK(field_of({{"planner", {{"step", 0.1}}}}) == "");
}

TEST_CASE("config survives a JSON round trip") {
  SimConfig c;
  c.volume = 900.0;
  c.penetration = 0.4;
  c.seed = 77;
  c.inter_arrival_stddev = 1.5;
  c.planner.upper_factor = 5.0;
  c.arrivals.push_back({3.0, Road::Ramp, VehicleClass::CAV, 20.0, std::nullopt});
  c.arrivals.push_back({4.0, Road::Main, VehicleClass::HDV, 21.0, IdmParams{20, 9, 1.5, 1.1, 1.4}});
  c.total_vehicles = 2;
  const json j = config_to_json(c);
  const SimConfig back = config_from_json(j);
  CHECK(config_to_json(back) == j);
  CHECK(back.arrivals.size() == 2);
  CHECK(back.arrivals[1].idm->v_bar == 20.0);
  CHECK(*back.inter_arrival_stddev == 1.5);
}

TEST_CASE("csv and metrics documents") {
  SimConfig c;
  c.arrivals = {{0.0, Road::Main, VehicleClass::CAV, 24.0, std::nullopt}};
  c.total_vehicles = 1;
  const SimLog log = run(c);
  std::ostringstream traj, events;
  write_trajectories_csv(traj, log);
  write_events_csv(events, log, safety_audit(log, c.limits));
  CHECK(traj.str().rfind("t,id,class,road,p,v,u,plan_epoch,replanned\n", 0) == 0);
  CHECK(traj.str().find("\n0,1,CAV,main,-300,24,") != std::string::npos);
  CHECK(events.str().rfind("t,kind,id,other,value\n", 0) == 0);
  CHECK(events.str().find(",plan,1,") != std::string::npos);

  const json m = metrics_to_json(compute_run_metrics(log, c.limits));
  for (const char* key : {"avg_travel_time", "output_flux", "mean_energy", "violations", "replan_count",
                          "vehicles"})
    CHECK(m.contains(key));
  CHECK(m["vehicles"] == 1);
}

TEST_CASE("sweep rows and seeds") {
  SweepSpec spec;
  spec.penetrations = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  spec.volumes = {900.0, 1200.0, 1500.0};
  spec.replications = 1;
  spec.base.total_vehicles = 6;
  const auto rows = run_sweep(spec, 4);
  REQUIRE(rows.size() == 18);
  for (const SweepRow& r : rows) CHECK(r.ok);
  // Row order follows the sweep grid, not thread scheduling.
  CHECK(rows[0].penetration == 0.0);
  CHECK(rows[3].penetration == 0.2);
  CHECK(rows[1].volume == 1200.0);
  // Penetration levels share arrival streams at a given volume and replication.
  CHECK(rows[0].seed == rows[3].seed);
  CHECK(rows[0].seed != rows[1].seed);
  CHECK(sweep_seed(1, 1500.0, 0) != sweep_seed(1, 1500.0, 1));

  std::ostringstream a, b;
  write_sweep_csv(a, rows);
  write_sweep_csv(b, run_sweep(spec, 1));
  CHECK(a.str() == b.str());

  spec.replications = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.replications = 1;
  spec.penetrations = {1.2};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}
