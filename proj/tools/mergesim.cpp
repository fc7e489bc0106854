// mergesim: run, sweep and validate mixed-traffic merging scenarios.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "mixmerge/engine.hpp"
#include "mixmerge/io.hpp"
#include "mixmerge/metrics.hpp"
#include "mixmerge/sweep.hpp"

namespace fs = std::filesystem;
using namespace mixmerge;

namespace {

std::vector<double> parse_list(const std::string& text, const char* field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(field, "not a number: '" + item + "'");
    }
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void print_metrics(const RunMetrics& m) {
  std::cout << "vehicles         " << m.vehicles << '\n'
            << "avg travel time  " << format_number(m.avg_travel_time) << " s\n"
            << "output flux      " << format_number(m.output_flux) << " veh/h\n"
            << "mean energy      " << format_number(m.mean_energy) << " m^2/s^2\n"
            << "replans          " << m.replans << '\n';
  for (const auto& [kind, n] : m.violations) std::cout << "violations." << kind << "  " << n << '\n';
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, const fs::path& out_dir) {
  SimConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  const SimLog log = run(cfg);
  const RunMetrics metrics = compute_run_metrics(log, cfg.limits);
  const SafetyReport report = safety_audit(log, cfg.limits);

  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "trajectories.csv");
    write_trajectories_csv(out, log);
  }
  {
    auto out = open_out(out_dir / "events.csv");
    write_events_csv(out, log, report);
  }
  {
    auto out = open_out(out_dir / "metrics.json");
    out << metrics_to_json(metrics).dump(2) << '\n';
  }
  print_metrics(metrics);
  if (!log.completed) {
    std::cerr << "warning: run stopped at the time guard with vehicles still in the zone\n";
    return 3;
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& penetrations,
              const std::string& volumes, int replications, unsigned jobs, const fs::path& out_dir) {
  SweepSpec spec;
  spec.base = load_config(config_path);
  spec.penetrations = parse_list(penetrations, "penetrations");
  spec.volumes = parse_list(volumes, "volumes");
  spec.replications = replications;
  spec.validate();

  const auto rows = run_sweep(spec, jobs);
  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "sweep.csv");
    write_sweep_csv(out, rows);
  }
  {
    auto out = open_out(out_dir / "aggregate.csv");
    write_aggregate_csv(out, rows);
  }
  std::size_t failed = 0;
  for (const SweepRow& r : rows) failed += r.ok ? 0 : 1;
  std::cout << rows.size() << " runs, " << failed << " failed; wrote " << (out_dir / "sweep.csv").string()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-traffic on-ramp merging simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";

  auto* run_cmd = app.add_subcommand("run", "simulate one scenario");
  std::optional<std::uint64_t> seed;
  run_cmd->add_option("--config", config_path, "JSON config")->required();
  run_cmd->add_option("--seed", seed, "override the config seed");
  run_cmd->add_option("--out", out_dir, "output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "penetration x volume grid");
  std::string penetrations, volumes;
  int replications = 1;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep_cmd->add_option("--config", config_path, "base JSON config")->required();
  sweep_cmd->add_option("--penetrations", penetrations, "comma-separated CAV fractions")->required();
  sweep_cmd->add_option("--volumes", volumes, "comma-separated veh/h")->required();
  sweep_cmd->add_option("--replications", replications, "runs per cell")->required();
  sweep_cmd->add_option("--jobs", jobs, "worker threads");
  sweep_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* check_cmd = app.add_subcommand("check", "validate a config and exit");
  check_cmd->add_option("--config", config_path, "JSON config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, seed, out_dir);
    if (sweep_cmd->parsed())
      return cmd_sweep(config_path, penetrations, volumes, replications, jobs, out_dir);
    if (check_cmd->parsed()) {
      load_config(config_path);
      std::cout << "config ok\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
