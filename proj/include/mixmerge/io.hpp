#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mixmerge/engine.hpp"
#include "mixmerge/metrics.hpp"

namespace mixmerge {

/// "%.9g" rendering used by every CSV and JSON output.
std::string format_number(double x);

/// Builds a config from a JSON document whose keys mirror SimConfig. Missing
/// keys keep their defaults; unknown keys and bad values raise ConfigError
/// naming the field path.
SimConfig config_from_json(const nlohmann::json& doc);
SimConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const SimConfig& config);

void write_trajectories_csv(std::ostream& out, const SimLog& log);
void write_events_csv(std::ostream& out, const SimLog& log, const SafetyReport& report);
nlohmann::json metrics_to_json(const RunMetrics& m);

}  // namespace mixmerge
