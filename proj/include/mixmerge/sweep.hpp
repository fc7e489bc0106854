#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mixmerge/engine.hpp"
#include "mixmerge/metrics.hpp"

namespace mixmerge {

struct SweepSpec {
  std::vector<double> penetrations;
  std::vector<double> volumes;
  int replications = 1;
  SimConfig base;

  void validate() const;
};

struct SweepRow {
  double penetration = 0.0;
  double volume = 0.0;
  int replication = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunMetrics metrics;

  std::size_t violations() const;
};

/// Seed of one run. Penetration levels at the same volume and replication
/// share arrival streams, so cells differ only in who is automated.
std::uint64_t sweep_seed(std::uint64_t base_seed, double volume, int replication);

/// Runs every (penetration, volume, replication) combination on `jobs`
/// worker threads. Row order follows the sweep grid, never scheduling.
/// Failed runs are reported in their row; the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Per-(penetration, volume) means over successful replications.
void write_aggregate_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace mixmerge
