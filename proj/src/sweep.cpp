#include "mixmerge/sweep.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <ostream>
#include <thread>

#include "mixmerge/io.hpp"
#include "mixmerge/rng.hpp"

namespace mixmerge {

void SweepSpec::validate() const {
  if (penetrations.empty()) throw ConfigError("penetrations", "must not be empty");
  if (volumes.empty()) throw ConfigError("volumes", "must not be empty");
  if (replications < 1) throw ConfigError("replications", "must be >= 1");
  for (double p : penetrations)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("penetrations", "entries must be in [0, 1]");
  for (double v : volumes)
    if (!(v > 0.0)) throw ConfigError("volumes", "entries must be > 0");
  base.validate();
}

std::size_t SweepRow::violations() const {
  std::size_t total = 0;
  for (const auto& [kind, n] : metrics.violations) total += n;
  return total;
}

std::uint64_t sweep_seed(std::uint64_t base_seed, double volume, int replication) {
  const auto volume_key = static_cast<std::uint64_t>(std::llround(volume * 1000.0));
  return stream_key(base_seed, "sweep", volume_key, static_cast<std::uint64_t>(replication));
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs) {
  spec.validate();
  std::vector<SweepRow> rows;
  for (double pen : spec.penetrations)
    for (double vol : spec.volumes)
      for (int rep = 0; rep < spec.replications; ++rep) {
        SweepRow row;
        row.penetration = pen;
        row.volume = vol;
        row.replication = rep;
        row.seed = sweep_seed(spec.base.seed, vol, rep);
        rows.push_back(row);
      }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      try {
        SimConfig cfg = spec.base;
        cfg.penetration = row.penetration;
        cfg.volume = row.volume;
        cfg.seed = row.seed;
        const SimLog log = run(cfg);
        row.metrics = compute_run_metrics(log, cfg.limits);
        row.ok = log.completed;
        if (!log.completed) row.error = "run did not drain before the time guard";
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(rows.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

namespace {
std::string csv_text(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "penetration,volume,replication,seed,avg_travel_time,output_flux,mean_energy,violations,"
         "replans,status\n";
  for (const SweepRow& r : rows) {
    out << format_number(r.penetration) << ',' << format_number(r.volume) << ',' << r.replication
        << ',' << r.seed << ',' << format_number(r.metrics.avg_travel_time) << ','
        << format_number(r.metrics.output_flux) << ',' << format_number(r.metrics.mean_energy) << ','
        << r.violations() << ',' << r.metrics.replans << ','
        << (r.ok ? std::string("ok") : csv_text(r.error)) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  struct Acc {
    int runs = 0;
    double travel = 0.0, flux = 0.0, energy = 0.0, violations = 0.0, replans = 0.0;
  };
  std::map<std::pair<double, double>, Acc> cells;
  std::vector<std::pair<double, double>> order;
  for (const SweepRow& r : rows) {
    const auto key = std::make_pair(r.penetration, r.volume);
    if (!cells.count(key)) order.push_back(key);
    Acc& a = cells[key];
    if (!r.ok) continue;
    ++a.runs;
    a.travel += r.metrics.avg_travel_time;
    a.flux += r.metrics.output_flux;
    a.energy += r.metrics.mean_energy;
    a.violations += static_cast<double>(r.violations());
    a.replans += r.metrics.replans;
  }
  out << "penetration,volume,runs,mean_avg_travel_time,mean_output_flux,mean_energy,"
         "mean_violations,mean_replans\n";
  for (const auto& key : order) {
    const Acc& a = cells[key];
    const double n = a.runs > 0 ? a.runs : 1.0;
    out << format_number(key.first) << ',' << format_number(key.second) << ',' << a.runs << ','
        << format_number(a.travel / n) << ',' << format_number(a.flux / n) << ','
        << format_number(a.energy / n) << ',' << format_number(a.violations / n) << ','
        << format_number(a.replans / n) << '\n';
  }
}

}  // namespace mixmerge
