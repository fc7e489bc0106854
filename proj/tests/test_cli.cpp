#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mergesim_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int mergesim(const std::string& args, const fs::path& stderr_file = "/dev/null") {
  const std::string cmd =
      std::string(MERGESIM_BIN) + " " + args + " > /dev/null 2> " + stderr_file.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

const std::string kPresets = PRESET_DIR;

}  // namespace

TEST_CASE("run on the simulation preset writes three files") {
  const fs::path out = scratch("run");
  CHECK(mergesim("run --config " + kPresets + "/paper-sim.json --seed 3 --out " + out.string()) == 0);
  CHECK(fs::file_size(out / "trajectories.csv") > 1000);
  CHECK(fs::exists(out / "events.csv"));
  CHECK(slurp(out / "metrics.json").find("\"avg_travel_time\"") != std::string::npos);
}

TEST_CASE("run on the scaled lab preset") {
  const fs::path out = scratch("lab");
  CHECK(mergesim("run --config " + kPresets + "/paper-lab.json --out " + out.string()) == 0);
  // Every logged position sits inside the 1.6 m control zone.
  std::ifstream in(out / "trajectories.csv");
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (int k = 0; k < 5; ++k) std::getline(ss, cell, ',');
    const double p = std::stod(cell);
    CHECK(p >= -1.6);
    CHECK(p <= 0.0);
    ++rows;
  }
  CHECK(rows > 10);
}

TEST_CASE("invalid penetration is rejected with its name") {
  const fs::path dir = scratch("bad");
  std::ofstream(dir / "bad.json") << R"({"penetration": 1.5})";
  const fs::path err = dir / "stderr.txt";
  CHECK(mergesim("run --config " + (dir / "bad.json").string() + " --out " + (dir / "o").string(), err) == 2);
  CHECK(slurp(err).find("[penetration]") != std::string::npos);
  CHECK(mergesim("check --config " + (dir / "bad.json").string(), err) == 2);
  CHECK(mergesim("check --config " + kPresets + "/paper-sim.json") == 0);
  CHECK(mergesim("check --config " + (dir / "missing.json").string()) == 2);
}

TEST_CASE("sweep writes one row per run and repeats byte for byte") {
  const fs::path dir = scratch("sweep");
  std::ofstream(dir / "base.json") << R"({"total_vehicles": 8, "seed": 5})";
  const std::string common = "sweep --config " + (dir / "base.json").string() +
                             " --penetrations 0,0.2,0.4,0.6,0.8,1 --volumes 900,1200,1500 --replications 1";
  CHECK(mergesim(common + " --jobs 3 --out " + (dir / "a").string()) == 0);
  CHECK(mergesim(common + " --jobs 1 --out " + (dir / "b").string()) == 0);
  CHECK(line_count(dir / "a" / "sweep.csv") == 19);
  CHECK(line_count(dir / "a" / "aggregate.csv") == 19);
  CHECK(slurp(dir / "a" / "sweep.csv") == slurp(dir / "b" / "sweep.csv"));
  CHECK(slurp(dir / "a" / "aggregate.csv") == slurp(dir / "b" / "aggregate.csv"));
}
