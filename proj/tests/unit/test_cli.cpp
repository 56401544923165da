#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "drv/cli.hpp"
#include "drv/engine.hpp"
#include "helpers.hpp"

using namespace drv;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "drv_sim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "drv_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("validate") {
  auto r = run({"validate", unit::fixture("uc2_beach.json")});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(r.err.empty());

  r = run({"validate", unit::fixture("invalid_overlapping_layers.json")});
  CHECK(r.code == 2);
  CHECK(count_lines(r.out) == 1);
  CHECK(r.out.rfind("OVERLAPPING_WIND_LAYERS", 0) == 0);

  r = run({"validate", "/nonexistent/scenario.json"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("IO_ERROR", 0) == 0);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"fly"}).code == 2);
  CHECK(run({"run", unit::fixture("uc2_beach.json")}).code == 2);
  CHECK(run({"run", unit::fixture("uc2_beach.json"), "--out", "x", "--variants", "0"}).code == 2);
  CHECK(run({"run", unit::fixture("invalid_overlapping_layers.json"), "--out", scratch("never").string()}).code == 2);
  CHECK_FALSE(fs::exists(scratch("never")));
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("run: beach passes at 23 mph and fails at 30 mph") {
  auto r = run({"run", unit::fixture("uc2_beach.json"), "--out", scratch("calm").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("overall PASSED") != std::string::npos);
  CHECK(fs::exists(scratch("calm") / "variant_0" / "telemetry.csv"));
  CHECK_FALSE(fs::exists(scratch("calm") / "variant_1"));

  r = run({"run", unit::fixture("uc2_beach_30mph.json"), "--out", scratch("strong").string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("overall FAILED") != std::string::npos);
  CHECK(r.out.find("C2.") != std::string::npos);
}

TEST_CASE("run: same seed gives the same tree") {
  const auto a = scratch("seed_a"), b = scratch("seed_b");
  fs::remove_all(a);
  fs::remove_all(b);
  CHECK(run({"run", unit::fixture("circle_fuzz_cruise9.json"), "--out", a.string(), "--seed", "7", "--svg"}).code == 0);
  CHECK(run({"run", unit::fixture("circle_fuzz_cruise9.json"), "--out", b.string(), "--seed", "7", "--svg", "--jobs",
             "3"})
            .code == 0);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto rel = fs::relative(e.path(), a);
    CHECK(slurp(e.path()) == slurp(b / rel));
  }
  CHECK(files == 1 + 3 * 3);
  const auto j = json::parse(slurp(a / "report.json"));
  CHECK(j["runs"][0]["seed"] == 7);
}

TEST_CASE("run: --variants overrides the fuzz plan") {
  const auto dir = scratch("variants");
  fs::remove_all(dir);
  const auto r = run({"run", unit::fixture("circle_fuzz_cruise9.json"), "--out", dir.string(), "--variants", "3"});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "variant_3"));
  CHECK(r.out.find("param=4.500") != std::string::npos);
  CHECK(r.out.find("boundary weather.layers[0].speed=") != std::string::npos);
}

TEST_CASE("check reproduces the violations found during run") {
  const auto dir = scratch("airbase");
  fs::remove_all(dir);
  CHECK(run({"run", unit::fixture("uc1_airbase.json"), "--out", dir.string()}).code == 1);
  const auto r = run({"check", (dir / "variant_0" / "telemetry.csv").string(), unit::fixture("uc1_airbase.json")});
  CHECK(r.code == 1);
  const auto report = json::parse(slurp(dir / "report.json"));
  const auto& violations = report["runs"][0]["violations"];
  CHECK(count_lines(r.out) == violations.size() + 1);
  for (const auto& v : violations) {
    CHECK(r.out.find(v["monitor"].get<std::string>() + " t=") != std::string::npos);
    CHECK(r.out.find(v["message"].get<std::string>()) != std::string::npos);
  }

  const auto calm = scratch("calm_check");
  fs::remove_all(calm);
  CHECK(run({"run", unit::fixture("uc2_beach.json"), "--out", calm.string()}).code == 0);
  CHECK(run({"check", (calm / "variant_0" / "telemetry.csv").string(), unit::fixture("uc2_beach.json")}).code == 0);
}

TEST_CASE("check on hand-written telemetry") {
  auto j = json::parse(unit::kOneWaypoint);
  j["drones"].push_back(j["drones"][0]);
  j["drones"][1]["id"] = "E";
  j["missions"].push_back(j["missions"][0]);
  j["missions"][1]["drone"] = "E";
  j["monitors"] = {{{"id", "SEP"}, {"type", "min_separation"}, {"min", "10 m"}}};
  const auto scenario = scratch("pair.json");
  write(scenario, j.dump());

  std::string csv = std::string(engine::kTelemetryHeader) + "\n";
  for (int k = 0; k < 3; ++k) {
    const auto t = std::to_string(0.1 * k);
    csv += t + ",D,0,0,30,0,0,30,1,0,0,0,MISSION,1,0,0\n";
    csv += t + ",E,5,0,30,5,0,30,1,0,0,0,MISSION,1,0,0\n";
  }
  write(scratch("pair.csv"), csv);
  auto r = run({"check", scratch("pair.csv").string(), scenario.string()});
  CHECK(r.code == 1);
  CHECK(count_lines(r.out) == 2);
  CHECK(r.out.rfind("SEP t=0.000 drones=D,E measured=5.000", 0) == 0);

  std::string backwards = std::string(engine::kTelemetryHeader) + "\n";
  backwards += "1.0,D,0,0,30,0,0,30,1,0,0,0,MISSION,1,0,0\n";
  backwards += "0.5,D,0,0,30,0,0,30,1,0,0,0,MISSION,1,0,0\n";
  write(scratch("back.csv"), backwards);
  r = run({"check", scratch("back.csv").string(), scenario.string()});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("NONMONOTONE_TIME", 0) == 0);

  write(scratch("bad.csv"), std::string(engine::kTelemetryHeader) + "\n1,2,3\n");
  r = run({"check", scratch("bad.csv").string(), scenario.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("row 2") != std::string::npos);
}
