#include <random>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "drv/error.hpp"
#include "drv/scenario.hpp"
#include "helpers.hpp"
#include "support/random_scenarios.hpp"

using namespace drv;
using nlohmann::json;

namespace {

std::string error_code(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    return e.code();
  }
  return "none";
}

json one_waypoint() { return json::parse(unit::kOneWaypoint); }

bool has_code(const std::vector<Diagnostic>& d, const std::string& code) {
  for (const auto& x : d) {
    if (x.code == code) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("23 mph wind is stored as 23 x 0.44704 m/s") {
  auto j = one_waypoint();
  j["weather"] = {{"layers", {{{"lower", "0 ft"}, {"upper", "400 ft"}, {"speed", "23 mph"}, {"direction_deg", 90}}}}};
  const auto s = parse_scenario(j.dump());
  REQUIRE(s.weather.layers.size() == 1);
  CHECK(s.weather.layers[0].speed_mps == doctest::Approx(10.28192).epsilon(1e-12));
  CHECK(s.weather.layers[0].alt_upper_m == doctest::Approx(121.92).epsilon(1e-12));
}

TEST_CASE("minimal scenario takes defaults") {
  auto j = one_waypoint();
  j.erase("sim");
  j.erase("gps");
  const auto s = parse_scenario(j.dump());
  CHECK(s.sim.dt_s == 0.1);
  CHECK(s.sim.rtl_comms_timeout_s == 5.0);
  CHECK(s.monitors.empty());
  CHECK_FALSE(s.fuzz.has_value());
  CHECK(validate(s).empty());
}

TEST_CASE("beach scenario at 15 mph: three monitors, one wind layer") {
  auto j = json::parse(unit::kOneWaypoint);
  j["weather"] = {{"layers", {{{"lower", "0 ft"}, {"upper", "400 ft"}, {"speed", "15 mph"}, {"direction_deg", 90}}}}};
  j["gps"] = {{"satellites", 15}};
  j["regions"] = {{{"id", "BEACH"},
                   {"vertices", {{{"lat_deg", 42.2}, {"lon_deg", -86.40}}, {{"lat_deg", 42.2}, {"lon_deg", -86.399}},
                                 {{"lat_deg", 42.21}, {"lon_deg", -86.399}}, {{"lat_deg", 42.21}, {"lon_deg", -86.40}}}},
                   {"floor", "0 ft"},
                   {"ceiling", "400 ft"}}};
  j["monitors"] = {{{"id", "C2.1"}, {"type", "no_fly_zone"}, {"regions", {"BEACH"}}},
                   {{"id", "C2.2"}, {"type", "safe_landing"}, {"forbidden", {"BEACH"}}},
                   {{"id", "C2.3"}, {"type", "drift"}, {"absolute", "10 m"}}};
  const auto s = parse_scenario(j.dump());
  CHECK(s.monitors.size() == 3);
  CHECK(s.weather.layers.size() == 1);
  CHECK(s.weather.layers[0].speed_mps == doctest::Approx(15 * 0.44704));
  CHECK(validate(s).empty());
}

TEST_CASE("parse errors carry codes") {
  CHECK(error_code("{") == "SYNTAX_ERROR");
  auto j = one_waypoint();
  j["bogus"] = 1;
  CHECK(error_code(j.dump()) == "UNKNOWN_FIELD");
  j = one_waypoint();
  j.erase("drones");
  CHECK(error_code(j.dump()) == "MISSING_FIELD");
  j = one_waypoint();
  j["drones"][0]["cruise_speed"] = "10";
  CHECK(error_code(j.dump()) == "MISSING_UNIT");
  j["drones"][0]["cruise_speed"] = "10 furlongs";
  CHECK(error_code(j.dump()) == "BAD_UNIT");
  j["drones"][0]["cruise_speed"] = "10 m";
  CHECK(error_code(j.dump()) == "BAD_UNIT");
  j = one_waypoint();
  j["format_version"] = "2";
  CHECK(error_code(j.dump()) == "UNSUPPORTED_VERSION");
  j = one_waypoint();
  j["name"] = 5;
  CHECK(error_code(j.dump()) == "TYPE_ERROR");
}

TEST_CASE("units convert") {
  auto j = one_waypoint();
  j["drones"][0]["cruise_speed"] = "36 km/h";
  CHECK(error_code(j.dump()) == "BAD_UNIT");
  j["drones"][0]["cruise_speed"] = "10 m/s";
  j["drones"][0]["accept_radius"] = "10 ft";
  j["sim"]["max_duration"] = "2 min";
  const auto s = parse_scenario(j.dump());
  CHECK(s.drones[0].cruise_speed_mps == 10.0);
  CHECK(s.drones[0].accept_radius_m == doctest::Approx(3.048));
  CHECK(s.sim.max_duration_s == 120.0);
}

TEST_CASE("overlapping wind layers are reported") {
  auto j = one_waypoint();
  j["weather"] = {{"layers",
                   {{{"lower", "0 ft"}, {"upper", "400 ft"}, {"speed", "5 mph"}, {"direction_deg", 0}},
                    {{"lower", "300 ft"}, {"upper", "600 ft"}, {"speed", "5 mph"}, {"direction_deg", 0}}}}};
  const auto d = validate(parse_scenario(j.dump()));
  CHECK(has_code(d, "OVERLAPPING_WIND_LAYERS"));
}

TEST_CASE("monitor region references resolve") {
  const auto s = load_scenario(unit::fixture("uc2_beach.json"));
  CHECK(validate(s).empty());
  auto j = json::parse(serialize_scenario(s));
  j["monitors"][0]["regions"] = {"NOPE"};
  CHECK(has_code(validate(parse_scenario(j.dump())), "UNKNOWN_REGION"));
}

TEST_CASE("fuzz max below the current value") {
  auto j = one_waypoint();
  j["weather"] = {{"layers", {{{"lower", "0 m"}, {"upper", "120 m"}, {"speed", "20 mps"}, {"direction_deg", 0}}}}};
  j["fuzz"] = {{"param", "weather.layers[0].speed"}, {"max", "18 mps"}, {"variants", 2}};
  CHECK(has_code(validate(parse_scenario(j.dump())), "FUZZ_MAX_BELOW_CURRENT"));
}

TEST_CASE("other semantic diagnostics") {
  auto j = one_waypoint();
  j["missions"][0]["drone"] = "X";
  CHECK(has_code(validate(parse_scenario(j.dump())), "UNKNOWN_DRONE"));
  j = one_waypoint();
  j["drones"].push_back(j["drones"][0]);
  CHECK(has_code(validate(parse_scenario(j.dump())), "DUPLICATE_ID"));
  j = one_waypoint();
  j["gps"] = {{"satellites", 10}, {"deprivation_pct", 20}};
  CHECK(has_code(validate(parse_scenario(j.dump())), "GPS_PARAM_CONFLICT"));
  j = one_waypoint();
  j["monitors"] = {{{"id", "F"}, {"type", "drift"}, {"fraction", 0.1}}};
  CHECK(has_code(validate(parse_scenario(j.dump())), "FRACTION_ON_WAYPOINT_MISSION"));
}

TEST_CASE("validate is deterministic") {
  auto j = one_waypoint();
  j["missions"][0]["drone"] = "X";
  j["gps"] = {{"satellites", 10}, {"deprivation_pct", 20}};
  const auto s = parse_scenario(j.dump());
  CHECK(validate(s) == validate(s));
  CHECK(validate(s).size() >= 2);
}

TEST_CASE("parameter paths") {
  auto j = one_waypoint();
  j["weather"] = {{"layers", {{{"lower", "0 ft"}, {"upper", "400 ft"}, {"speed", "23 mph"}, {"direction_deg", 90}}}}};
  auto s = parse_scenario(j.dump());
  CHECK(read_param(s, "weather.layers[0].speed") == doctest::Approx(10.28192));
  auto code = [&](const char* path) {
    try {
      resolve_param_path(s, path);
    } catch (const Error& e) {
      return e.code();
    }
    return std::string("none");
  };
  CHECK(code("weather.layers[3].speed") == "PATH_NOT_FOUND");
  CHECK(code("drones[0].id") == "PATH_NOT_NUMERIC");
  auto f = resolve_param_path(s, "weather.layers[0].speed");
  f.set(4.0);
  CHECK(s.weather.layers[0].speed_mps == 4.0);
}

TEST_CASE("serialize then parse is a fixed point") {
  for (const char* name : {"uc2_beach.json", "uc1_airbase.json", "circle_fuzz_cruise9.json"}) {
    const auto s = load_scenario(unit::fixture(name));
    const auto text = serialize_scenario(s);
    const auto again = parse_scenario(text);
    CHECK(again == s);
    CHECK(serialize_scenario(again) == text);
  }
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto s = testsupport::random_scenario(seed);
    CHECK(parse_scenario(serialize_scenario(s)) == s);
  }
}

TEST_CASE("load_scenario reports a missing file") {
  CHECK_THROWS_WITH_AS(load_scenario("/nonexistent/x.json"), doctest::Contains("x.json"), Error);
}
