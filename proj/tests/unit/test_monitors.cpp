#include <algorithm>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "drv/engine.hpp"
#include "drv/error.hpp"
#include "drv/monitors.hpp"
#include "helpers.hpp"
#include "support/random_scenarios.hpp"

using namespace drv;
using namespace drv::monitors;
using engine::TelemetryRecord;

namespace {

TelemetryRecord rec(double t, const std::string& id, geo::EnuPoint p, Mode mode = Mode::MISSION) {
  TelemetryRecord r;
  r.t_s = t;
  r.drone_id = id;
  r.true_pos = p;
  r.perceived_pos = p;
  r.mode = mode;
  return r;
}

// Drone "A" flying along `path` one record per 0.1 s tick.
std::vector<TelemetryRecord> trace(const std::vector<geo::EnuPoint>& path, Mode mode = Mode::MISSION) {
  std::vector<TelemetryRecord> out;
  for (std::size_t k = 0; k < path.size(); ++k) out.push_back(rec(0.1 * k, "A", path[k], mode));
  return out;
}

const geo::Region kSquare{"NFZ", {{0, 0, 0}, {10, 0, 0}, {10, 10, 0}, {0, 10, 0}}, 0.0, 120.0};

PlannedPath circle_plan(double radius) {
  PlannedPath p;
  p.drone_id = "A";
  p.start = {0, radius, 0};
  p.circle = PlannedPath::Circle{{0, 0, 0}, radius};
  for (int k = 0; k < 36; ++k) {
    const double th = k * std::numbers::pi / 18;
    p.waypoints.push_back({-radius * std::sin(th), radius * std::cos(th), 30});
  }
  p.accept_radius_m = 1.0;
  return p;
}

std::vector<geo::EnuPoint> arc(double radius, int n) {
  std::vector<geo::EnuPoint> out;
  for (int k = 0; k < n; ++k) {
    const double th = 0.3 + k * 0.01;
    out.push_back({radius * std::cos(th), radius * std::sin(th), 30});
  }
  return out;
}

}  // namespace

TEST_CASE("separation: 9 m apart breaks a 10 m minimum") {
  const std::vector<TelemetryRecord> t{rec(0, "A", {0, 0, 30}), rec(0, "B", {9, 0, 30})};
  const auto v = check_separation(t, 10.0, std::nullopt);
  REQUIRE(v.size() == 1);
  CHECK(v[0].measured == 9.0);
  CHECK(v[0].drone_ids == std::vector<std::string>{"A", "B"});
}

TEST_CASE("separation: exactly the minimum is fine, grounded drones are ignored") {
  CHECK(check_separation({rec(0, "A", {0, 0, 30}), rec(0, "B", {10, 0, 30})}, 10.0, std::nullopt).empty());
  CHECK(check_separation({rec(0, "A", {0, 0, 0.5}), rec(0, "B", {1, 0, 30})}, 10.0, std::nullopt).empty());
}

TEST_CASE("separation: consecutive ticks merge into one episode with the closest distance") {
  std::vector<TelemetryRecord> t;
  for (int k = 0; k < 30; ++k) {
    const double gap = std::abs(15.0 - k);
    t.push_back(rec(0.1 * k, "A", {0, 0, 30}));
    t.push_back(rec(0.1 * k, "B", {gap + 1, 0, 30}));
  }
  const auto v = check_separation(t, 10.0, std::nullopt);
  REQUIRE(v.size() == 1);
  CHECK(v[0].measured == doctest::Approx(1.0));
  CHECK(v[0].t_s == doctest::Approx(0.7));
}

TEST_CASE("separation: mode filter") {
  const std::vector<TelemetryRecord> mixed{rec(0, "A", {0, 0, 30}, Mode::RTL), rec(0, "B", {1, 0, 30})};
  CHECK(check_separation(mixed, 10.0, Mode::MISSION).empty());
  CHECK(check_separation(mixed, 10.0, Mode::RTL).empty());
  const std::vector<TelemetryRecord> both{rec(0, "A", {0, 0, 30}, Mode::RTL), rec(0, "B", {1, 0, 30}, Mode::RTL)};
  CHECK(check_separation(both, 10.0, Mode::RTL).size() == 1);
  CHECK(check_separation(both, 10.0, Mode::MISSION).empty());
}

TEST_CASE("separation: parallel and serial agree on random runs") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto s = testsupport::random_scenario(seed);
    const auto run = engine::simulate(s, seed);
    for (double min : {2.0, 10.0, 40.0}) {
      CHECK(check_separation(run.telemetry, min, std::nullopt) ==
            check_separation_serial(run.telemetry, min, std::nullopt));
    }
  }
}

TEST_CASE("no-fly: twenty ticks inside make one episode") {
  std::vector<geo::EnuPoint> path;
  for (int k = 0; k < 40; ++k) path.push_back({-5.0 + 0.5 * k, 5, 30});  // inside for x in [0, 10]
  const auto v = check_no_fly(trace(path), std::span(&kSquare, 1));
  REQUIRE(v.size() == 1);
  CHECK(v[0].t_s == doctest::Approx(1.0));
  CHECK(v[0].measured == doctest::Approx(5.0));
}

TEST_CASE("no-fly: boundary counts, above the ceiling does not") {
  CHECK(check_no_fly(trace({{10, 5, 30}}), std::span(&kSquare, 1)).size() == 1);
  CHECK(check_no_fly(trace({{5, 5, 130}}), std::span(&kSquare, 1)).empty());
}

TEST_CASE("safe landing with a forbidden region") {
  const std::vector<geo::Region> water{{"WATER", {{-100, -100, 0}, {0, -100, 0}, {0, 100, 0}, {-100, 100, 0}}, 0, 120}};
  auto land_at = [](geo::EnuPoint p) {
    return std::vector<TelemetryRecord>{rec(0, "A", {p.east_m, p.north_m, 10}), rec(0.1, "A", {p.east_m, p.north_m, 0.5}, Mode::LAND),
                                        rec(0.2, "A", {p.east_m, p.north_m, 0}, Mode::LANDED)};
  };
  CHECK(check_safe_landing(land_at({50, 0, 0}), nullptr, &water).empty());
  const auto v = check_safe_landing(land_at({-30, 0, 0}), nullptr, &water);
  REQUIRE(v.size() == 1);
  CHECK(v[0].t_s == doctest::Approx(0.1));

  // Pushed down while still "flying": the final record counts as the landing.
  const std::vector<TelemetryRecord> blown{rec(0, "A", {10, 0, 10}), rec(0.1, "A", {-40, 0, 0.2})};
  CHECK(check_safe_landing(blown, nullptr, &water).size() == 1);
}

TEST_CASE("safe landing with an allowed pad") {
  const std::vector<geo::Region> pad{{"PAD", {{-2, -2, 0}, {2, -2, 0}, {2, 2, 0}, {-2, 2, 0}}, 0, 120}};
  const std::vector<TelemetryRecord> home{rec(0, "A", {0, 0, 5}), rec(0.1, "A", {0, 0, 0}, Mode::LANDED)};
  CHECK(check_safe_landing(home, &pad, nullptr).empty());
  const std::vector<TelemetryRecord> off{rec(0, "A", {9, 0, 5}), rec(0.1, "A", {9, 0, 0}, Mode::LANDED)};
  const auto v = check_safe_landing(off, &pad, nullptr);
  REQUIRE(v.size() == 1);
  CHECK(v[0].measured == doctest::Approx(7.0));
}

TEST_CASE("drift as a fraction of the circle radius") {
  const auto plan = circle_plan(50);
  DriftBound b;
  b.fraction = 0.10;
  CHECK(check_drift(trace(arc(52, 10)), {plan}, b).empty());
  const auto v = check_drift(trace(arc(57, 10)), {plan}, b);
  REQUIRE(v.size() == 1);
  CHECK(v[0].measured == doctest::Approx(0.14));
  CHECK(v[0].unit == "fraction");
}

TEST_CASE("drift bound on a straight leg") {
  PlannedPath plan;
  plan.drone_id = "A";
  plan.start = {0, 0, 30};
  plan.waypoints = {{200, 0, 30}};
  DriftBound b;
  b.absolute_m = 10.0;
  const auto v = check_drift(trace({{50, 12, 30}, {60, 12, 30}}), {plan}, b);
  REQUIRE(v.size() == 1);
  CHECK(v[0].measured == doctest::Approx(12.0));
  b.fraction = 0.1;
  b.absolute_m.reset();
  CHECK_THROWS_AS(check_drift(trace({{50, 12, 30}}), {plan}, b), Error);
}

TEST_CASE("drift wind gate") {
  const auto plan = circle_plan(50);
  DriftBound b;
  b.fraction = 0.10;
  b.wind_gate_mps = 5.0;
  auto t = trace(arc(60, 5));
  CHECK(check_drift(t, {plan}, b).empty());
  for (auto& r : t) r.wind_e = -6.0;
  CHECK(check_drift(t, {plan}, b).size() == 1);
}

TEST_CASE("drift grows with the offset") {
  const auto plan = circle_plan(50);
  DriftBound b;
  b.absolute_m = 1.0;
  double prev = 0.0;
  for (double r = 52; r < 90; r += 3) {
    const auto v = check_drift(trace(arc(r, 5)), {plan}, b);
    REQUIRE(v.size() == 1);
    CHECK(v[0].measured > prev);
    prev = v[0].measured;
  }
}

TEST_CASE("waypoint reach") {
  PlannedPath plan;
  plan.drone_id = "A";
  plan.start = {0, 0, 30};
  plan.waypoints = {{50, 0, 30}, {100, 0, 30}};
  plan.accept_radius_m = 1.0;
  CHECK(check_waypoint_reach(trace({{0, 0, 30}, {49.5, 0, 30}, {100.5, 0, 30}}), {plan}, 1.0).empty());
  const auto v = check_waypoint_reach(trace({{0, 0, 30}, {49.5, 0, 30}, {40, 0, 30}}), {plan}, 1.0);
  REQUIRE(v.size() == 1);
  CHECK(v[0].measured == doctest::Approx(50.5));
  PlannedPath empty = plan;
  empty.waypoints.clear();
  CHECK(check_waypoint_reach(trace({{0, 0, 30}}), {empty}, 1.0).empty());
}

TEST_CASE("duration bound") {
  engine::DroneOutcome o{"A", true, {}, 700.0, 0.0};
  CHECK(check_duration({o}, {}, 600.0, 1.25).empty());
  o.duration_s = 800.0;
  const auto v = check_duration({o}, {}, 600.0, 1.25);
  REQUIRE(v.size() == 1);
  CHECK(v[0].measured == 800.0);
  o.duration_s = 10.0;
  o.completed = false;
  CHECK(check_duration({o}, {}, 600.0, 1.25).size() == 1);
}

TEST_CASE("no monitors pass vacuously") {
  const auto s = parse_scenario(unit::kOneWaypoint);
  const auto run = engine::simulate(s, 1);
  const auto v = evaluate({}, run, s);
  CHECK(v.status == Status::PASSED);
  CHECK(v.violations.empty());
}

TEST_CASE("fixtures: beach at 30 mph and the airbase crossing fail") {
  const auto beach = load_scenario(unit::fixture("uc2_beach_30mph.json"));
  const auto b = evaluate(beach.monitors, engine::simulate(beach, beach.sim.seed), beach);
  CHECK(b.status == Status::FAILED);
  CHECK(std::any_of(b.violations.begin(), b.violations.end(),
                    [](const auto& v) { return v.monitor_id == "C2.2" || v.monitor_id == "C2.3"; }));

  const auto base = load_scenario(unit::fixture("uc1_airbase.json"));
  const auto a = evaluate(base.monitors, engine::simulate(base, base.sim.seed), base);
  CHECK(a.status == Status::FAILED);
  REQUIRE(a.violations.size() == 1);
  CHECK(a.violations[0].monitor_id == "C1.2");
  CHECK(a.violations[0].message.find("TEMP_NFZ") != std::string::npos);
}

TEST_CASE("outcomes recovered from telemetry match the engine") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto s = testsupport::random_scenario(seed);
    const auto run = engine::simulate(s, seed);
    const auto derived = derive_outcomes(run.telemetry, planned_paths(s));
    REQUIRE(derived.size() == run.outcomes.size());
    for (std::size_t i = 0; i < derived.size(); ++i) {
      CHECK(derived[i].drone_id == run.outcomes[i].drone_id);
      CHECK(derived[i].completed == run.outcomes[i].completed);
      CHECK(derived[i].duration_s == doctest::Approx(run.outcomes[i].duration_s));
      CHECK(derived[i].distance_flown_m == doctest::Approx(run.outcomes[i].distance_flown_m));
      CHECK(derived[i].landed_pos == run.outcomes[i].landed_pos);
    }
  }
}

TEST_CASE("violations come out ordered within each monitor") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto s = testsupport::random_scenario(seed);
    const auto v = evaluate(s.monitors, engine::simulate(s, seed), s);
    for (std::size_t i = 1; i < v.violations.size(); ++i) {
      const auto& a = v.violations[i - 1];
      const auto& b = v.violations[i];
      if (a.monitor_id == b.monitor_id) CHECK(a.t_s <= b.t_s);
    }
    CHECK((v.status == Status::FAILED) == !v.violations.empty());
  }
}
