#include <array>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "drv/vehicle.hpp"

using namespace drv;
using namespace drv::vehicle;

namespace {

const geo::GeoPoint kOrigin{42.207762, -86.393095, 0.0};

DroneConfig config(double cruise = 13.0, double max = 13.0) {
  DroneConfig c;
  c.id = "D";
  c.max_airspeed_mps = max;
  c.cruise_speed_mps = cruise;
  c.climb_rate_mps = 3.0;
  c.descent_rate_mps = 2.0;
  c.accept_radius_m = 1.0;
  return c;
}

DroneState flying(Mode mode, geo::EnuPoint pos) {
  auto s = initial_state({0, 0, 0});
  s.mode = mode;
  s.true_pos = pos;
  s.perceived = {pos, true, 0.0};
  return s;
}

world::GpsFix fix_of(const DroneState& s) { return {s.true_pos, true, 0.0}; }

// A single step may chain edges (TAKEOFF -> MISSION -> LAND).
bool reachable(Mode from, Mode to, int hops = 3) {
  if (from == to) return true;
  if (hops == 0) return false;
  for (Mode m : {Mode::IDLE, Mode::TAKEOFF, Mode::MISSION, Mode::LOITER, Mode::RTL, Mode::LAND, Mode::LANDED}) {
    if (transition_allowed(from, m) && reachable(m, to, hops - 1)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("waypoint missions pass through") {
  Mission m{"D", WaypointsMission{{{42.208, -86.393, 10}, {42.209, -86.393, 20}, {42.21, -86.394, 30}}}};
  const auto pts = expand_mission(m, kOrigin);
  REQUIRE(pts.size() == 3);
  CHECK(pts[2] == geo::to_enu(kOrigin, {42.21, -86.394, 30}));
}

TEST_CASE("circle missions give 36 points per lap on the radius") {
  Mission m{"D", CircleMission{kOrigin, 50.0, 30.0, 8.0, 1}};
  const auto pts = expand_mission(m, kOrigin);
  REQUIRE(pts.size() == 36);
  for (const auto& p : pts) {
    CHECK(std::abs(geo::horizontal_distance(p, {0, 0, 0}) - 50.0) <= 1e-9);
    CHECK(p.up_m == 30.0);
  }
  Mission two{"D", CircleMission{kOrigin, 50.0, 30.0, 8.0, 2}};
  CHECK(expand_mission(two, kOrigin).size() == 72);
}

TEST_CASE("square mission corners") {
  Mission m{"D", SquareMission{kOrigin, 100.0, 20.0, 5.0}};
  const auto pts = expand_mission(m, kOrigin);
  REQUIRE(pts.size() == 5);
  CHECK(pts.front() == pts.back());
  for (const auto& p : pts) {
    CHECK(std::abs(std::abs(p.east_m) - 50.0) <= 1e-9);
    CHECK(std::abs(std::abs(p.north_m) - 50.0) <= 1e-9);
  }
}

TEST_CASE("loiter drifts with the wind") {
  const auto s = flying(Mode::LOITER, {0, 0, 30});
  const auto next = step(s, config(), {}, {{-10.282, 0, 0}}, fix_of(s), 0.1);
  CHECK(next.true_pos.east_m == doctest::Approx(-1.0282));
  CHECK(next.true_pos.north_m == doctest::Approx(0.0));
  CHECK(next.mode == Mode::LOITER);
}

TEST_CASE("mission flies at cruise toward the waypoint") {
  const std::vector<geo::EnuPoint> wps{{100, 0, 30}};
  const auto s = flying(Mode::MISSION, {0, 0, 30});
  const auto next = step(s, config(13.0), wps, {}, fix_of(s), 0.1);
  CHECK(next.velocity_enu.east_m == doctest::Approx(13.0));
  CHECK(next.velocity_enu.north_m == doctest::Approx(0.0));
}

TEST_CASE("headwind above max airspeed loses ground") {
  const std::vector<geo::EnuPoint> wps{{100, 0, 30}};
  auto s = flying(Mode::MISSION, {0, 0, 30});
  const world::WindSample wind{{-30 * 0.44704, 0, 0}};
  const auto next = step(s, config(13.0), wps, wind, fix_of(s), 0.1);
  CHECK(next.velocity_enu.east_m == doctest::Approx(13.0 - 13.4112));
  for (int i = 0; i < 1000; ++i) s = step(s, config(13.0), wps, wind, fix_of(s), 0.1);
  CHECK(s.true_pos.east_m < 0.0);
  CHECK(s.mode == Mode::MISSION);
}

TEST_CASE("commanded airspeed never exceeds the cap") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> c(-200, 200), alt(0, 100), v(1, 30);
  const std::array modes{Mode::TAKEOFF, Mode::MISSION, Mode::RTL, Mode::LAND, Mode::LOITER};
  for (int i = 0; i < 2000; ++i) {
    const auto cfg = config(v(gen), v(gen));
    const std::vector<geo::EnuPoint> wps{{c(gen), c(gen), alt(gen)}, {c(gen), c(gen), alt(gen)}};
    auto s = flying(modes[i % modes.size()], {c(gen), c(gen), alt(gen)});
    const auto next = step(s, cfg, wps, {{c(gen) / 20, c(gen) / 20, 0}}, fix_of(s), 0.1);
    const auto& a = next.commanded_airspeed;
    CHECK(std::sqrt(a.east_m * a.east_m + a.north_m * a.north_m + a.up_m * a.up_m) <= cfg.max_airspeed_mps + 1e-9);
  }
}

TEST_CASE("comms-loss failsafe fires at the timeout") {
  auto s = flying(Mode::MISSION, {0, 0, 30});
  s.t_s = 100.0;
  s = apply_failsafe(s, false, 5.0);
  CHECK(s.mode == Mode::MISSION);
  s.t_s = 104.9;
  s = apply_failsafe(s, false, 5.0);
  CHECK(s.mode == Mode::MISSION);
  s.t_s = 105.0;
  s = apply_failsafe(s, false, 5.0);
  CHECK(s.mode == Mode::RTL);
}

TEST_CASE("short comms loss changes nothing") {
  auto s = flying(Mode::MISSION, {0, 0, 30});
  for (int k = 0; k <= 30; ++k) {
    s.t_s = 100.0 + 0.1 * k;
    s = apply_failsafe(s, false, 5.0);
  }
  s.t_s = 103.1;
  s = apply_failsafe(s, true, 5.0);
  CHECK(s.mode == Mode::MISSION);
  CHECK_FALSE(s.comms_lost_since.has_value());
}

TEST_CASE("landed drones ignore the failsafe") {
  auto s = flying(Mode::LANDED, {0, 0, 0});
  for (int k = 0; k < 100; ++k) {
    s.t_s = 0.1 * k;
    s = apply_failsafe(s, false, 5.0);
  }
  CHECK(s.mode == Mode::LANDED);
}

TEST_CASE("interventions") {
  const auto mission = flying(Mode::MISSION, {0, 0, 30});
  auto r = apply_intervention(mission, Command::RTL);
  CHECK(r.accepted);
  CHECK(r.state.mode == Mode::RTL);

  auto loiter = flying(Mode::LOITER, {0, 0, 30});
  loiter.wp_index = 3;
  r = apply_intervention(loiter, Command::RESUME);
  CHECK(r.accepted);
  CHECK(r.state.mode == Mode::MISSION);
  CHECK(r.state.wp_index == 3);

  const auto landed = flying(Mode::LANDED, {0, 0, 0});
  r = apply_intervention(landed, Command::RTL);
  CHECK_FALSE(r.accepted);
  CHECK(r.state.mode == Mode::LANDED);
}

TEST_CASE("transition table") {
  CHECK(transition_allowed(Mode::IDLE, Mode::TAKEOFF));
  CHECK_FALSE(transition_allowed(Mode::IDLE, Mode::MISSION));
  CHECK(transition_allowed(Mode::MISSION, Mode::LOITER));
  CHECK(transition_allowed(Mode::RTL, Mode::LAND));
  CHECK_FALSE(transition_allowed(Mode::RTL, Mode::MISSION));
  for (Mode m : {Mode::IDLE, Mode::TAKEOFF, Mode::MISSION, Mode::LOITER, Mode::RTL, Mode::LAND, Mode::LANDED}) {
    CHECK_FALSE(transition_allowed(Mode::LANDED, m));
  }
}

TEST_CASE("random stepping only makes allowed mode changes") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> c(-50, 50), w(-8, 8);
  std::uniform_int_distribution<int> pick(0, 6);
  for (int run = 0; run < 50; ++run) {
    const std::vector<geo::EnuPoint> wps{{c(gen), c(gen), 10}, {c(gen), c(gen), 15}};
    auto s = initial_state({0, 0, 0});
    s.mode = Mode::TAKEOFF;
    for (int k = 0; k < 600; ++k) {
      Mode before = s.mode;
      s.t_s = 0.1 * k;
      s = apply_failsafe(s, pick(gen) != 0, 5.0);
      if (s.mode != before) CHECK(transition_allowed(before, s.mode));
      before = s.mode;
      if (pick(gen) == 0) s = apply_intervention(s, static_cast<Command>(pick(gen) % 4)).state;
      if (s.mode != before) CHECK(transition_allowed(before, s.mode));
      before = s.mode;
      s = step(s, config(8.0, 10.0), wps, {{w(gen), w(gen), 0}}, fix_of(s), 0.1);
      CHECK(reachable(before, s.mode));
      if (before == Mode::LANDED) CHECK(s.mode == Mode::LANDED);
      CHECK(s.true_pos.up_m >= 0.0);
    }
  }
}
