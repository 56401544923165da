#include "drv/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace drv::vehicle {

namespace {

// Slack for floating comparisons of altitudes and timers.
constexpr double kEps = 1e-9;
constexpr double kAltReachedTol = 1e-6;

geo::EnuPoint horizontal_command(const geo::EnuPoint& from, const geo::EnuPoint& to, double cruise, double dt) {
  const double de = to.east_m - from.east_m;
  const double dn = to.north_m - from.north_m;
  const double dist = std::hypot(de, dn);
  if (dist == 0.0) return {};
  const double mag = std::min(cruise, dist / dt);
  return {de / dist * mag, dn / dist * mag, 0.0};
}

double vertical_command(double from_up, double to_up, const DroneConfig& cfg, double dt) {
  return std::clamp((to_up - from_up) / dt, -cfg.descent_rate_mps, cfg.climb_rate_mps);
}

}  // namespace

DroneState initial_state(const geo::EnuPoint& home) {
  DroneState s;
  s.true_pos = home;
  s.perceived = {home, true, 0.0};
  s.home = home;
  s.land_target = home;
  return s;
}

bool transition_allowed(Mode from, Mode to) {
  switch (from) {
    case Mode::IDLE: return to == Mode::TAKEOFF;
    case Mode::TAKEOFF: return to == Mode::MISSION || to == Mode::RTL;
    case Mode::MISSION: return to == Mode::LOITER || to == Mode::RTL || to == Mode::LAND;
    case Mode::LOITER: return to == Mode::MISSION || to == Mode::RTL || to == Mode::LAND;
    case Mode::RTL: return to == Mode::LAND;
    case Mode::LAND: return to == Mode::LANDED;
    case Mode::LANDED: return false;
  }
  return false;
}

std::vector<geo::EnuPoint> expand_mission(const Mission& m, const geo::GeoPoint& origin) {
  std::vector<geo::EnuPoint> out;
  if (const auto* w = std::get_if<WaypointsMission>(&m.shape)) {
    for (const auto& p : w->waypoints) out.push_back(geo::to_enu(origin, p));
  } else if (const auto* c = std::get_if<CircleMission>(&m.shape)) {
    const auto center = geo::to_enu(origin, {c->center.lat_deg, c->center.lon_deg, origin.alt_m});
    for (int lap = 0; lap < c->laps; ++lap) {
      for (int k = 0; k < kCirclePointsPerLap; ++k) {
        // Bearing 0 (north) first, then counterclockwise seen from above.
        const double theta = k * (2.0 * std::numbers::pi / kCirclePointsPerLap);
        out.push_back({center.east_m - c->radius_m * std::sin(theta), center.north_m + c->radius_m * std::cos(theta),
                       c->alt_m});
      }
    }
  } else {
    const auto& q = std::get<SquareMission>(m.shape);
    const auto center = geo::to_enu(origin, {q.center.lat_deg, q.center.lon_deg, origin.alt_m});
    const double h = q.side_m / 2.0;
    const double corners[5][2] = {{h, h}, {-h, h}, {-h, -h}, {h, -h}, {h, h}};
    for (const auto& c : corners) out.push_back({center.east_m + c[0], center.north_m + c[1], q.alt_m});
  }
  return out;
}

DroneConfig effective_config(const DroneConfig& cfg, const Mission& m) {
  DroneConfig out = cfg;
  if (const auto* c = std::get_if<CircleMission>(&m.shape)) out.cruise_speed_mps = c->speed_mps;
  if (const auto* q = std::get_if<SquareMission>(&m.shape)) out.cruise_speed_mps = q->speed_mps;
  return out;
}

DroneState step(const DroneState& state, const DroneConfig& cfg, std::span<const geo::EnuPoint> waypoints,
                const world::WindSample& wind, const world::GpsFix& fix, double dt_s) {
  DroneState next = state;
  next.t_s = state.t_s + dt_s;
  next.perceived = fix;
  const auto& pos = fix.perceived;

  if (state.mode == Mode::IDLE || state.mode == Mode::LANDED) {
    next.velocity_enu = {};
    next.commanded_airspeed = {};
    return next;
  }

  if (next.mode == Mode::TAKEOFF) {
    const double takeoff_alt = waypoints.empty() ? cfg.rtl_alt_m : waypoints.front().up_m;
    if (pos.up_m >= takeoff_alt - kAltReachedTol) next.mode = Mode::MISSION;
  }
  if (next.mode == Mode::MISSION) {
    if (next.wp_index < waypoints.size() &&
        geo::horizontal_distance(pos, waypoints[next.wp_index]) < cfg.accept_radius_m) {
      ++next.wp_index;
    }
    if (next.wp_index >= waypoints.size()) {
      next.wp_index = waypoints.empty() ? 0 : waypoints.size() - 1;
      next.mission_done = true;
      next.mode = Mode::LAND;
      next.land_target = {pos.east_m, pos.north_m, 0.0};
    }
  }
  if (next.mode == Mode::RTL && geo::horizontal_distance(pos, next.home) < cfg.accept_radius_m) {
    next.mode = Mode::LAND;
    next.land_target = {next.home.east_m, next.home.north_m, 0.0};
  }

  geo::EnuPoint cmd;
  switch (next.mode) {
    case Mode::TAKEOFF: {
      const double takeoff_alt = waypoints.empty() ? cfg.rtl_alt_m : waypoints.front().up_m;
      cmd = horizontal_command(pos, next.home, cfg.cruise_speed_mps, dt_s);
      cmd.up_m = vertical_command(pos.up_m, takeoff_alt, cfg, dt_s);
      break;
    }
    case Mode::MISSION: {
      const auto& target = waypoints[next.wp_index];
      cmd = horizontal_command(pos, target, cfg.cruise_speed_mps, dt_s);
      cmd.up_m = vertical_command(pos.up_m, target.up_m, cfg, dt_s);
      break;
    }
    case Mode::RTL:
      cmd = horizontal_command(pos, next.home, cfg.cruise_speed_mps, dt_s);
      cmd.up_m = vertical_command(pos.up_m, cfg.rtl_alt_m, cfg, dt_s);
      break;
    case Mode::LAND:
      cmd = horizontal_command(pos, next.land_target, cfg.cruise_speed_mps, dt_s);
      cmd.up_m = -std::min(cfg.descent_rate_mps, std::max(pos.up_m, 0.0) / dt_s);
      break;
    case Mode::LOITER:
    default:
      break;
  }

  const double norm = std::sqrt(cmd.east_m * cmd.east_m + cmd.north_m * cmd.north_m + cmd.up_m * cmd.up_m);
  if (norm > cfg.max_airspeed_mps) {
    const double k = cfg.max_airspeed_mps / norm;
    cmd = {cmd.east_m * k, cmd.north_m * k, cmd.up_m * k};
  }

  next.commanded_airspeed = cmd;
  next.velocity_enu = {cmd.east_m + wind.velocity_enu.east_m, cmd.north_m + wind.velocity_enu.north_m, cmd.up_m};
  next.true_pos = {state.true_pos.east_m + next.velocity_enu.east_m * dt_s,
                   state.true_pos.north_m + next.velocity_enu.north_m * dt_s,
                   std::max(0.0, state.true_pos.up_m + next.velocity_enu.up_m * dt_s)};

  if (next.mode == Mode::LAND && next.true_pos.up_m <= kEps) {
    next.true_pos.up_m = 0.0;
    next.mode = Mode::LANDED;
    next.velocity_enu = {};
    next.commanded_airspeed = {};
  }
  return next;
}

DroneState apply_failsafe(const DroneState& state, bool comms_ok_now, double timeout_s) {
  DroneState next = state;
  next.comms_ok = comms_ok_now;
  if (comms_ok_now) {
    next.comms_lost_since.reset();
    return next;
  }
  if (!next.comms_lost_since) next.comms_lost_since = state.t_s;
  const bool eligible = next.mode == Mode::MISSION || next.mode == Mode::LOITER || next.mode == Mode::TAKEOFF;
  if (eligible && state.t_s - *next.comms_lost_since >= timeout_s - kEps) next.mode = Mode::RTL;
  return next;
}

InterventionResult apply_intervention(const DroneState& state, Command command) {
  Mode target = Mode::RTL;
  switch (command) {
    case Command::RTL: target = Mode::RTL; break;
    case Command::LAND: target = Mode::LAND; break;
    case Command::LOITER: target = Mode::LOITER; break;
    case Command::RESUME:
      if (state.mode != Mode::LOITER) return {state, false};
      target = Mode::MISSION;
      break;
  }
  if (!transition_allowed(state.mode, target)) return {state, false};
  DroneState next = state;
  next.mode = target;
  if (target == Mode::LAND) next.land_target = {state.perceived.perceived.east_m, state.perceived.perceived.north_m, 0.0};
  return {next, true};
}

}  // namespace drv::vehicle
