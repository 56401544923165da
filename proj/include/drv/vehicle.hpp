#pragma once

#include <optional>
#include <span>
#include <vector>

#include "drv/geo.hpp"
#include "drv/scenario.hpp"
#include "drv/world.hpp"

namespace drv::vehicle {

/// Circle missions are sampled every 10 degrees.
inline constexpr int kCirclePointsPerLap = 36;

struct DroneState {
  double t_s = 0.0;
  geo::EnuPoint true_pos;
  world::GpsFix perceived;
  geo::EnuPoint velocity_enu;        // ground velocity
  geo::EnuPoint commanded_airspeed;  // what the controller asked for
  Mode mode = Mode::IDLE;
  std::size_t wp_index = 0;
  bool comms_ok = true;
  std::optional<double> comms_lost_since;

  geo::EnuPoint home;
  geo::EnuPoint land_target;  // horizontal hold point while in LAND
  bool mission_done = false;  // every waypoint was reached before landing
};

/// Fresh drone sitting at `home` in IDLE with a perfect initial fix.
DroneState initial_state(const geo::EnuPoint& home);

bool transition_allowed(Mode from, Mode to);

std::vector<geo::EnuPoint> expand_mission(const Mission& m, const geo::GeoPoint& origin);

/// Circle/square missions fly at their own speed; waypoint missions at
/// the drone's cruise speed.
DroneConfig effective_config(const DroneConfig& cfg, const Mission& m);

/// One fixed step of the point-mass model. Guidance aims from the perceived
/// position at the active target without wind compensation; the ground
/// velocity is the commanded airspeed plus the wind.
DroneState step(const DroneState& state, const DroneConfig& cfg, std::span<const geo::EnuPoint> waypoints,
                const world::WindSample& wind, const world::GpsFix& fix, double dt_s);

DroneState apply_failsafe(const DroneState& state, bool comms_ok_now, double timeout_s);

struct InterventionResult {
  DroneState state;
  bool accepted = true;
};

InterventionResult apply_intervention(const DroneState& state, Command command);

}  // namespace drv::vehicle
