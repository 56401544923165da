#pragma once

#include <string>

#include "drv/scenario.hpp"

namespace unit {

inline std::string fixture(const std::string& name) { return std::string(DRV_FIXTURE_DIR) + "/" + name; }

// One drone "D" at the origin flying to one waypoint 100 m east at 30 m,
// cruise 10 m/s, no wind, perfect GPS.
inline const char* kOneWaypoint = R"({
  "format_version": "1", "name": "one waypoint",
  "origin": {"lat_deg": 42.207762, "lon_deg": -86.393095},
  "gps": {"model": "perfect"},
  "drones": [{"id": "D", "home": {"lat_deg": 42.207762, "lon_deg": -86.393095}, "max_airspeed": "13 mps",
              "cruise_speed": "10 mps", "climb_rate": "3 mps", "descent_rate": "2 mps", "accept_radius": "1 m"}],
  "missions": [{"drone": "D", "type": "waypoints",
                "waypoints": [{"lat_deg": 42.207762, "lon_deg": -86.39188223546145, "alt": "30 m"}]}],
  "sim": {"dt": "0.1 s", "max_duration": "200 s", "seed": 5}
})";

}  // namespace unit
