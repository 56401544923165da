#pragma once

// Brute-force monitor checker written straight from the monitor
// definitions: per-tick loops, winding-number containment and its own
// waypoint tracker. It shares no code with drv::monitors beyond the
// frame conversion.

#include <string>
#include <vector>

#include "drv/engine.hpp"
#include "drv/scenario.hpp"

namespace oracle {

struct Finding {
  std::string monitor_id;
  double t_s = 0.0;
  std::vector<std::string> drone_ids;
  double measured = 0.0;
};

std::vector<Finding> check(const drv::Scenario& s, const std::vector<drv::engine::TelemetryRecord>& telemetry);

// Winding-number point-in-polygon with the boundary counted inside.
bool inside(const std::vector<drv::geo::EnuPoint>& poly, double e, double n);

}  // namespace oracle
