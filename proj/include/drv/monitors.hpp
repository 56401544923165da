#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drv/engine.hpp"
#include "drv/geo.hpp"
#include "drv/scenario.hpp"

namespace drv::monitors {

/// A drone counts as airborne strictly above this height.
inline constexpr double kAirborneAltM = 1.0;

struct Violation {
  std::string monitor_id;
  double t_s = 0.0;                    // first tick of the breach episode
  std::vector<std::string> drone_ids;  // one or two, sorted
  double measured = 0.0;
  double threshold = 0.0;
  std::string unit;
  std::string message;
  bool operator==(const Violation&) const = default;
};

enum class Status { PASSED, FAILED };

struct Verdict {
  Status status = Status::PASSED;
  std::vector<Violation> violations;
  bool operator==(const Verdict&) const = default;
};

std::string_view to_string(Status s);

/// Planned path of one drone as the monitors see it.
struct PlannedPath {
  std::string drone_id;
  geo::EnuPoint start;  // takeoff point; leg 0 runs from here to waypoints[0]
  std::vector<geo::EnuPoint> waypoints;
  double accept_radius_m = 1.0;
  struct Circle {
    geo::EnuPoint center;
    double radius_m = 0.0;
  };
  std::optional<Circle> circle;
};

std::vector<PlannedPath> planned_paths(const Scenario& s);

/// Per-record deviation from the planned path, replaying waypoint
/// progression from the perceived positions in the trace.
struct TrackPoint {
  double deviation_m = 0.0;
  std::size_t leg = 0;
  bool mission_done = false;  // the final waypoint has been reached
};
std::vector<TrackPoint> track_deviation(std::span<const engine::TelemetryRecord* const> drone_trace,
                                        const PlannedPath& plan);

/// Landing time, completion and distance recovered from a trace.
std::vector<engine::DroneOutcome> derive_outcomes(const std::vector<engine::TelemetryRecord>& telemetry,
                                                  const std::vector<PlannedPath>& plans);

std::vector<Violation> check_separation(const std::vector<engine::TelemetryRecord>& telemetry, double min_m,
                                        std::optional<Mode> mode_filter);
/// Single-threaded reference kept for testing the OpenMP version above.
std::vector<Violation> check_separation_serial(const std::vector<engine::TelemetryRecord>& telemetry, double min_m,
                                               std::optional<Mode> mode_filter);

std::vector<Violation> check_no_fly(const std::vector<engine::TelemetryRecord>& telemetry,
                                    std::span<const geo::Region> regions);

/// Exactly one of `allowed` / `forbidden` is used (the non-null one).
std::vector<Violation> check_safe_landing(const std::vector<engine::TelemetryRecord>& telemetry,
                                          const std::vector<geo::Region>* allowed,
                                          const std::vector<geo::Region>* forbidden);

/// Throws drv::Error("FRACTION_ON_WAYPOINT_MISSION") for a fraction bound
/// on a plan without a circle.
std::vector<Violation> check_drift(const std::vector<engine::TelemetryRecord>& telemetry,
                                   const std::vector<PlannedPath>& plans, const DriftBound& bound);

std::vector<Violation> check_waypoint_reach(const std::vector<engine::TelemetryRecord>& telemetry,
                                            const std::vector<PlannedPath>& plans, double tolerance_m);

std::vector<Violation> check_duration(const std::vector<engine::DroneOutcome>& outcomes,
                                      const std::vector<engine::TelemetryRecord>& telemetry, double baseline_s,
                                      double factor);

/// Runs every monitor over the trace; violations are grouped by monitor
/// declaration order and sorted by time within a monitor.
Verdict evaluate(const std::vector<MonitorSpec>& monitors, const std::vector<engine::TelemetryRecord>& telemetry,
                 const Scenario& s);
Verdict evaluate(const std::vector<MonitorSpec>& monitors, const engine::RunResult& run, const Scenario& s);

}  // namespace drv::monitors
