#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "drv/geo.hpp"
#include "drv/scenario.hpp"

namespace drv::engine {

struct TelemetryRecord {
  double t_s = 0.0;
  std::string drone_id;
  geo::EnuPoint true_pos;
  geo::EnuPoint perceived_pos;
  bool gps_valid = true;
  geo::EnuPoint velocity_enu;
  Mode mode = Mode::IDLE;
  bool comms_ok = true;
  double wind_e = 0.0;
  double wind_n = 0.0;
  bool operator==(const TelemetryRecord&) const = default;
};

struct DroneOutcome {
  std::string drone_id;
  bool completed = false;
  geo::EnuPoint landed_pos;
  double duration_s = 0.0;
  double distance_flown_m = 0.0;
  bool operator==(const DroneOutcome&) const = default;
};

struct RejectedIntervention {
  double t_s = 0.0;
  std::string drone_id;
  Command command = Command::RTL;
  Mode mode = Mode::IDLE;  // mode that refused the command
  bool operator==(const RejectedIntervention&) const = default;
};

enum class Termination { ALL_LANDED, MAX_DURATION };

struct RunResult {
  std::uint64_t seed = 0;
  double dt_s = 0.1;
  std::vector<TelemetryRecord> telemetry;  // ordered by (t_s, drone_id)
  std::vector<RejectedIntervention> rejected_interventions;
  std::vector<DroneOutcome> outcomes;  // drone-id order
  Termination terminated_by = Termination::MAX_DURATION;
  bool operator==(const RunResult&) const = default;
};

/// Runs the scenario to completion. Every drone gets a record at t = 0 and
/// one per tick afterwards. Drones are stepped in drone-id order, each on
/// its own random stream. Throws drv::Error("INVALID_SCENARIO") when
/// validate() reports anything.
RunResult simulate(const Scenario& s, std::uint64_t seed);

std::string_view to_string(Termination t);

inline constexpr std::string_view kTelemetryHeader =
    "t_s,drone_id,true_e,true_n,true_u,perc_e,perc_n,perc_u,gps_valid,vel_e,vel_n,vel_u,mode,comms_ok,wind_e,wind_n";

/// Writes header plus one row per record (6 decimal places); returns the
/// number of data rows.
std::size_t write_telemetry_csv(const std::vector<TelemetryRecord>& telemetry, std::ostream& out);
std::size_t write_telemetry_csv(const std::vector<TelemetryRecord>& telemetry, const std::string& path);

/// Parses the telemetry format back. Throws drv::Error with MALFORMED_CSV
/// (message names the row) or NONMONOTONE_TIME.
std::vector<TelemetryRecord> read_telemetry_csv(std::string_view text);

}  // namespace drv::engine
