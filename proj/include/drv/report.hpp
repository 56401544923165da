#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drv/engine.hpp"
#include "drv/fuzz.hpp"
#include "drv/monitors.hpp"
#include "drv/scenario.hpp"

namespace drv::report {

inline constexpr std::string_view kReportFormatVersion = "1";

struct DroneAnalytics {
  std::string drone_id;
  double duration_s = 0.0;
  double distance_flown_m = 0.0;
  double max_cross_track_m = 0.0;  // over airborne MISSION records; radial for circles
  double mean_cross_track_m = 0.0;
  bool completed = false;
  geo::EnuPoint landed_pos;
  bool operator==(const DroneAnalytics&) const = default;
};

struct EnvironmentEcho {
  WeatherMetadata weather;
  std::vector<WindLayer> wind_layers;
  GpsConfig gps;
  std::uint64_t seed = 0;
  bool operator==(const EnvironmentEcho&) const = default;
};

struct RunReport {
  int variant = 0;
  std::optional<double> param_value;
  monitors::Status status = monitors::Status::PASSED;
  std::vector<monitors::Violation> violations;
  std::vector<DroneAnalytics> drones;
  std::string terminated_by;
  EnvironmentEcho environment;
  bool operator==(const RunReport&) const = default;
};

struct FuzzEcho {
  std::string param_path;
  double max_value = 0.0;
  int variants = 0;
  bool operator==(const FuzzEcho&) const = default;
};

struct AcceptanceReport {
  std::string format_version{kReportFormatVersion};
  std::string scenario_name;
  monitors::Status overall_status = monitors::Status::PASSED;
  std::optional<FuzzEcho> fuzz;
  std::vector<RunReport> runs;  // ordered by (param_value, variant)
  std::optional<fuzz::BoundaryReport> boundary;
  bool operator==(const AcceptanceReport&) const = default;
};

std::vector<DroneAnalytics> analytics(const std::vector<engine::TelemetryRecord>& telemetry,
                                      const std::vector<monitors::PlannedPath>& plans);

RunReport build_run_report(const engine::RunResult& run, const monitors::Verdict& verdict, const Scenario& s,
                           int variant, std::optional<double> param_value);

/// overall_status comes from variant 0; the boundary is filled only when
/// the scenario carries a fuzz plan.
AcceptanceReport build_acceptance_report(const Scenario& s, std::vector<RunReport> runs);

/// Copy with every floating value rounded to 3 decimals, as serialized.
AcceptanceReport rounded(const AcceptanceReport& ar);

std::string serialize_report(const AcceptanceReport& ar);
/// Throws drv::Error("MALFORMED_REPORT").
AcceptanceReport parse_report(std::string_view text);

struct VariantArtifacts {
  int variant = 0;
  const Scenario* scenario = nullptr;  // written with fuzz removed and sim.seed set to `seed`
  std::uint64_t seed = 0;
  const engine::RunResult* run = nullptr;
};

/// Writes report.json and variant_<i>/{scenario.json, telemetry.csv}
/// (plus path.svg when `svg`). Throws drv::Error("IO_ERROR").
void write_report(const AcceptanceReport& ar, const std::vector<VariantArtifacts>& variants, const std::string& out_dir,
                  bool svg);

/// Top-down plot of planned and flown paths. Throws drv::Error with
/// EMPTY_TELEMETRY or IO_ERROR.
std::string render_path_svg(const engine::RunResult& run, const std::vector<monitors::PlannedPath>& planned,
                            const std::vector<geo::Region>& regions);
void write_path_svg(const engine::RunResult& run, const std::vector<monitors::PlannedPath>& planned,
                    const std::vector<geo::Region>& regions, const std::string& path);

}  // namespace drv::report
