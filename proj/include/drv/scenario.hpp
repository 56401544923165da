#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "drv/geo.hpp"

namespace drv {

inline constexpr std::string_view kScenarioFormatVersion = "1";

inline constexpr double kMetersPerSecondPerMph = 0.44704;
inline constexpr double kMetersPerFoot = 0.3048;

/// Horizontal wind over an altitude band. direction_deg is the bearing the
/// wind blows FROM (meteorological convention, clockwise from north).
struct WindLayer {
  double alt_lower_m = 0.0;
  double alt_upper_m = 0.0;
  double speed_mps = 0.0;
  double gust_mps = 0.0;
  double direction_deg = 0.0;
  bool operator==(const WindLayer&) const = default;
};

/// Recorded in reports only; these have no physical effect.
struct WeatherMetadata {
  std::string precipitation = "none";
  std::string clouds = "none";
  std::string time_of_day = "midday";
  bool operator==(const WeatherMetadata&) const = default;
};

struct Weather {
  std::vector<WindLayer> layers;
  WeatherMetadata metadata;
  bool operator==(const Weather&) const = default;
};

enum class GpsModel { Gaussian, Perfect };

struct GpsConfig {
  std::optional<int> satellites;
  std::optional<double> deprivation_pct;
  std::vector<std::string> dead_spot_region_ids;
  GpsModel model = GpsModel::Gaussian;
  bool operator==(const GpsConfig&) const = default;
};

struct CommsLossWindow {
  std::vector<std::string> drone_ids;
  double start_s = 0.0;
  double duration_s = 0.0;
  bool operator==(const CommsLossWindow&) const = default;
};

enum class Command { RTL, LAND, LOITER, RESUME };

struct InterventionEvent {
  double t_s = 0.0;
  std::string drone_id;
  Command command = Command::RTL;
  bool operator==(const InterventionEvent&) const = default;
};

enum class Mode { IDLE, TAKEOFF, MISSION, LOITER, RTL, LAND, LANDED };

struct DroneConfig {
  std::string id;
  geo::GeoPoint home;
  double max_airspeed_mps = 0.0;
  double cruise_speed_mps = 0.0;
  double climb_rate_mps = 0.0;
  double descent_rate_mps = 0.0;
  double accept_radius_m = 1.0;
  double rtl_alt_m = 30.0;
  bool operator==(const DroneConfig&) const = default;
};

struct WaypointsMission {
  std::vector<geo::GeoPoint> waypoints;
  bool operator==(const WaypointsMission&) const = default;
};

struct CircleMission {
  geo::GeoPoint center;
  double radius_m = 0.0;
  double alt_m = 0.0;
  double speed_mps = 0.0;
  int laps = 1;
  bool operator==(const CircleMission&) const = default;
};

struct SquareMission {
  geo::GeoPoint center;
  double side_m = 0.0;
  double alt_m = 0.0;
  double speed_mps = 0.0;
  bool operator==(const SquareMission&) const = default;
};

struct Mission {
  std::string drone_id;
  std::variant<WaypointsMission, CircleMission, SquareMission> shape;
  bool operator==(const Mission&) const = default;
};

struct MinSeparation {
  double min_m = 0.0;
  std::optional<Mode> mode_filter;
  bool operator==(const MinSeparation&) const = default;
};

struct NoFlyZone {
  std::vector<std::string> region_ids;
  bool operator==(const NoFlyZone&) const = default;
};

struct SafeLanding {
  std::optional<std::vector<std::string>> allowed_region_ids;
  std::optional<std::vector<std::string>> forbidden_region_ids;
  bool operator==(const SafeLanding&) const = default;
};

struct DriftBound {
  std::optional<double> absolute_m;
  std::optional<double> fraction;
  std::optional<double> wind_gate_mps;
  bool operator==(const DriftBound&) const = default;
};

struct WaypointReach {
  double tolerance_m = 0.0;
  bool operator==(const WaypointReach&) const = default;
};

struct DurationBound {
  double baseline_s = 0.0;
  double factor = 1.0;
  bool operator==(const DurationBound&) const = default;
};

struct MonitorSpec {
  std::string id;
  std::variant<MinSeparation, NoFlyZone, SafeLanding, DriftBound, WaypointReach, DurationBound> kind;
  bool operator==(const MonitorSpec&) const = default;
};

struct FuzzSpec {
  std::string param_path;
  double max_value = 0.0;
  int variants = 1;
  bool operator==(const FuzzSpec&) const = default;
};

struct SimParams {
  double dt_s = 0.1;
  double max_duration_s = 600.0;
  std::uint64_t seed = 0;
  double rtl_comms_timeout_s = 5.0;
  bool operator==(const SimParams&) const = default;
};

/// Region as written in the scenario file, in geographic coordinates.
struct RegionDef {
  std::string id;
  std::vector<geo::GeoPoint> vertices;  // alt ignored
  double alt_floor_m = 0.0;
  double alt_ceiling_m = 0.0;
  bool operator==(const RegionDef&) const = default;
};

struct Scenario {
  std::string format_version{kScenarioFormatVersion};
  std::string name;
  geo::GeoPoint origin;
  std::vector<RegionDef> region_defs;
  std::vector<geo::Region> regions;  // region_defs projected about origin
  Weather weather;
  GpsConfig gps;
  std::vector<CommsLossWindow> comms;
  std::vector<InterventionEvent> interventions;
  std::vector<DroneConfig> drones;
  std::vector<Mission> missions;
  std::vector<MonitorSpec> monitors;
  std::optional<FuzzSpec> fuzz;
  SimParams sim;

  bool operator==(const Scenario&) const = default;

  /// Recomputes `regions` from `region_defs` and `origin`.
  void refresh_frames();

  const geo::Region* find_region(std::string_view id) const;
  const DroneConfig* find_drone(std::string_view id) const;
  const Mission* find_mission(std::string_view drone_id) const;
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  std::string code;
  Severity severity = Severity::Error;
  std::string path;
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};

/// Parses and normalizes a scenario document (JSON). All quantities are
/// converted to SI. Throws drv::Error with codes SYNTAX_ERROR, UNKNOWN_FIELD,
/// MISSING_FIELD, MISSING_UNIT, BAD_UNIT, TYPE_ERROR, UNSUPPORTED_VERSION or
/// INVALID_FRAME.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Writes the scenario back in the file format, SI units, shortest
/// round-trip number formatting.
std::string serialize_scenario(const Scenario& s);

/// Semantic checks. Empty iff every invariant holds and every id resolves.
std::vector<Diagnostic> validate(const Scenario& s);

/// Read/write access to one numeric scenario field addressed by a dotted
/// path such as "weather.layers[0].speed".
class NumericField {
 public:
  using Target = std::variant<double*, int*, std::uint64_t*>;

  NumericField(Target target, Scenario* owner, bool reprojects)
      : target_(target), owner_(owner), reprojects_(reprojects) {}

  double get() const;
  void set(double value);

 private:
  Target target_;
  Scenario* owner_;
  bool reprojects_;
};

/// Throws drv::Error("PATH_NOT_FOUND" | "PATH_NOT_NUMERIC").
NumericField resolve_param_path(Scenario& s, std::string_view path);
double read_param(const Scenario& s, std::string_view path);

std::string_view to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);
std::string_view to_string(Command c);
std::optional<Command> command_from_string(std::string_view s);

}  // namespace drv
