#include "drv/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "drv/error.hpp"

namespace drv {

using json = nlohmann::ordered_json;

namespace {

constexpr double kFrameRadiusM = 20000.0;

enum class Dim { Length, Speed, Time };

// ---------------------------------------------------------------- parsing

[[noreturn]] void fail(std::string code, const std::string& path, const std::string& what) {
  throw Error(std::move(code), path.empty() ? what : fmt::format("{}: {}", path, what));
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
}

std::string index(const std::string& path, std::size_t i) { return fmt::format("{}[{}]", path, i); }

const json& expect_object(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail("TYPE_ERROR", path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail("UNKNOWN_FIELD", join(path, key), "unknown field");
    }
  }
  return j;
}

const json& required(const json& obj, std::string_view key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail("MISSING_FIELD", join(path, key), "required field is missing");
  return *it;
}

const json* optional_field(const json& obj, std::string_view key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& expect_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail("TYPE_ERROR", path, "expected an array");
  return j;
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail("TYPE_ERROR", path, "expected a string");
  return j.get<std::string>();
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail("TYPE_ERROR", path, "expected a number");
  return j.get<double>();
}

long long get_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail("TYPE_ERROR", path, "expected an integer");
  return j.get<long long>();
}

std::vector<std::string> get_string_list(const json& j, const std::string& path) {
  expect_array(j, path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_string(j[i], index(path, i)));
  return out;
}

double unit_scale(Dim dim, std::string_view unit) {
  switch (dim) {
    case Dim::Length:
      if (unit == "m") return 1.0;
      if (unit == "ft") return kMetersPerFoot;
      if (unit == "km") return 1000.0;
      break;
    case Dim::Speed:
      if (unit == "mps" || unit == "m/s") return 1.0;
      if (unit == "mph") return kMetersPerSecondPerMph;
      break;
    case Dim::Time:
      if (unit == "s") return 1.0;
      if (unit == "min") return 60.0;
      break;
  }
  return 0.0;
}

// "<number> <unit>", e.g. "23 mph"; bare numbers are rejected.
double get_quantity(const json& j, const std::string& path, Dim dim) {
  if (j.is_number()) fail("MISSING_UNIT", path, "dimensioned quantity needs a unit tag, e.g. \"10 m\"");
  if (!j.is_string()) fail("TYPE_ERROR", path, "expected a quantity string such as \"10 m\"");
  const std::string text = j.get<std::string>();
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  while (begin < end && *begin == ' ') ++begin;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || !std::isfinite(value)) fail("TYPE_ERROR", path, fmt::format("cannot read number in '{}'", text));
  std::string_view unit(ptr, static_cast<std::size_t>(end - ptr));
  while (!unit.empty() && unit.front() == ' ') unit.remove_prefix(1);
  while (!unit.empty() && unit.back() == ' ') unit.remove_suffix(1);
  if (unit.empty()) fail("MISSING_UNIT", path, fmt::format("'{}' has no unit tag", text));
  const double scale = unit_scale(dim, unit);
  if (scale == 0.0) fail("BAD_UNIT", path, fmt::format("unit '{}' is not valid here", unit));
  return value * scale;
}

geo::GeoPoint parse_geo(const json& j, const std::string& path, bool with_alt) {
  if (with_alt) {
    expect_object(j, path, {"lat_deg", "lon_deg", "alt"});
  } else {
    expect_object(j, path, {"lat_deg", "lon_deg"});
  }
  geo::GeoPoint p;
  p.lat_deg = get_number(required(j, "lat_deg", path), join(path, "lat_deg"));
  p.lon_deg = get_number(required(j, "lon_deg", path), join(path, "lon_deg"));
  if (with_alt) {
    if (const auto* alt = optional_field(j, "alt")) p.alt_m = get_quantity(*alt, join(path, "alt"), Dim::Length);
  }
  return p;
}

std::optional<Mode> parse_mode_name(std::string_view s) { return mode_from_string(s); }

MonitorSpec parse_monitor(const json& j, const std::string& path) {
  if (!j.is_object()) fail("TYPE_ERROR", path, "expected an object");
  const std::string type = get_string(required(j, "type", path), join(path, "type"));
  MonitorSpec m;
  auto read_id = [&] { m.id = get_string(required(j, "id", path), join(path, "id")); };
  if (type == "min_separation") {
    expect_object(j, path, {"id", "type", "min", "mode"});
    read_id();
    MinSeparation k;
    k.min_m = get_quantity(required(j, "min", path), join(path, "min"), Dim::Length);
    if (const auto* mode = optional_field(j, "mode")) {
      const auto name = get_string(*mode, join(path, "mode"));
      k.mode_filter = parse_mode_name(name);
      if (!k.mode_filter) fail("TYPE_ERROR", join(path, "mode"), fmt::format("unknown mode '{}'", name));
    }
    m.kind = k;
  } else if (type == "no_fly_zone") {
    expect_object(j, path, {"id", "type", "regions"});
    read_id();
    m.kind = NoFlyZone{get_string_list(required(j, "regions", path), join(path, "regions"))};
  } else if (type == "safe_landing") {
    expect_object(j, path, {"id", "type", "allowed", "forbidden"});
    read_id();
    SafeLanding k;
    if (const auto* a = optional_field(j, "allowed")) k.allowed_region_ids = get_string_list(*a, join(path, "allowed"));
    if (const auto* f = optional_field(j, "forbidden")) k.forbidden_region_ids = get_string_list(*f, join(path, "forbidden"));
    m.kind = k;
  } else if (type == "drift") {
    expect_object(j, path, {"id", "type", "absolute", "fraction", "wind_gate"});
    read_id();
    DriftBound k;
    if (const auto* a = optional_field(j, "absolute")) k.absolute_m = get_quantity(*a, join(path, "absolute"), Dim::Length);
    if (const auto* f = optional_field(j, "fraction")) k.fraction = get_number(*f, join(path, "fraction"));
    if (const auto* g = optional_field(j, "wind_gate")) k.wind_gate_mps = get_quantity(*g, join(path, "wind_gate"), Dim::Speed);
    m.kind = k;
  } else if (type == "waypoint_reach") {
    expect_object(j, path, {"id", "type", "tolerance"});
    read_id();
    m.kind = WaypointReach{get_quantity(required(j, "tolerance", path), join(path, "tolerance"), Dim::Length)};
  } else if (type == "duration") {
    expect_object(j, path, {"id", "type", "baseline", "factor"});
    read_id();
    DurationBound k;
    k.baseline_s = get_quantity(required(j, "baseline", path), join(path, "baseline"), Dim::Time);
    k.factor = get_number(required(j, "factor", path), join(path, "factor"));
    m.kind = k;
  } else {
    fail("UNKNOWN_FIELD", join(path, "type"), fmt::format("unknown monitor type '{}'", type));
  }
  return m;
}

Mission parse_mission(const json& j, const std::string& path) {
  if (!j.is_object()) fail("TYPE_ERROR", path, "expected an object");
  const std::string type = get_string(required(j, "type", path), join(path, "type"));
  Mission m;
  if (type == "waypoints") {
    expect_object(j, path, {"drone", "type", "waypoints"});
    WaypointsMission w;
    const auto wpath = join(path, "waypoints");
    const auto& arr = expect_array(required(j, "waypoints", path), wpath);
    for (std::size_t i = 0; i < arr.size(); ++i) w.waypoints.push_back(parse_geo(arr[i], index(wpath, i), true));
    m.shape = w;
  } else if (type == "circle") {
    expect_object(j, path, {"drone", "type", "center", "radius", "alt", "speed", "laps"});
    CircleMission c;
    c.center = parse_geo(required(j, "center", path), join(path, "center"), false);
    c.radius_m = get_quantity(required(j, "radius", path), join(path, "radius"), Dim::Length);
    c.alt_m = get_quantity(required(j, "alt", path), join(path, "alt"), Dim::Length);
    c.speed_mps = get_quantity(required(j, "speed", path), join(path, "speed"), Dim::Speed);
    if (const auto* laps = optional_field(j, "laps")) c.laps = static_cast<int>(get_integer(*laps, join(path, "laps")));
    m.shape = c;
  } else if (type == "square") {
    expect_object(j, path, {"drone", "type", "center", "side", "alt", "speed"});
    SquareMission s;
    s.center = parse_geo(required(j, "center", path), join(path, "center"), false);
    s.side_m = get_quantity(required(j, "side", path), join(path, "side"), Dim::Length);
    s.alt_m = get_quantity(required(j, "alt", path), join(path, "alt"), Dim::Length);
    s.speed_mps = get_quantity(required(j, "speed", path), join(path, "speed"), Dim::Speed);
    m.shape = s;
  } else {
    fail("UNKNOWN_FIELD", join(path, "type"), fmt::format("unknown mission type '{}'", type));
  }
  m.drone_id = get_string(required(j, "drone", path), join(path, "drone"));
  return m;
}

// ------------------------------------------------------------ serializing

std::string number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string length(double v) { return number(v) + " m"; }
std::string speed(double v) { return number(v) + " mps"; }
std::string seconds(double v) { return number(v) + " s"; }

json geo_json(const geo::GeoPoint& p, bool with_alt) {
  json j;
  j["lat_deg"] = p.lat_deg;
  j["lon_deg"] = p.lon_deg;
  if (with_alt) j["alt"] = length(p.alt_m);
  return j;
}

std::string_view gps_model_name(GpsModel m) { return m == GpsModel::Perfect ? "perfect" : "gaussian"; }

// ------------------------------------------------------------ path access

struct PathSegment {
  std::string name;
  std::optional<std::size_t> idx;
};

std::vector<PathSegment> split_path(std::string_view path) {
  std::vector<PathSegment> out;
  std::size_t pos = 0;
  while (pos <= path.size()) {
    const std::size_t dot = path.find('.', pos);
    std::string_view part = path.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
    PathSegment seg;
    const std::size_t br = part.find('[');
    if (br != std::string_view::npos) {
      if (part.back() != ']') throw Error("PATH_NOT_FOUND", fmt::format("malformed path '{}'", path));
      std::size_t i = 0;
      auto digits = part.substr(br + 1, part.size() - br - 2);
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), i);
      if (ec != std::errc() || p != digits.data() + digits.size() || digits.empty()) {
        throw Error("PATH_NOT_FOUND", fmt::format("malformed index in '{}'", path));
      }
      seg.idx = i;
      part = part.substr(0, br);
    }
    if (part.empty()) throw Error("PATH_NOT_FOUND", fmt::format("malformed path '{}'", path));
    seg.name = std::string(part);
    out.push_back(std::move(seg));
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return out;
}

struct Resolved {
  NumericField::Target target;
  bool reprojects = false;
};

[[noreturn]] void not_found(std::string_view path) {
  throw Error("PATH_NOT_FOUND", fmt::format("'{}' does not name a scenario field", path));
}

[[noreturn]] void not_numeric(std::string_view path) {
  throw Error("PATH_NOT_NUMERIC", fmt::format("'{}' is not a numeric field", path));
}

template <class T>
T& element(std::vector<T>& v, const PathSegment& seg, std::string_view path) {
  if (!seg.idx || *seg.idx >= v.size()) not_found(path);
  return v[*seg.idx];
}

Resolved resolve_geo(geo::GeoPoint& p, const std::vector<PathSegment>& rest, std::string_view path, bool reprojects) {
  if (rest.empty()) not_numeric(path);
  if (rest.size() != 1 || rest[0].idx) not_found(path);
  const auto& n = rest[0].name;
  if (n == "lat_deg") return {&p.lat_deg, reprojects};
  if (n == "lon_deg") return {&p.lon_deg, reprojects};
  if (n == "alt") return {&p.alt_m, reprojects};
  not_found(path);
}

Resolved resolve(Scenario& s, std::string_view path) {
  const auto segs = split_path(path);
  const auto& head = segs[0];
  const std::vector<PathSegment> rest(segs.begin() + 1, segs.end());
  auto leaf = [&](std::size_t expected_depth) {
    if (segs.size() < expected_depth) not_numeric(path);
    if (segs.size() > expected_depth || segs.back().idx) not_found(path);
    return segs.back().name;
  };
  auto plain = [&](const PathSegment& seg) {
    if (seg.idx) not_found(path);
  };

  if (head.name == "name" || head.name == "format_version") {
    plain(head);
    if (segs.size() > 1) not_found(path);
    not_numeric(path);
  }
  if (head.name == "origin") {
    plain(head);
    return resolve_geo(s.origin, rest, path, true);
  }
  if (head.name == "regions") {
    if (!head.idx) not_numeric(path);
    auto& r = element(s.region_defs, head, path);
    if (rest.empty()) not_numeric(path);
    const auto n = leaf(2);
    if (n == "floor") return {&r.alt_floor_m};
    if (n == "ceiling") return {&r.alt_ceiling_m};
    if (n == "id" || n == "vertices") not_numeric(path);
    not_found(path);
  }
  if (head.name == "weather") {
    plain(head);
    if (rest.empty()) not_numeric(path);
    const auto& sub = rest[0];
    if (sub.name == "precipitation" || sub.name == "clouds" || sub.name == "time_of_day") {
      if (sub.idx || rest.size() > 1) not_found(path);
      not_numeric(path);
    }
    if (sub.name != "layers") not_found(path);
    if (!sub.idx) not_numeric(path);
    auto& layer = element(s.weather.layers, sub, path);
    const auto n = leaf(3);
    if (n == "lower") return {&layer.alt_lower_m};
    if (n == "upper") return {&layer.alt_upper_m};
    if (n == "speed") return {&layer.speed_mps};
    if (n == "gust") return {&layer.gust_mps};
    if (n == "direction_deg") return {&layer.direction_deg};
    not_found(path);
  }
  if (head.name == "gps") {
    plain(head);
    const auto n = leaf(2);
    if (n == "satellites") {
      if (!s.gps.satellites) not_found(path);
      return {&*s.gps.satellites};
    }
    if (n == "deprivation_pct") {
      if (!s.gps.deprivation_pct) not_found(path);
      return {&*s.gps.deprivation_pct};
    }
    if (n == "dead_spots" || n == "model") not_numeric(path);
    not_found(path);
  }
  if (head.name == "comms") {
    if (!head.idx) not_numeric(path);
    auto& w = element(s.comms, head, path);
    const auto n = leaf(2);
    if (n == "start") return {&w.start_s};
    if (n == "duration") return {&w.duration_s};
    if (n == "drones") not_numeric(path);
    not_found(path);
  }
  if (head.name == "interventions") {
    if (!head.idx) not_numeric(path);
    auto& ev = element(s.interventions, head, path);
    const auto n = leaf(2);
    if (n == "t") return {&ev.t_s};
    if (n == "drone" || n == "command") not_numeric(path);
    not_found(path);
  }
  if (head.name == "drones") {
    if (!head.idx) not_numeric(path);
    auto& d = element(s.drones, head, path);
    if (rest.empty()) not_numeric(path);
    if (rest[0].name == "home" && !rest[0].idx) {
      return resolve_geo(d.home, {rest.begin() + 1, rest.end()}, path, false);
    }
    const auto n = leaf(2);
    if (n == "max_airspeed") return {&d.max_airspeed_mps};
    if (n == "cruise_speed") return {&d.cruise_speed_mps};
    if (n == "climb_rate") return {&d.climb_rate_mps};
    if (n == "descent_rate") return {&d.descent_rate_mps};
    if (n == "accept_radius") return {&d.accept_radius_m};
    if (n == "rtl_alt") return {&d.rtl_alt_m};
    if (n == "id") not_numeric(path);
    not_found(path);
  }
  if (head.name == "missions") {
    if (!head.idx) not_numeric(path);
    auto& m = element(s.missions, head, path);
    if (rest.empty()) not_numeric(path);
    if (auto* c = std::get_if<CircleMission>(&m.shape)) {
      if (rest[0].name == "center" && !rest[0].idx) return resolve_geo(c->center, {rest.begin() + 1, rest.end()}, path, false);
      const auto n = leaf(2);
      if (n == "radius") return {&c->radius_m};
      if (n == "alt") return {&c->alt_m};
      if (n == "speed") return {&c->speed_mps};
      if (n == "laps") return {&c->laps};
    } else if (auto* q = std::get_if<SquareMission>(&m.shape)) {
      if (rest[0].name == "center" && !rest[0].idx) return resolve_geo(q->center, {rest.begin() + 1, rest.end()}, path, false);
      const auto n = leaf(2);
      if (n == "side") return {&q->side_m};
      if (n == "alt") return {&q->alt_m};
      if (n == "speed") return {&q->speed_mps};
    } else {
      auto& w = std::get<WaypointsMission>(m.shape);
      if (rest[0].name == "waypoints") {
        if (!rest[0].idx) not_numeric(path);
        auto& p = element(w.waypoints, rest[0], path);
        return resolve_geo(p, {rest.begin() + 1, rest.end()}, path, false);
      }
    }
    const auto& n = rest.back().name;
    if (rest.size() == 1 && (n == "drone" || n == "type")) not_numeric(path);
    not_found(path);
  }
  if (head.name == "monitors") {
    if (!head.idx) not_numeric(path);
    auto& mon = element(s.monitors, head, path);
    const auto n = leaf(2);
    if (n == "id" || n == "type" || n == "regions" || n == "allowed" || n == "forbidden" || n == "mode") {
      not_numeric(path);
    }
    if (auto* k = std::get_if<MinSeparation>(&mon.kind); k && n == "min") return {&k->min_m};
    if (auto* k = std::get_if<DriftBound>(&mon.kind)) {
      if (n == "absolute" && k->absolute_m) return {&*k->absolute_m};
      if (n == "fraction" && k->fraction) return {&*k->fraction};
      if (n == "wind_gate" && k->wind_gate_mps) return {&*k->wind_gate_mps};
    }
    if (auto* k = std::get_if<WaypointReach>(&mon.kind); k && n == "tolerance") return {&k->tolerance_m};
    if (auto* k = std::get_if<DurationBound>(&mon.kind)) {
      if (n == "baseline") return {&k->baseline_s};
      if (n == "factor") return {&k->factor};
    }
    not_found(path);
  }
  if (head.name == "fuzz") {
    plain(head);
    if (!s.fuzz) not_found(path);
    const auto n = leaf(2);
    if (n == "max") return {&s.fuzz->max_value};
    if (n == "variants") return {&s.fuzz->variants};
    if (n == "param") not_numeric(path);
    not_found(path);
  }
  if (head.name == "sim") {
    plain(head);
    const auto n = leaf(2);
    if (n == "dt") return {&s.sim.dt_s};
    if (n == "max_duration") return {&s.sim.max_duration_s};
    if (n == "seed") return {&s.sim.seed};
    if (n == "rtl_comms_timeout") return {&s.sim.rtl_comms_timeout_s};
    not_found(path);
  }
  not_found(path);
}

// ------------------------------------------------------------- validation

class Diagnostics {
 public:
  void error(std::string code, std::string path, std::string message) {
    out_.push_back({std::move(code), Diagnostic::Severity::Error, std::move(path), std::move(message)});
  }
  std::vector<Diagnostic> take() { return std::move(out_); }

 private:
  std::vector<Diagnostic> out_;
};

bool valid_latlon(const geo::GeoPoint& p) {
  return std::isfinite(p.lat_deg) && std::isfinite(p.lon_deg) && p.lat_deg >= -90.0 && p.lat_deg <= 90.0 &&
         p.lon_deg >= -180.0 && p.lon_deg <= 180.0;
}

bool origin_usable(const geo::GeoPoint& o) {
  return valid_latlon(o) && o.lat_deg > -89.0 && o.lat_deg < 89.0 && std::isfinite(o.alt_m) && o.alt_m >= 0.0;
}

void check_point(Diagnostics& d, const Scenario& s, const geo::GeoPoint& p, const std::string& path, bool check_alt) {
  if (!valid_latlon(p) || (check_alt && (!std::isfinite(p.alt_m) || p.alt_m < 0.0))) {
    d.error("INVALID_COORDINATE", path, "coordinate out of range");
    return;
  }
  if (origin_usable(s.origin)) {
    const auto e = geo::to_enu(s.origin, p);
    if (std::hypot(e.east_m, e.north_m) > kFrameRadiusM) {
      d.error("FRAME_EXTENT", path, "point lies more than 20 km from the scenario origin");
    }
  }
}

void check_region_refs(Diagnostics& d, const Scenario& s, const std::vector<std::string>& ids, const std::string& path) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!s.find_region(ids[i])) d.error("UNKNOWN_REGION", index(path, i), fmt::format("no region with id '{}'", ids[i]));
  }
}

void check_positive(Diagnostics& d, double v, const char* code, const std::string& path, const char* what) {
  if (!(std::isfinite(v) && v > 0.0)) d.error(code, path, fmt::format("{} must be positive", what));
}

}  // namespace

// ----------------------------------------------------------------- public

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::IDLE: return "IDLE";
    case Mode::TAKEOFF: return "TAKEOFF";
    case Mode::MISSION: return "MISSION";
    case Mode::LOITER: return "LOITER";
    case Mode::RTL: return "RTL";
    case Mode::LAND: return "LAND";
    case Mode::LANDED: return "LANDED";
  }
  return "IDLE";
}

std::optional<Mode> mode_from_string(std::string_view s) {
  for (Mode m : {Mode::IDLE, Mode::TAKEOFF, Mode::MISSION, Mode::LOITER, Mode::RTL, Mode::LAND, Mode::LANDED}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::RTL: return "RTL";
    case Command::LAND: return "LAND";
    case Command::LOITER: return "LOITER";
    case Command::RESUME: return "RESUME";
  }
  return "RTL";
}

std::optional<Command> command_from_string(std::string_view s) {
  for (Command c : {Command::RTL, Command::LAND, Command::LOITER, Command::RESUME}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

void Scenario::refresh_frames() {
  regions.clear();
  for (const auto& def : region_defs) {
    geo::Region r;
    r.id = def.id;
    r.alt_floor_m = def.alt_floor_m;
    r.alt_ceiling_m = def.alt_ceiling_m;
    for (const auto& v : def.vertices) {
      auto e = geo::to_enu(origin, {v.lat_deg, v.lon_deg, origin.alt_m});
      e.up_m = 0.0;
      r.polygon.push_back(e);
    }
    regions.push_back(std::move(r));
  }
}

const geo::Region* Scenario::find_region(std::string_view id) const {
  auto it = std::find_if(regions.begin(), regions.end(), [&](const auto& r) { return r.id == id; });
  return it == regions.end() ? nullptr : &*it;
}

const DroneConfig* Scenario::find_drone(std::string_view id) const {
  auto it = std::find_if(drones.begin(), drones.end(), [&](const auto& d) { return d.id == id; });
  return it == drones.end() ? nullptr : &*it;
}

const Mission* Scenario::find_mission(std::string_view drone_id) const {
  auto it = std::find_if(missions.begin(), missions.end(), [&](const auto& m) { return m.drone_id == drone_id; });
  return it == missions.end() ? nullptr : &*it;
}

Scenario parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error("SYNTAX_ERROR", fmt::format("syntax error at line {}, column {}: {}", line, col, e.what()));
  }

  expect_object(root, "", {"format_version", "name", "origin", "regions", "weather", "gps", "comms", "interventions",
                           "drones", "missions", "monitors", "fuzz", "sim"});
  Scenario s;
  s.format_version = get_string(required(root, "format_version", ""), "format_version");
  if (s.format_version != kScenarioFormatVersion) {
    fail("UNSUPPORTED_VERSION", "format_version", fmt::format("unsupported format_version '{}'", s.format_version));
  }
  s.name = get_string(required(root, "name", ""), "name");
  s.origin = parse_geo(required(root, "origin", ""), "origin", true);

  if (const auto* regions = optional_field(root, "regions")) {
    expect_array(*regions, "regions");
    for (std::size_t i = 0; i < regions->size(); ++i) {
      const auto path = index("regions", i);
      const auto& j = expect_object((*regions)[i], path, {"id", "vertices", "floor", "ceiling"});
      RegionDef r;
      r.id = get_string(required(j, "id", path), join(path, "id"));
      const auto vpath = join(path, "vertices");
      const auto& verts = expect_array(required(j, "vertices", path), vpath);
      for (std::size_t k = 0; k < verts.size(); ++k) r.vertices.push_back(parse_geo(verts[k], index(vpath, k), false));
      r.alt_floor_m = get_quantity(required(j, "floor", path), join(path, "floor"), Dim::Length);
      r.alt_ceiling_m = get_quantity(required(j, "ceiling", path), join(path, "ceiling"), Dim::Length);
      s.region_defs.push_back(std::move(r));
    }
  }

  if (const auto* weather = optional_field(root, "weather")) {
    expect_object(*weather, "weather", {"layers", "precipitation", "clouds", "time_of_day"});
    if (const auto* layers = optional_field(*weather, "layers")) {
      expect_array(*layers, "weather.layers");
      for (std::size_t i = 0; i < layers->size(); ++i) {
        const auto path = index("weather.layers", i);
        const auto& j = expect_object((*layers)[i], path, {"lower", "upper", "speed", "gust", "direction_deg"});
        WindLayer w;
        w.alt_lower_m = get_quantity(required(j, "lower", path), join(path, "lower"), Dim::Length);
        w.alt_upper_m = get_quantity(required(j, "upper", path), join(path, "upper"), Dim::Length);
        w.speed_mps = get_quantity(required(j, "speed", path), join(path, "speed"), Dim::Speed);
        if (const auto* g = optional_field(j, "gust")) w.gust_mps = get_quantity(*g, join(path, "gust"), Dim::Speed);
        w.direction_deg = get_number(required(j, "direction_deg", path), join(path, "direction_deg"));
        s.weather.layers.push_back(w);
      }
    }
    if (const auto* v = optional_field(*weather, "precipitation")) s.weather.metadata.precipitation = get_string(*v, "weather.precipitation");
    if (const auto* v = optional_field(*weather, "clouds")) s.weather.metadata.clouds = get_string(*v, "weather.clouds");
    if (const auto* v = optional_field(*weather, "time_of_day")) s.weather.metadata.time_of_day = get_string(*v, "weather.time_of_day");
  }

  if (const auto* gps = optional_field(root, "gps")) {
    expect_object(*gps, "gps", {"satellites", "deprivation_pct", "dead_spots", "model"});
    if (const auto* v = optional_field(*gps, "satellites")) s.gps.satellites = static_cast<int>(get_integer(*v, "gps.satellites"));
    if (const auto* v = optional_field(*gps, "deprivation_pct")) s.gps.deprivation_pct = get_number(*v, "gps.deprivation_pct");
    if (const auto* v = optional_field(*gps, "dead_spots")) s.gps.dead_spot_region_ids = get_string_list(*v, "gps.dead_spots");
    if (const auto* v = optional_field(*gps, "model")) {
      const auto name = get_string(*v, "gps.model");
      if (name == "gaussian") {
        s.gps.model = GpsModel::Gaussian;
      } else if (name == "perfect") {
        s.gps.model = GpsModel::Perfect;
      } else {
        fail("TYPE_ERROR", "gps.model", fmt::format("unknown GPS model '{}'", name));
      }
    }
  } else {
    s.gps.deprivation_pct = 0.0;
  }

  if (const auto* comms = optional_field(root, "comms")) {
    expect_array(*comms, "comms");
    for (std::size_t i = 0; i < comms->size(); ++i) {
      const auto path = index("comms", i);
      const auto& j = expect_object((*comms)[i], path, {"drones", "start", "duration"});
      CommsLossWindow w;
      w.drone_ids = get_string_list(required(j, "drones", path), join(path, "drones"));
      w.start_s = get_quantity(required(j, "start", path), join(path, "start"), Dim::Time);
      w.duration_s = get_quantity(required(j, "duration", path), join(path, "duration"), Dim::Time);
      s.comms.push_back(std::move(w));
    }
  }

  if (const auto* evs = optional_field(root, "interventions")) {
    expect_array(*evs, "interventions");
    for (std::size_t i = 0; i < evs->size(); ++i) {
      const auto path = index("interventions", i);
      const auto& j = expect_object((*evs)[i], path, {"t", "drone", "command"});
      InterventionEvent ev;
      ev.t_s = get_quantity(required(j, "t", path), join(path, "t"), Dim::Time);
      ev.drone_id = get_string(required(j, "drone", path), join(path, "drone"));
      const auto name = get_string(required(j, "command", path), join(path, "command"));
      const auto cmd = command_from_string(name);
      if (!cmd) fail("TYPE_ERROR", join(path, "command"), fmt::format("unknown command '{}'", name));
      ev.command = *cmd;
      s.interventions.push_back(std::move(ev));
    }
  }

  {
    const auto& drones = expect_array(required(root, "drones", ""), "drones");
    for (std::size_t i = 0; i < drones.size(); ++i) {
      const auto path = index("drones", i);
      const auto& j = expect_object(drones[i], path,
                                    {"id", "home", "max_airspeed", "cruise_speed", "climb_rate", "descent_rate",
                                     "accept_radius", "rtl_alt"});
      DroneConfig d;
      d.id = get_string(required(j, "id", path), join(path, "id"));
      d.home = parse_geo(required(j, "home", path), join(path, "home"), true);
      d.max_airspeed_mps = get_quantity(required(j, "max_airspeed", path), join(path, "max_airspeed"), Dim::Speed);
      d.cruise_speed_mps = get_quantity(required(j, "cruise_speed", path), join(path, "cruise_speed"), Dim::Speed);
      d.climb_rate_mps = get_quantity(required(j, "climb_rate", path), join(path, "climb_rate"), Dim::Speed);
      d.descent_rate_mps = get_quantity(required(j, "descent_rate", path), join(path, "descent_rate"), Dim::Speed);
      if (const auto* v = optional_field(j, "accept_radius")) d.accept_radius_m = get_quantity(*v, join(path, "accept_radius"), Dim::Length);
      if (const auto* v = optional_field(j, "rtl_alt")) d.rtl_alt_m = get_quantity(*v, join(path, "rtl_alt"), Dim::Length);
      s.drones.push_back(std::move(d));
    }
  }

  {
    const auto& missions = expect_array(required(root, "missions", ""), "missions");
    for (std::size_t i = 0; i < missions.size(); ++i) s.missions.push_back(parse_mission(missions[i], index("missions", i)));
  }

  if (const auto* monitors = optional_field(root, "monitors")) {
    expect_array(*monitors, "monitors");
    for (std::size_t i = 0; i < monitors->size(); ++i) s.monitors.push_back(parse_monitor((*monitors)[i], index("monitors", i)));
  }

  if (const auto* fuzz = optional_field(root, "fuzz")) {
    if (!fuzz->is_null()) {
      const auto& j = expect_object(*fuzz, "fuzz", {"param", "max", "variants"});
      FuzzSpec f;
      f.param_path = get_string(required(j, "param", "fuzz"), "fuzz.param");
      const auto& max = required(j, "max", "fuzz");
      // The bound is in the field's normalized unit; unit tags are converted.
      f.max_value = max.is_number() ? max.get<double>() : [&] {
        try {
          return get_quantity(max, "fuzz.max", Dim::Speed);
        } catch (const Error&) {
        }
        try {
          return get_quantity(max, "fuzz.max", Dim::Length);
        } catch (const Error&) {
        }
        return get_quantity(max, "fuzz.max", Dim::Time);
      }();
      f.variants = static_cast<int>(get_integer(required(j, "variants", "fuzz"), "fuzz.variants"));
      s.fuzz = f;
    }
  }

  if (const auto* sim = optional_field(root, "sim")) {
    expect_object(*sim, "sim", {"dt", "max_duration", "seed", "rtl_comms_timeout"});
    if (const auto* v = optional_field(*sim, "dt")) s.sim.dt_s = get_quantity(*v, "sim.dt", Dim::Time);
    if (const auto* v = optional_field(*sim, "max_duration")) s.sim.max_duration_s = get_quantity(*v, "sim.max_duration", Dim::Time);
    if (const auto* v = optional_field(*sim, "seed")) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
        fail("TYPE_ERROR", "sim.seed", "expected a non-negative integer");
      }
      s.sim.seed = v->get<std::uint64_t>();
    }
    if (const auto* v = optional_field(*sim, "rtl_comms_timeout")) s.sim.rtl_comms_timeout_s = get_quantity(*v, "sim.rtl_comms_timeout", Dim::Time);
  }

  if (origin_usable(s.origin)) s.refresh_frames();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO_ERROR", fmt::format("cannot read scenario file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["format_version"] = s.format_version;
  root["name"] = s.name;
  root["origin"] = geo_json(s.origin, true);

  json regions = json::array();
  for (const auto& r : s.region_defs) {
    json j;
    j["id"] = r.id;
    json verts = json::array();
    for (const auto& v : r.vertices) verts.push_back(geo_json(v, false));
    j["vertices"] = verts;
    j["floor"] = length(r.alt_floor_m);
    j["ceiling"] = length(r.alt_ceiling_m);
    regions.push_back(j);
  }
  root["regions"] = regions;

  json weather;
  json layers = json::array();
  for (const auto& w : s.weather.layers) {
    json j;
    j["lower"] = length(w.alt_lower_m);
    j["upper"] = length(w.alt_upper_m);
    j["speed"] = speed(w.speed_mps);
    j["gust"] = speed(w.gust_mps);
    j["direction_deg"] = w.direction_deg;
    layers.push_back(j);
  }
  weather["layers"] = layers;
  weather["precipitation"] = s.weather.metadata.precipitation;
  weather["clouds"] = s.weather.metadata.clouds;
  weather["time_of_day"] = s.weather.metadata.time_of_day;
  root["weather"] = weather;

  json gps;
  if (s.gps.satellites) gps["satellites"] = *s.gps.satellites;
  if (s.gps.deprivation_pct) gps["deprivation_pct"] = *s.gps.deprivation_pct;
  gps["dead_spots"] = s.gps.dead_spot_region_ids;
  gps["model"] = gps_model_name(s.gps.model);
  root["gps"] = gps;

  json comms = json::array();
  for (const auto& w : s.comms) {
    json j;
    j["drones"] = w.drone_ids;
    j["start"] = seconds(w.start_s);
    j["duration"] = seconds(w.duration_s);
    comms.push_back(j);
  }
  root["comms"] = comms;

  json evs = json::array();
  for (const auto& ev : s.interventions) {
    json j;
    j["t"] = seconds(ev.t_s);
    j["drone"] = ev.drone_id;
    j["command"] = to_string(ev.command);
    evs.push_back(j);
  }
  root["interventions"] = evs;

  json drones = json::array();
  for (const auto& d : s.drones) {
    json j;
    j["id"] = d.id;
    j["home"] = geo_json(d.home, true);
    j["max_airspeed"] = speed(d.max_airspeed_mps);
    j["cruise_speed"] = speed(d.cruise_speed_mps);
    j["climb_rate"] = speed(d.climb_rate_mps);
    j["descent_rate"] = speed(d.descent_rate_mps);
    j["accept_radius"] = length(d.accept_radius_m);
    j["rtl_alt"] = length(d.rtl_alt_m);
    drones.push_back(j);
  }
  root["drones"] = drones;

  json missions = json::array();
  for (const auto& m : s.missions) {
    json j;
    j["drone"] = m.drone_id;
    std::visit(
        [&](const auto& shape) {
          using T = std::decay_t<decltype(shape)>;
          if constexpr (std::is_same_v<T, WaypointsMission>) {
            j["type"] = "waypoints";
            json wps = json::array();
            for (const auto& p : shape.waypoints) wps.push_back(geo_json(p, true));
            j["waypoints"] = wps;
          } else if constexpr (std::is_same_v<T, CircleMission>) {
            j["type"] = "circle";
            j["center"] = geo_json(shape.center, false);
            j["radius"] = length(shape.radius_m);
            j["alt"] = length(shape.alt_m);
            j["speed"] = speed(shape.speed_mps);
            j["laps"] = shape.laps;
          } else {
            j["type"] = "square";
            j["center"] = geo_json(shape.center, false);
            j["side"] = length(shape.side_m);
            j["alt"] = length(shape.alt_m);
            j["speed"] = speed(shape.speed_mps);
          }
        },
        m.shape);
    missions.push_back(j);
  }
  root["missions"] = missions;

  json monitors = json::array();
  for (const auto& m : s.monitors) {
    json j;
    j["id"] = m.id;
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, MinSeparation>) {
            j["type"] = "min_separation";
            j["min"] = length(k.min_m);
            if (k.mode_filter) j["mode"] = to_string(*k.mode_filter);
          } else if constexpr (std::is_same_v<T, NoFlyZone>) {
            j["type"] = "no_fly_zone";
            j["regions"] = k.region_ids;
          } else if constexpr (std::is_same_v<T, SafeLanding>) {
            j["type"] = "safe_landing";
            if (k.allowed_region_ids) j["allowed"] = *k.allowed_region_ids;
            if (k.forbidden_region_ids) j["forbidden"] = *k.forbidden_region_ids;
          } else if constexpr (std::is_same_v<T, DriftBound>) {
            j["type"] = "drift";
            if (k.absolute_m) j["absolute"] = length(*k.absolute_m);
            if (k.fraction) j["fraction"] = *k.fraction;
            if (k.wind_gate_mps) j["wind_gate"] = speed(*k.wind_gate_mps);
          } else if constexpr (std::is_same_v<T, WaypointReach>) {
            j["type"] = "waypoint_reach";
            j["tolerance"] = length(k.tolerance_m);
          } else {
            j["type"] = "duration";
            j["baseline"] = seconds(k.baseline_s);
            j["factor"] = k.factor;
          }
        },
        m.kind);
    monitors.push_back(j);
  }
  root["monitors"] = monitors;

  if (s.fuzz) {
    json f;
    f["param"] = s.fuzz->param_path;
    f["max"] = s.fuzz->max_value;
    f["variants"] = s.fuzz->variants;
    root["fuzz"] = f;
  }

  json sim;
  sim["dt"] = seconds(s.sim.dt_s);
  sim["max_duration"] = seconds(s.sim.max_duration_s);
  sim["seed"] = s.sim.seed;
  sim["rtl_comms_timeout"] = seconds(s.sim.rtl_comms_timeout_s);
  root["sim"] = sim;

  return root.dump(2) + "\n";
}

std::vector<Diagnostic> validate(const Scenario& s) {
  Diagnostics d;

  if (!origin_usable(s.origin)) {
    d.error("INVALID_ORIGIN", "origin", "origin latitude must lie in (-89, 89), longitude in [-180, 180], altitude >= 0");
  }

  std::set<std::string> seen;
  for (std::size_t i = 0; i < s.region_defs.size(); ++i) {
    const auto& r = s.region_defs[i];
    const auto path = index("regions", i);
    if (!seen.insert(r.id).second) d.error("DUPLICATE_ID", join(path, "id"), fmt::format("region id '{}' repeated", r.id));
    for (std::size_t k = 0; k < r.vertices.size(); ++k) check_point(d, s, r.vertices[k], index(join(path, "vertices"), k), false);
    if (r.vertices.size() < 3) {
      d.error("INVALID_REGION", join(path, "vertices"), "a region needs at least 3 vertices");
    } else if (i < s.regions.size() && !geo::is_simple_polygon(s.regions[i].polygon)) {
      d.error("SELF_INTERSECTING_REGION", join(path, "vertices"), "region polygon is not simple");
    }
    if (!(r.alt_floor_m < r.alt_ceiling_m)) d.error("INVALID_ALT_BAND", path, "floor must be below ceiling");
  }

  const auto& layers = s.weather.layers;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& w = layers[i];
    const auto path = index("weather.layers", i);
    if (!(w.alt_lower_m < w.alt_upper_m)) d.error("INVALID_WIND_LAYER", path, "lower bound must be below upper bound");
    if (!(w.speed_mps >= 0.0)) d.error("INVALID_WIND_LAYER", join(path, "speed"), "speed must be >= 0");
    if (!(w.gust_mps >= 0.0)) d.error("INVALID_WIND_LAYER", join(path, "gust"), "gust must be >= 0");
    if (!(w.direction_deg >= 0.0 && w.direction_deg < 360.0)) {
      d.error("INVALID_WIND_LAYER", join(path, "direction_deg"), "direction must lie in [0, 360)");
    }
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (std::size_t k = i + 1; k < layers.size(); ++k) {
      if (layers[i].alt_lower_m < layers[k].alt_upper_m && layers[k].alt_lower_m < layers[i].alt_upper_m) {
        d.error("OVERLAPPING_WIND_LAYERS", index("weather.layers", k),
                fmt::format("altitude band overlaps weather.layers[{}]", i));
      }
    }
  }

  const bool both = s.gps.satellites.has_value() && s.gps.deprivation_pct.has_value();
  const bool neither = !s.gps.satellites.has_value() && !s.gps.deprivation_pct.has_value();
  if (both || (neither && s.gps.model != GpsModel::Perfect)) {
    d.error("GPS_PARAM_CONFLICT", "gps", "give exactly one of satellites or deprivation_pct");
  }
  if (s.gps.satellites && *s.gps.satellites < 0) d.error("INVALID_GPS", "gps.satellites", "satellite count must be >= 0");
  if (s.gps.deprivation_pct && !(*s.gps.deprivation_pct >= 0.0 && *s.gps.deprivation_pct <= 100.0)) {
    d.error("INVALID_GPS", "gps.deprivation_pct", "deprivation must lie in [0, 100]");
  }
  check_region_refs(d, s, s.gps.dead_spot_region_ids, "gps.dead_spots");

  auto check_drone_ref = [&](const std::string& id, const std::string& path) {
    if (!s.find_drone(id)) d.error("UNKNOWN_DRONE", path, fmt::format("no drone with id '{}'", id));
  };

  for (std::size_t i = 0; i < s.comms.size(); ++i) {
    const auto& w = s.comms[i];
    const auto path = index("comms", i);
    if (w.drone_ids.empty()) d.error("INVALID_COMMS_WINDOW", join(path, "drones"), "window must name at least one drone");
    for (std::size_t k = 0; k < w.drone_ids.size(); ++k) check_drone_ref(w.drone_ids[k], index(join(path, "drones"), k));
    if (!(w.start_s >= 0.0)) d.error("INVALID_COMMS_WINDOW", join(path, "start"), "start must be >= 0");
    if (!(w.duration_s > 0.0)) d.error("INVALID_COMMS_WINDOW", join(path, "duration"), "duration must be positive");
  }

  for (std::size_t i = 0; i < s.interventions.size(); ++i) {
    const auto& ev = s.interventions[i];
    const auto path = index("interventions", i);
    if (!(ev.t_s >= 0.0)) d.error("INVALID_INTERVENTION", join(path, "t"), "time must be >= 0");
    check_drone_ref(ev.drone_id, join(path, "drone"));
  }

  if (s.drones.empty()) d.error("NO_DRONES", "drones", "scenario needs at least one drone");
  seen.clear();
  for (std::size_t i = 0; i < s.drones.size(); ++i) {
    const auto& dr = s.drones[i];
    const auto path = index("drones", i);
    if (dr.id.empty()) d.error("INVALID_DRONE_CONFIG", join(path, "id"), "drone id must not be empty");
    if (!seen.insert(dr.id).second) d.error("DUPLICATE_ID", join(path, "id"), fmt::format("drone id '{}' repeated", dr.id));
    check_point(d, s, dr.home, join(path, "home"), true);
    check_positive(d, dr.cruise_speed_mps, "INVALID_DRONE_CONFIG", join(path, "cruise_speed"), "cruise speed");
    if (dr.cruise_speed_mps > dr.max_airspeed_mps) {
      d.error("INVALID_DRONE_CONFIG", join(path, "cruise_speed"), "cruise speed exceeds max airspeed");
    }
    check_positive(d, dr.climb_rate_mps, "INVALID_DRONE_CONFIG", join(path, "climb_rate"), "climb rate");
    check_positive(d, dr.descent_rate_mps, "INVALID_DRONE_CONFIG", join(path, "descent_rate"), "descent rate");
    check_positive(d, dr.accept_radius_m, "INVALID_DRONE_CONFIG", join(path, "accept_radius"), "accept radius");
    check_positive(d, dr.rtl_alt_m, "INVALID_DRONE_CONFIG", join(path, "rtl_alt"), "RTL altitude");
  }

  seen.clear();
  for (std::size_t i = 0; i < s.missions.size(); ++i) {
    const auto& m = s.missions[i];
    const auto path = index("missions", i);
    const auto* drone = s.find_drone(m.drone_id);
    if (!drone) check_drone_ref(m.drone_id, join(path, "drone"));
    if (!seen.insert(m.drone_id).second) {
      d.error("DUPLICATE_MISSION", join(path, "drone"), fmt::format("drone '{}' has more than one mission", m.drone_id));
    }
    auto check_speed = [&](double v) {
      check_positive(d, v, "INVALID_MISSION", join(path, "speed"), "mission speed");
      if (drone && v > drone->max_airspeed_mps) d.error("INVALID_MISSION", join(path, "speed"), "mission speed exceeds max airspeed");
    };
    std::visit(
        [&](const auto& shape) {
          using T = std::decay_t<decltype(shape)>;
          if constexpr (std::is_same_v<T, WaypointsMission>) {
            if (shape.waypoints.empty()) d.error("INVALID_MISSION", join(path, "waypoints"), "waypoint list is empty");
            for (std::size_t k = 0; k < shape.waypoints.size(); ++k) {
              check_point(d, s, shape.waypoints[k], index(join(path, "waypoints"), k), true);
            }
          } else if constexpr (std::is_same_v<T, CircleMission>) {
            check_point(d, s, shape.center, join(path, "center"), false);
            check_positive(d, shape.radius_m, "INVALID_MISSION", join(path, "radius"), "radius");
            if (!(shape.alt_m >= 0.0)) d.error("INVALID_MISSION", join(path, "alt"), "altitude must be >= 0");
            check_speed(shape.speed_mps);
            if (shape.laps < 1) d.error("INVALID_MISSION", join(path, "laps"), "laps must be >= 1");
          } else {
            check_point(d, s, shape.center, join(path, "center"), false);
            check_positive(d, shape.side_m, "INVALID_MISSION", join(path, "side"), "side");
            if (!(shape.alt_m >= 0.0)) d.error("INVALID_MISSION", join(path, "alt"), "altitude must be >= 0");
            check_speed(shape.speed_mps);
          }
        },
        m.shape);
  }
  for (std::size_t i = 0; i < s.drones.size(); ++i) {
    if (!s.find_mission(s.drones[i].id)) {
      d.error("MISSING_MISSION", index("drones", i), fmt::format("drone '{}' has no mission", s.drones[i].id));
    }
  }

  seen.clear();
  for (std::size_t i = 0; i < s.monitors.size(); ++i) {
    const auto& m = s.monitors[i];
    const auto path = index("monitors", i);
    if (!seen.insert(m.id).second) d.error("DUPLICATE_ID", join(path, "id"), fmt::format("monitor id '{}' repeated", m.id));
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, MinSeparation>) {
            check_positive(d, k.min_m, "INVALID_MONITOR", join(path, "min"), "separation");
          } else if constexpr (std::is_same_v<T, NoFlyZone>) {
            if (k.region_ids.empty()) d.error("INVALID_MONITOR", join(path, "regions"), "no regions listed");
            check_region_refs(d, s, k.region_ids, join(path, "regions"));
          } else if constexpr (std::is_same_v<T, SafeLanding>) {
            if (k.allowed_region_ids.has_value() == k.forbidden_region_ids.has_value()) {
              d.error("INVALID_MONITOR", path, "give exactly one of allowed or forbidden");
            }
            if (k.allowed_region_ids) check_region_refs(d, s, *k.allowed_region_ids, join(path, "allowed"));
            if (k.forbidden_region_ids) check_region_refs(d, s, *k.forbidden_region_ids, join(path, "forbidden"));
          } else if constexpr (std::is_same_v<T, DriftBound>) {
            if (k.absolute_m.has_value() == k.fraction.has_value()) {
              d.error("INVALID_MONITOR", path, "give exactly one of absolute or fraction");
            }
            if (k.absolute_m) check_positive(d, *k.absolute_m, "INVALID_MONITOR", join(path, "absolute"), "drift bound");
            if (k.fraction && !(*k.fraction > 0.0 && *k.fraction <= 1.0)) {
              d.error("INVALID_MONITOR", join(path, "fraction"), "fraction must lie in (0, 1]");
            }
            if (k.wind_gate_mps) check_positive(d, *k.wind_gate_mps, "INVALID_MONITOR", join(path, "wind_gate"), "wind gate");
            if (k.fraction) {
              for (const auto& mission : s.missions) {
                if (!std::holds_alternative<CircleMission>(mission.shape)) {
                  d.error("FRACTION_ON_WAYPOINT_MISSION", join(path, "fraction"),
                          fmt::format("fractional drift needs a circle mission, drone '{}' flies another shape",
                                      mission.drone_id));
                }
              }
            }
          } else if constexpr (std::is_same_v<T, WaypointReach>) {
            check_positive(d, k.tolerance_m, "INVALID_MONITOR", join(path, "tolerance"), "tolerance");
          } else {
            check_positive(d, k.baseline_s, "INVALID_MONITOR", join(path, "baseline"), "baseline");
            if (!(k.factor >= 1.0)) d.error("INVALID_MONITOR", join(path, "factor"), "factor must be >= 1");
          }
        },
        m.kind);
  }

  if (s.fuzz) {
    const auto& f = *s.fuzz;
    if (f.variants < 1) d.error("INVALID_FUZZ", "fuzz.variants", "variants must be >= 1");
    if (!(std::isfinite(f.max_value) && f.max_value > 0.0)) d.error("INVALID_FUZZ", "fuzz.max", "max must be positive");
    try {
      const double current = read_param(s, f.param_path);
      if (!(f.max_value > current || current == 0.0)) {
        d.error("FUZZ_MAX_BELOW_CURRENT", "fuzz.max",
                fmt::format("max {} does not exceed the current value {}", f.max_value, current));
      }
    } catch (const Error& e) {
      d.error(e.code(), "fuzz.param", e.what());
    }
  }

  if (!(s.sim.dt_s > 0.0 && s.sim.dt_s <= 1.0)) d.error("INVALID_SIM", "sim.dt", "dt must lie in (0, 1]");
  check_positive(d, s.sim.max_duration_s, "INVALID_SIM", "sim.max_duration", "max duration");
  if (!(s.sim.rtl_comms_timeout_s >= 0.0)) d.error("INVALID_SIM", "sim.rtl_comms_timeout", "timeout must be >= 0");

  return d.take();
}

double NumericField::get() const {
  return std::visit([](auto* p) { return static_cast<double>(*p); }, target_);
}

void NumericField::set(double value) {
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, double>) {
          *p = value;
        } else {
          *p = static_cast<T>(std::llround(value));
        }
      },
      target_);
  if (reprojects_ && owner_ && origin_usable(owner_->origin)) owner_->refresh_frames();
}

NumericField resolve_param_path(Scenario& s, std::string_view path) {
  auto r = resolve(s, path);
  return NumericField(r.target, &s, r.reprojects);
}

double read_param(const Scenario& s, std::string_view path) {
  // resolve() only hands out pointers; nothing is written through them here.
  return resolve_param_path(const_cast<Scenario&>(s), path).get();
}

}  // namespace drv
