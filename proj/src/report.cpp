#include "drv/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

#include "drv/error.hpp"

namespace drv::report {

namespace {

using ordered_json = nlohmann::ordered_json;
using monitors::Status;

double r3(double x) {
  const double r = std::round(x * 1000.0) / 1000.0;
  return r == 0.0 ? 0.0 : r;  // no negative zero in the output
}

geo::EnuPoint r3(const geo::EnuPoint& p) { return {r3(p.east_m), r3(p.north_m), r3(p.up_m)}; }

std::string_view gps_model_name(GpsModel m) { return m == GpsModel::Perfect ? "perfect" : "gaussian"; }

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json to_json(const RunReport& r) {
  ordered_json j;
  j["variant"] = r.variant;
  j["param_value"] = optional_number(r.param_value);
  j["seed"] = r.environment.seed;
  j["status"] = monitors::to_string(r.status);
  j["terminated_by"] = r.terminated_by;

  auto violations = ordered_json::array();
  for (const auto& v : r.violations) {
    ordered_json jv;
    jv["monitor"] = v.monitor_id;
    jv["t"] = v.t_s;
    jv["drones"] = v.drone_ids;
    jv["measured"] = v.measured;
    jv["threshold"] = v.threshold;
    jv["unit"] = v.unit;
    jv["message"] = v.message;
    violations.push_back(std::move(jv));
  }
  j["violations"] = std::move(violations);

  auto drones = ordered_json::array();
  for (const auto& d : r.drones) {
    ordered_json jd;
    jd["id"] = d.drone_id;
    jd["duration"] = d.duration_s;
    jd["distance_flown"] = d.distance_flown_m;
    jd["max_cross_track"] = d.max_cross_track_m;
    jd["mean_cross_track"] = d.mean_cross_track_m;
    jd["completed"] = d.completed;
    jd["landed_pos"] = {{"e", d.landed_pos.east_m}, {"n", d.landed_pos.north_m}, {"u", d.landed_pos.up_m}};
    drones.push_back(std::move(jd));
  }
  j["drones"] = std::move(drones);

  const auto& env = r.environment;
  ordered_json je;
  je["precipitation"] = env.weather.precipitation;
  je["clouds"] = env.weather.clouds;
  je["time_of_day"] = env.weather.time_of_day;
  auto layers = ordered_json::array();
  for (const auto& l : env.wind_layers) {
    layers.push_back({{"lower", l.alt_lower_m},
                      {"upper", l.alt_upper_m},
                      {"speed", l.speed_mps},
                      {"gust", l.gust_mps},
                      {"direction_deg", l.direction_deg}});
  }
  je["wind_layers"] = std::move(layers);
  ordered_json jg;
  jg["satellites"] = env.gps.satellites ? ordered_json(*env.gps.satellites) : ordered_json(nullptr);
  jg["deprivation_pct"] = optional_number(env.gps.deprivation_pct);
  jg["model"] = gps_model_name(env.gps.model);
  jg["dead_spots"] = env.gps.dead_spot_region_ids;
  je["gps"] = std::move(jg);
  j["environment"] = std::move(je);
  return j;
}

template <typename Json>
std::optional<double> read_optional(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.template get<double>();
}

Status status_from(const std::string& s) {
  if (s == "PASSED") return Status::PASSED;
  if (s == "FAILED") return Status::FAILED;
  throw Error("MALFORMED_REPORT", fmt::format("unknown status '{}'", s));
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IO_ERROR", fmt::format("cannot write '{}'", path.string()));
  out << content;
  out.flush();
  if (!out) throw Error("IO_ERROR", fmt::format("write to '{}' failed", path.string()));
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<DroneAnalytics> analytics(const std::vector<engine::TelemetryRecord>& telemetry,
                                      const std::vector<monitors::PlannedPath>& plans) {
  const auto outcomes = monitors::derive_outcomes(telemetry, plans);
  std::vector<DroneAnalytics> out;
  for (const auto& o : outcomes) {
    const auto plan = std::find_if(plans.begin(), plans.end(), [&](const auto& p) { return p.drone_id == o.drone_id; });
    std::vector<const engine::TelemetryRecord*> trace;
    for (const auto& r : telemetry) {
      if (r.drone_id == o.drone_id) trace.push_back(&r);
    }
    std::stable_sort(trace.begin(), trace.end(), [](const auto* a, const auto* b) { return a->t_s < b->t_s; });
    const auto track = monitors::track_deviation(trace, *plan);

    DroneAnalytics a;
    a.drone_id = o.drone_id;
    a.duration_s = o.duration_s;
    a.distance_flown_m = o.distance_flown_m;
    a.completed = o.completed;
    a.landed_pos = o.landed_pos;
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
      if (trace[k]->mode != Mode::MISSION || !(trace[k]->true_pos.up_m > monitors::kAirborneAltM)) continue;
      a.max_cross_track_m = std::max(a.max_cross_track_m, track[k].deviation_m);
      sum += track[k].deviation_m;
      ++n;
    }
    a.mean_cross_track_m = n ? sum / static_cast<double>(n) : 0.0;
    out.push_back(std::move(a));
  }
  return out;
}

RunReport build_run_report(const engine::RunResult& run, const monitors::Verdict& verdict, const Scenario& s,
                           int variant, std::optional<double> param_value) {
  RunReport r;
  r.variant = variant;
  r.param_value = param_value;
  r.status = verdict.status;
  r.violations = verdict.violations;
  r.drones = analytics(run.telemetry, monitors::planned_paths(s));
  r.terminated_by = std::string(engine::to_string(run.terminated_by));
  r.environment = {s.weather.metadata, s.weather.layers, s.gps, run.seed};
  return r;
}

AcceptanceReport build_acceptance_report(const Scenario& s, std::vector<RunReport> runs) {
  AcceptanceReport ar;
  ar.scenario_name = s.name;
  std::stable_sort(runs.begin(), runs.end(), [](const RunReport& a, const RunReport& b) {
    const double va = a.param_value.value_or(0.0);
    const double vb = b.param_value.value_or(0.0);
    return va < vb || (va == vb && a.variant < b.variant);
  });
  const auto base = std::find_if(runs.begin(), runs.end(), [](const RunReport& r) { return r.variant == 0; });
  if (base == runs.end()) throw Error("MISSING_VARIANT_0", "the report needs the unmodified scenario's run");
  ar.overall_status = base->status;
  if (s.fuzz) {
    ar.fuzz = FuzzEcho{s.fuzz->param_path, s.fuzz->max_value, s.fuzz->variants};
    std::vector<std::pair<double, Status>> results;
    for (const auto& r : runs) results.emplace_back(r.param_value.value_or(0.0), r.status);
    ar.boundary = fuzz::find_boundary(std::move(results));
  }
  ar.runs = std::move(runs);
  return ar;
}

AcceptanceReport rounded(const AcceptanceReport& ar) {
  AcceptanceReport out = ar;
  if (out.fuzz) out.fuzz->max_value = r3(out.fuzz->max_value);
  if (out.boundary) {
    if (out.boundary->boundary) out.boundary->boundary = r3(*out.boundary->boundary);
    if (out.boundary->first_failure) out.boundary->first_failure = r3(*out.boundary->first_failure);
  }
  for (auto& r : out.runs) {
    if (r.param_value) r.param_value = r3(*r.param_value);
    for (auto& v : r.violations) {
      v.t_s = r3(v.t_s);
      v.measured = r3(v.measured);
      v.threshold = r3(v.threshold);
    }
    for (auto& d : r.drones) {
      d.duration_s = r3(d.duration_s);
      d.distance_flown_m = r3(d.distance_flown_m);
      d.max_cross_track_m = r3(d.max_cross_track_m);
      d.mean_cross_track_m = r3(d.mean_cross_track_m);
      d.landed_pos = r3(d.landed_pos);
    }
    for (auto& l : r.environment.wind_layers) {
      l = {r3(l.alt_lower_m), r3(l.alt_upper_m), r3(l.speed_mps), r3(l.gust_mps), r3(l.direction_deg)};
    }
    if (r.environment.gps.deprivation_pct) r.environment.gps.deprivation_pct = r3(*r.environment.gps.deprivation_pct);
  }
  return out;
}

std::string serialize_report(const AcceptanceReport& report) {
  const auto ar = rounded(report);
  ordered_json j;
  j["format_version"] = ar.format_version;
  j["scenario"] = ar.scenario_name;
  j["overall_status"] = monitors::to_string(ar.overall_status);
  if (ar.fuzz) {
    j["fuzz"] = {{"param", ar.fuzz->param_path}, {"max", ar.fuzz->max_value}, {"variants", ar.fuzz->variants}};
  } else {
    j["fuzz"] = nullptr;
  }
  if (ar.boundary) {
    j["boundary"] = {{"boundary", optional_number(ar.boundary->boundary)},
                     {"first_failure", optional_number(ar.boundary->first_failure)},
                     {"non_monotone", ar.boundary->non_monotone}};
  } else {
    j["boundary"] = nullptr;
  }
  auto runs = ordered_json::array();
  for (const auto& r : ar.runs) runs.push_back(to_json(r));
  j["runs"] = std::move(runs);
  return j.dump(2) + "\n";
}

AcceptanceReport parse_report(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    AcceptanceReport ar;
    ar.format_version = j.at("format_version").get<std::string>();
    if (ar.format_version != kReportFormatVersion) {
      throw Error("MALFORMED_REPORT", fmt::format("unsupported report version '{}'", ar.format_version));
    }
    ar.scenario_name = j.at("scenario").get<std::string>();
    ar.overall_status = status_from(j.at("overall_status").get<std::string>());
    if (const auto& f = j.at("fuzz"); !f.is_null()) {
      ar.fuzz = FuzzEcho{f.at("param").get<std::string>(), f.at("max").get<double>(), f.at("variants").get<int>()};
    }
    if (const auto& b = j.at("boundary"); !b.is_null()) {
      ar.boundary = fuzz::BoundaryReport{read_optional(b.at("boundary")), read_optional(b.at("first_failure")),
                                         b.at("non_monotone").get<bool>()};
    }
    for (const auto& jr : j.at("runs")) {
      RunReport r;
      r.variant = jr.at("variant").get<int>();
      r.param_value = read_optional(jr.at("param_value"));
      r.status = status_from(jr.at("status").get<std::string>());
      r.terminated_by = jr.at("terminated_by").get<std::string>();
      for (const auto& jv : jr.at("violations")) {
        monitors::Violation v;
        v.monitor_id = jv.at("monitor").get<std::string>();
        v.t_s = jv.at("t").get<double>();
        v.drone_ids = jv.at("drones").get<std::vector<std::string>>();
        v.measured = jv.at("measured").get<double>();
        v.threshold = jv.at("threshold").get<double>();
        v.unit = jv.at("unit").get<std::string>();
        v.message = jv.at("message").get<std::string>();
        r.violations.push_back(std::move(v));
      }
      for (const auto& jd : jr.at("drones")) {
        DroneAnalytics d;
        d.drone_id = jd.at("id").get<std::string>();
        d.duration_s = jd.at("duration").get<double>();
        d.distance_flown_m = jd.at("distance_flown").get<double>();
        d.max_cross_track_m = jd.at("max_cross_track").get<double>();
        d.mean_cross_track_m = jd.at("mean_cross_track").get<double>();
        d.completed = jd.at("completed").get<bool>();
        const auto& lp = jd.at("landed_pos");
        d.landed_pos = {lp.at("e").get<double>(), lp.at("n").get<double>(), lp.at("u").get<double>()};
        r.drones.push_back(std::move(d));
      }
      const auto& je = jr.at("environment");
      r.environment.seed = jr.at("seed").get<std::uint64_t>();
      r.environment.weather = {je.at("precipitation").get<std::string>(), je.at("clouds").get<std::string>(),
                               je.at("time_of_day").get<std::string>()};
      for (const auto& jl : je.at("wind_layers")) {
        r.environment.wind_layers.push_back({jl.at("lower").get<double>(), jl.at("upper").get<double>(),
                                             jl.at("speed").get<double>(), jl.at("gust").get<double>(),
                                             jl.at("direction_deg").get<double>()});
      }
      const auto& jg = je.at("gps");
      if (!jg.at("satellites").is_null()) r.environment.gps.satellites = jg.at("satellites").get<int>();
      r.environment.gps.deprivation_pct = read_optional(jg.at("deprivation_pct"));
      r.environment.gps.model = jg.at("model").get<std::string>() == "perfect" ? GpsModel::Perfect : GpsModel::Gaussian;
      r.environment.gps.dead_spot_region_ids = jg.at("dead_spots").get<std::vector<std::string>>();
      ar.runs.push_back(std::move(r));
    }
    return ar;
  } catch (const nlohmann::json::exception& e) {
    throw Error("MALFORMED_REPORT", e.what());
  }
}

void write_report(const AcceptanceReport& ar, const std::vector<VariantArtifacts>& variants, const std::string& out_dir,
                  bool svg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("IO_ERROR", fmt::format("cannot create '{}': {}", out_dir, ec.message()));
  for (const auto& v : variants) {
    const fs::path dir = fs::path(out_dir) / fmt::format("variant_{}", v.variant);
    fs::create_directories(dir, ec);
    if (ec) throw Error("IO_ERROR", fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    Scenario replay = *v.scenario;
    replay.fuzz.reset();
    replay.sim.seed = v.seed;
    write_file(dir / "scenario.json", serialize_scenario(replay));
    engine::write_telemetry_csv(v.run->telemetry, (dir / "telemetry.csv").string());
    if (svg) write_path_svg(*v.run, monitors::planned_paths(*v.scenario), v.scenario->regions, (dir / "path.svg").string());
  }
  write_file(fs::path(out_dir) / "report.json", serialize_report(ar));
}

std::string render_path_svg(const engine::RunResult& run, const std::vector<monitors::PlannedPath>& planned,
                            const std::vector<geo::Region>& regions) {
  if (run.telemetry.empty()) throw Error("EMPTY_TELEMETRY", "no telemetry to plot");

  double min_e = std::numeric_limits<double>::infinity();
  double min_n = min_e;
  double max_e = -min_e;
  double max_n = -min_e;
  auto grow = [&](const geo::EnuPoint& p) {
    min_e = std::min(min_e, p.east_m);
    max_e = std::max(max_e, p.east_m);
    min_n = std::min(min_n, p.north_m);
    max_n = std::max(max_n, p.north_m);
  };
  for (const auto& r : run.telemetry) grow(r.true_pos);
  for (const auto& p : planned) {
    grow(p.start);
    for (const auto& w : p.waypoints) grow(w);
  }
  for (const auto& region : regions) {
    for (const auto& v : region.polygon) grow(v);
  }
  const double pad = 20.0;
  min_e -= pad;
  min_n -= pad;
  max_e += pad;
  max_n += pad;
  const double span = std::max({max_e - min_e, max_n - min_n, 1.0});
  const double scale = 800.0 / span;
  const double width = (max_e - min_e) * scale;
  const double height = (max_n - min_n) * scale + 40.0;  // room for the scale bar
  auto x = [&](double e) { return (e - min_e) * scale; };
  auto y = [&](double n) { return (max_n - n) * scale; };
  auto points = [&](const auto& pts) {
    std::string s;
    for (const auto& p : pts) {
      if (!s.empty()) s += ' ';
      s += fmt::format("{:.2f},{:.2f}", x(p.east_m), y(p.north_m));
    }
    return s;
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.2f}\" height=\"{1:.2f}\" viewBox=\"0 0 {0:.2f} {1:.2f}\">\n",
      width, height);
  svg += fmt::format("<rect width=\"{:.2f}\" height=\"{:.2f}\" fill=\"white\"/>\n", width, height);
  for (const auto& region : regions) {
    svg += fmt::format(
        "<polygon id=\"region-{}\" points=\"{}\" fill=\"#4caf50\" fill-opacity=\"0.3\" stroke=\"#2e7d32\"/>\n",
        xml_escape(region.id), points(region.polygon));
  }
  for (const auto& p : planned) {
    std::vector<geo::EnuPoint> path{p.start};
    path.insert(path.end(), p.waypoints.begin(), p.waypoints.end());
    svg += fmt::format("<polyline id=\"planned-{}\" points=\"{}\" fill=\"none\" stroke=\"blue\" stroke-width=\"2\"/>\n",
                       xml_escape(p.drone_id), points(path));
  }
  std::vector<std::string> ids;
  for (const auto& r : run.telemetry) {
    if (std::find(ids.begin(), ids.end(), r.drone_id) == ids.end()) ids.push_back(r.drone_id);
  }
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    std::vector<geo::EnuPoint> path;
    for (const auto& r : run.telemetry) {
      if (r.drone_id == id) path.push_back(r.true_pos);
    }
    const auto esc = xml_escape(id);
    svg += fmt::format("<polyline id=\"actual-{}\" points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\"/>\n",
                       esc, points(path));
    svg += fmt::format("<circle id=\"start-{}\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"black\"/>\n", esc,
                       x(path.front().east_m), y(path.front().north_m));
    svg += fmt::format(
        "<rect id=\"landing-{}\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"10\" height=\"10\" fill=\"orange\"/>\n", esc,
        x(path.back().east_m) - 5.0, y(path.back().north_m) - 5.0);
  }
  const double bar_y = height - 20.0;
  svg += fmt::format(
      "<line id=\"scale-bar\" x1=\"10.00\" y1=\"{0:.2f}\" x2=\"{1:.2f}\" y2=\"{0:.2f}\" stroke=\"black\" "
      "stroke-width=\"3\"/>\n",
      bar_y, 10.0 + 100.0 * scale);
  svg += fmt::format("<text x=\"10.00\" y=\"{:.2f}\" font-size=\"12\">100 m</text>\n", bar_y - 6.0);
  svg += "</svg>\n";
  return svg;
}

void write_path_svg(const engine::RunResult& run, const std::vector<monitors::PlannedPath>& planned,
                    const std::vector<geo::Region>& regions, const std::string& path) {
  write_file(path, render_path_svg(run, planned, regions));
}

}  // namespace drv::report
