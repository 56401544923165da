#include "drv/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "drv/error.hpp"
#include "drv/rng.hpp"
#include "drv/vehicle.hpp"
#include "drv/world.hpp"

namespace drv::engine {

namespace {

constexpr double kTickEps = 1e-9;

struct DroneRun {
  const DroneConfig* config = nullptr;
  DroneConfig effective;
  std::vector<geo::EnuPoint> waypoints;
  RandomStream rng{0};
  vehicle::DroneState state;
  DroneOutcome outcome;
  bool landed = false;
};

TelemetryRecord make_record(const std::string& id, const vehicle::DroneState& st, const world::WindSample& wind) {
  TelemetryRecord r;
  r.t_s = st.t_s;
  r.drone_id = id;
  r.true_pos = st.true_pos;
  r.perceived_pos = st.perceived.perceived;
  r.gps_valid = st.perceived.valid;
  r.velocity_enu = st.velocity_enu;
  r.mode = st.mode;
  r.comms_ok = st.comms_ok;
  r.wind_e = wind.velocity_enu.east_m;
  r.wind_n = wind.velocity_enu.north_m;
  return r;
}

double distance3(const geo::EnuPoint& a, const geo::EnuPoint& b) {
  const double de = a.east_m - b.east_m;
  const double dn = a.north_m - b.north_m;
  const double du = a.up_m - b.up_m;
  return std::sqrt(de * de + dn * dn + du * du);
}

}  // namespace

std::string_view to_string(Termination t) { return t == Termination::ALL_LANDED ? "ALL_LANDED" : "MAX_DURATION"; }

RunResult simulate(const Scenario& s, std::uint64_t seed) {
  if (const auto diags = validate(s); !diags.empty()) {
    throw Error("INVALID_SCENARIO", fmt::format("scenario is invalid: {} {}: {}", diags.front().code, diags.front().path,
                                                diags.front().message));
  }

  RunResult result;
  result.seed = seed;
  result.dt_s = s.sim.dt_s;

  std::vector<DroneRun> drones;
  drones.reserve(s.drones.size());
  for (const auto& cfg : s.drones) {
    DroneRun d;
    const auto& mission = *s.find_mission(cfg.id);
    d.config = &cfg;
    d.effective = vehicle::effective_config(cfg, mission);
    d.waypoints = vehicle::expand_mission(mission, s.origin);
    d.rng = RandomStream(drone_stream_seed(seed, cfg.id));
    d.state = vehicle::initial_state(geo::to_enu(s.origin, cfg.home));
    d.state.comms_ok = world::comms_ok(s.comms, cfg.id, 0.0);
    d.outcome.drone_id = cfg.id;
    drones.push_back(std::move(d));
  }
  std::sort(drones.begin(), drones.end(), [](const DroneRun& a, const DroneRun& b) { return a.config->id < b.config->id; });

  std::vector<const geo::Region*> dead_spots;
  for (const auto& id : s.gps.dead_spot_region_ids) dead_spots.push_back(s.find_region(id));
  const auto sigma = world::gps_sigma(s.gps);
  const double dt = s.sim.dt_s;
  const auto max_ticks = static_cast<long long>(std::floor(s.sim.max_duration_s / dt + kTickEps));

  for (const auto& d : drones) result.telemetry.push_back(make_record(d.config->id, d.state, {}));

  result.terminated_by = Termination::MAX_DURATION;
  long long tick = 0;
  for (; tick < max_ticks; ++tick) {
    const double t = static_cast<double>(tick) * dt;
    const double t_next = static_cast<double>(tick + 1) * dt;
    for (auto& d : drones) {
      const auto& id = d.config->id;
      auto st = d.state;
      st.t_s = t;
      if (tick == 0 && st.mode == Mode::IDLE) st.mode = Mode::TAKEOFF;

      st = vehicle::apply_failsafe(st, world::comms_ok(s.comms, id, t), s.sim.rtl_comms_timeout_s);

      for (const auto& ev : s.interventions) {
        if (ev.drone_id != id || ev.t_s < t - kTickEps || ev.t_s >= t_next - kTickEps) continue;
        auto applied = vehicle::apply_intervention(st, ev.command);
        if (!applied.accepted) {
          result.rejected_interventions.push_back({t, id, ev.command, st.mode});
        }
        st = applied.state;
      }

      const auto wind = world::wind_at(s.weather.layers, st.true_pos.up_m, d.rng);
      bool in_dead_spot = !sigma.has_value();
      for (const auto* region : dead_spots) {
        if (!in_dead_spot && geo::contains(*region, st.true_pos)) in_dead_spot = true;
      }
      const auto fix = world::perceived_position(st.true_pos, sigma.value_or(0.0), in_dead_spot, st.perceived,
                                                 st.commanded_airspeed, dt, d.rng);
      const auto before = st.true_pos;
      st = vehicle::step(st, d.effective, d.waypoints, wind, fix, dt);
      st.t_s = t_next;

      d.outcome.distance_flown_m += distance3(before, st.true_pos);
      if (!d.landed && st.mode == Mode::LANDED) {
        d.landed = true;
        d.outcome.duration_s = t_next;
      }
      d.state = st;
      result.telemetry.push_back(make_record(id, st, wind));
    }
    if (std::all_of(drones.begin(), drones.end(), [](const DroneRun& d) { return d.state.mode == Mode::LANDED; })) {
      result.terminated_by = Termination::ALL_LANDED;
      ++tick;
      break;
    }
  }

  const double end_time = static_cast<double>(tick) * dt;
  for (auto& d : drones) {
    if (!d.landed) d.outcome.duration_s = end_time;
    d.outcome.completed = d.landed && d.state.mission_done;
    d.outcome.landed_pos = d.state.true_pos;
    result.outcomes.push_back(d.outcome);
  }
  return result;
}

std::size_t write_telemetry_csv(const std::vector<TelemetryRecord>& telemetry, std::ostream& out) {
  out << kTelemetryHeader << '\n';
  std::string line;
  for (const auto& r : telemetry) {
    line.clear();
    fmt::format_to(std::back_inserter(line),
                   "{:.6f},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{:.6f},{:.6f},{:.6f},{},{},{:.6f},{:.6f}\n",
                   r.t_s, r.drone_id, r.true_pos.east_m, r.true_pos.north_m, r.true_pos.up_m, r.perceived_pos.east_m,
                   r.perceived_pos.north_m, r.perceived_pos.up_m, r.gps_valid ? 1 : 0, r.velocity_enu.east_m,
                   r.velocity_enu.north_m, r.velocity_enu.up_m, to_string(r.mode), r.comms_ok ? 1 : 0, r.wind_e,
                   r.wind_n);
    out << line;
  }
  return telemetry.size();
}

std::size_t write_telemetry_csv(const std::vector<TelemetryRecord>& telemetry, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("IO_ERROR", fmt::format("cannot write telemetry file '{}'", path));
  const auto n = write_telemetry_csv(telemetry, out);
  out.flush();
  if (!out) throw Error("IO_ERROR", fmt::format("write to '{}' failed", path));
  return n;
}

std::vector<TelemetryRecord> read_telemetry_csv(std::string_view text) {
  std::vector<TelemetryRecord> out;
  std::map<std::string, double, std::less<>> last_time;
  std::size_t row = 0;
  double last_global = -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++row;
    if (row == 1) {
      if (line != kTelemetryHeader) throw Error("MALFORMED_CSV", "row 1: unexpected telemetry header");
      continue;
    }
    if (line.empty()) continue;

    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 16) {
      throw Error("MALFORMED_CSV", fmt::format("row {}: expected 16 columns, found {}", row, cells.size()));
    }
    auto num = [&](std::size_t i) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v);
      if (ec != std::errc() || p != cells[i].data() + cells[i].size() || !std::isfinite(v)) {
        throw Error("MALFORMED_CSV", fmt::format("row {}: column {} is not a number", row, i + 1));
      }
      return v;
    };
    auto flag = [&](std::size_t i) {
      if (cells[i] == "1") return true;
      if (cells[i] == "0") return false;
      throw Error("MALFORMED_CSV", fmt::format("row {}: column {} must be 0 or 1", row, i + 1));
    };

    TelemetryRecord r;
    r.t_s = num(0);
    r.drone_id = std::string(cells[1]);
    if (r.drone_id.empty()) throw Error("MALFORMED_CSV", fmt::format("row {}: empty drone id", row));
    r.true_pos = {num(2), num(3), num(4)};
    r.perceived_pos = {num(5), num(6), num(7)};
    r.gps_valid = flag(8);
    r.velocity_enu = {num(9), num(10), num(11)};
    const auto mode = mode_from_string(cells[12]);
    if (!mode) throw Error("MALFORMED_CSV", fmt::format("row {}: unknown mode '{}'", row, cells[12]));
    r.mode = *mode;
    r.comms_ok = flag(13);
    r.wind_e = num(14);
    r.wind_n = num(15);

    if (r.t_s < last_global) {
      throw Error("NONMONOTONE_TIME", fmt::format("row {}: time {} precedes the previous row", row, cells[0]));
    }
    last_global = r.t_s;
    auto [it, inserted] = last_time.try_emplace(r.drone_id, r.t_s);
    if (!inserted) {
      if (r.t_s <= it->second) {
        throw Error("NONMONOTONE_TIME", fmt::format("row {}: time for drone '{}' does not increase", row, r.drone_id));
      }
      it->second = r.t_s;
    }
    out.push_back(std::move(r));
  }
  if (row == 0) throw Error("MALFORMED_CSV", "row 1: missing telemetry header");
  return out;
}

}  // namespace drv::engine
