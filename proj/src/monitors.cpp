#include "drv/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <utility>

#include <fmt/format.h>

#include "drv/error.hpp"
#include "drv/vehicle.hpp"

namespace drv::monitors {

using engine::TelemetryRecord;

namespace {

using RecordPtrs = std::vector<const TelemetryRecord*>;

bool airborne(const TelemetryRecord& r) { return r.true_pos.up_m > kAirborneAltM; }

// Records grouped per drone in time order, drones sorted by id.
std::map<std::string, RecordPtrs> by_drone(const std::vector<TelemetryRecord>& telemetry) {
  std::map<std::string, RecordPtrs> out;
  for (const auto& r : telemetry) out[r.drone_id].push_back(&r);
  for (auto& [id, recs] : out) {
    std::stable_sort(recs.begin(), recs.end(), [](const auto* a, const auto* b) { return a->t_s < b->t_s; });
  }
  return out;
}

// Records grouped by identical timestamp, in time order.
std::vector<RecordPtrs> by_tick(const std::vector<TelemetryRecord>& telemetry) {
  RecordPtrs all;
  all.reserve(telemetry.size());
  for (const auto& r : telemetry) all.push_back(&r);
  std::stable_sort(all.begin(), all.end(), [](const auto* a, const auto* b) {
    return std::tie(a->t_s, a->drone_id) < std::tie(b->t_s, b->drone_id);
  });
  std::vector<RecordPtrs> ticks;
  for (const auto* r : all) {
    if (ticks.empty() || ticks.back().front()->t_s != r->t_s) ticks.emplace_back();
    ticks.back().push_back(r);
  }
  return ticks;
}

void sort_violations(std::vector<Violation>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Violation& a, const Violation& b) {
    return std::tie(a.t_s, a.drone_ids, a.message) < std::tie(b.t_s, b.drone_ids, b.message);
  });
}

double point_to_segment(const geo::EnuPoint& p, const geo::EnuPoint& a, const geo::EnuPoint& b) {
  if (a.east_m == b.east_m && a.north_m == b.north_m) return geo::horizontal_distance(p, a);
  return geo::cross_track(p, a, b);
}

Violation separation_violation(const std::string& a, const std::string& b, double t_s, double min_dist, double min_m) {
  return {"",
          t_s,
          {a, b},
          min_dist,
          min_m,
          "m",
          fmt::format("{} and {} came within {:.3f} m laterally (minimum {:.3f} m)", a, b, min_dist, min_m)};
}

bool mode_passes(const TelemetryRecord& r, std::optional<Mode> filter) { return !filter || r.mode == *filter; }

struct PairBreach {
  std::size_t i = 0;  // indices into the tick's record list, i < j
  std::size_t j = 0;
  double distance = 0.0;
};

}  // namespace

std::string_view to_string(Status s) { return s == Status::PASSED ? "PASSED" : "FAILED"; }

std::vector<PlannedPath> planned_paths(const Scenario& s) {
  std::vector<PlannedPath> out;
  for (const auto& d : s.drones) {
    const auto* mission = s.find_mission(d.id);
    if (!mission) continue;
    PlannedPath p;
    p.drone_id = d.id;
    p.start = geo::to_enu(s.origin, d.home);
    p.waypoints = vehicle::expand_mission(*mission, s.origin);
    p.accept_radius_m = d.accept_radius_m;
    if (const auto* c = std::get_if<CircleMission>(&mission->shape)) {
      p.circle = PlannedPath::Circle{geo::to_enu(s.origin, {c->center.lat_deg, c->center.lon_deg, s.origin.alt_m}),
                                     c->radius_m};
    }
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.drone_id < b.drone_id; });
  return out;
}

std::vector<TrackPoint> track_deviation(std::span<const TelemetryRecord* const> trace, const PlannedPath& plan) {
  std::vector<TrackPoint> out;
  out.reserve(trace.size());
  const std::size_t n = plan.waypoints.size();
  std::size_t idx = 0;
  bool done = false;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& r = *trace[k];
    // Waypoint advance mirrors the vehicle: it happens on steps flown in
    // MISSION, judged on the perceived position stored with the record.
    if (!done && n > 0) {
      const bool in_mission = r.mode == Mode::MISSION;
      const bool finished_here = (r.mode == Mode::LAND || r.mode == Mode::LANDED) && k > 0 && idx == n - 1 &&
                                 (trace[k - 1]->mode == Mode::MISSION || trace[k - 1]->mode == Mode::TAKEOFF ||
                                  trace[k - 1]->mode == Mode::LOITER);
      if ((in_mission || finished_here) &&
          geo::horizontal_distance(r.perceived_pos, plan.waypoints[idx]) < plan.accept_radius_m) {
        ++idx;
        if (idx == n) {
          done = true;
          idx = n - 1;
        }
      }
    }
    TrackPoint tp;
    tp.leg = idx;
    tp.mission_done = done;
    if (plan.circle) {
      tp.deviation_m =
          std::abs(geo::horizontal_distance(r.true_pos, plan.circle->center) - plan.circle->radius_m);
    } else if (n > 0) {
      const auto& from = idx == 0 ? plan.start : plan.waypoints[idx - 1];
      tp.deviation_m = point_to_segment(r.true_pos, from, plan.waypoints[idx]);
    }
    out.push_back(tp);
  }
  return out;
}

std::vector<engine::DroneOutcome> derive_outcomes(const std::vector<TelemetryRecord>& telemetry,
                                                  const std::vector<PlannedPath>& plans) {
  const auto grouped = by_drone(telemetry);
  std::vector<engine::DroneOutcome> out;
  for (const auto& plan : plans) {
    auto it = grouped.find(plan.drone_id);
    if (it == grouped.end() || it->second.empty()) continue;
    const auto& recs = it->second;
    const auto track = track_deviation(recs, plan);
    engine::DroneOutcome o;
    o.drone_id = plan.drone_id;
    std::optional<std::size_t> landed_at;
    for (std::size_t k = 0; k < recs.size(); ++k) {
      if (k > 0) {
        const auto& a = recs[k - 1]->true_pos;
        const auto& b = recs[k]->true_pos;
        o.distance_flown_m += std::sqrt((a.east_m - b.east_m) * (a.east_m - b.east_m) +
                                        (a.north_m - b.north_m) * (a.north_m - b.north_m) +
                                        (a.up_m - b.up_m) * (a.up_m - b.up_m));
      }
      if (!landed_at && recs[k]->mode == Mode::LANDED) landed_at = k;
    }
    o.duration_s = landed_at ? recs[*landed_at]->t_s : recs.back()->t_s;
    o.completed = landed_at.has_value() && track[*landed_at].mission_done;
    o.landed_pos = recs.back()->true_pos;
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Violation> check_separation_serial(const std::vector<TelemetryRecord>& telemetry, double min_m,
                                               std::optional<Mode> mode_filter) {
  struct Open {
    std::size_t last_tick = 0;
    double start_t = 0.0;
    double min_dist = 0.0;
  };
  std::map<std::pair<std::string, std::string>, Open> open;
  std::vector<Violation> out;
  const auto ticks = by_tick(telemetry);
  for (std::size_t k = 0; k < ticks.size(); ++k) {
    const auto& recs = ticks[k];
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (!airborne(*recs[i]) || !mode_passes(*recs[i], mode_filter)) continue;
      for (std::size_t j = i + 1; j < recs.size(); ++j) {
        if (!airborne(*recs[j]) || !mode_passes(*recs[j], mode_filter)) continue;
        const double d = geo::horizontal_distance(recs[i]->true_pos, recs[j]->true_pos);
        if (!(d < min_m)) continue;
        const auto key = std::make_pair(recs[i]->drone_id, recs[j]->drone_id);
        auto it = open.find(key);
        if (it != open.end() && it->second.last_tick + 1 == k) {
          it->second.last_tick = k;
          it->second.min_dist = std::min(it->second.min_dist, d);
          continue;
        }
        if (it != open.end()) {
          out.push_back(separation_violation(key.first, key.second, it->second.start_t, it->second.min_dist, min_m));
          open.erase(it);
        }
        open.emplace(key, Open{k, recs[i]->t_s, d});
      }
    }
  }
  for (const auto& [key, ep] : open) {
    out.push_back(separation_violation(key.first, key.second, ep.start_t, ep.min_dist, min_m));
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> check_separation(const std::vector<TelemetryRecord>& telemetry, double min_m,
                                        std::optional<Mode> mode_filter) {
  const auto ticks = by_tick(telemetry);
  const auto tick_count = static_cast<long long>(ticks.size());
  std::vector<std::vector<PairBreach>> breaches(ticks.size());

#pragma omp parallel for schedule(static)
  for (long long k = 0; k < tick_count; ++k) {
    const auto& recs = ticks[static_cast<std::size_t>(k)];
    auto& found = breaches[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (!airborne(*recs[i]) || !mode_passes(*recs[i], mode_filter)) continue;
      for (std::size_t j = i + 1; j < recs.size(); ++j) {
        if (!airborne(*recs[j]) || !mode_passes(*recs[j], mode_filter)) continue;
        const double d = geo::horizontal_distance(recs[i]->true_pos, recs[j]->true_pos);
        if (d < min_m) found.push_back({i, j, d});
      }
    }
  }

  struct Episode {
    std::size_t last_tick;
    double start_t;
    double min_dist;
  };
  std::map<std::pair<std::string, std::string>, std::vector<Episode>> episodes;
  for (std::size_t k = 0; k < ticks.size(); ++k) {
    for (const auto& b : breaches[k]) {
      auto& list = episodes[{ticks[k][b.i]->drone_id, ticks[k][b.j]->drone_id}];
      if (!list.empty() && list.back().last_tick + 1 == k) {
        list.back().last_tick = k;
        list.back().min_dist = std::min(list.back().min_dist, b.distance);
      } else {
        list.push_back({k, ticks[k].front()->t_s, b.distance});
      }
    }
  }
  std::vector<Violation> out;
  for (const auto& [key, list] : episodes) {
    for (const auto& ep : list) out.push_back(separation_violation(key.first, key.second, ep.start_t, ep.min_dist, min_m));
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> check_no_fly(const std::vector<TelemetryRecord>& telemetry, std::span<const geo::Region> regions) {
  std::vector<Violation> out;
  for (const auto& [id, recs] : by_drone(telemetry)) {
    for (const auto& region : regions) {
      std::optional<Violation> current;
      for (const auto* r : recs) {
        const bool inside = airborne(*r) && geo::contains(region, r->true_pos);
        if (!inside) {
          if (current) out.push_back(std::move(*current));
          current.reset();
          continue;
        }
        const double depth = geo::signed_edge_distance(region.polygon, r->true_pos);
        if (!current) {
          current = Violation{"", r->t_s, {id}, depth, 0.0, "m", ""};
        } else {
          current->measured = std::max(current->measured, depth);
        }
        current->message = fmt::format("{} entered no-fly zone {} (max penetration {:.3f} m)", id, region.id,
                                       current->measured);
      }
      if (current) out.push_back(std::move(*current));
    }
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> check_safe_landing(const std::vector<TelemetryRecord>& telemetry,
                                          const std::vector<geo::Region>* allowed,
                                          const std::vector<geo::Region>* forbidden) {
  auto landing_mode = [](const TelemetryRecord& r) {
    return r.true_pos.up_m <= kAirborneAltM && (r.mode == Mode::LAND || r.mode == Mode::LANDED);
  };
  std::vector<Violation> out;
  for (const auto& [id, recs] : by_drone(telemetry)) {
    std::vector<const TelemetryRecord*> events;
    for (std::size_t k = 1; k < recs.size(); ++k) {
      if (landing_mode(*recs[k]) && !landing_mode(*recs[k - 1])) events.push_back(recs[k]);
    }
    const auto* last = recs.back();
    if (last->true_pos.up_m <= kAirborneAltM && !landing_mode(*last)) events.push_back(last);

    for (const auto* ev : events) {
      if (forbidden) {
        const geo::Region* hit = nullptr;
        double depth = 0.0;
        for (const auto& region : *forbidden) {
          if (!geo::polygon_contains(region.polygon, ev->true_pos)) continue;
          const double d = geo::signed_edge_distance(region.polygon, ev->true_pos);
          if (!hit || d > depth) {
            hit = &region;
            depth = d;
          }
        }
        if (hit) {
          out.push_back({"", ev->t_s, {id}, depth, 0.0, "m",
                         fmt::format("{} touched down inside forbidden region {} ({:.3f} m inside)", id, hit->id,
                                     depth)});
        }
      } else if (allowed) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& region : *allowed) best = std::max(best, geo::signed_edge_distance(region.polygon, ev->true_pos));
        if (best < 0.0) {
          const double outside = -best;
          out.push_back({"", ev->t_s, {id}, outside, 0.0, "m",
                         fmt::format("{} touched down {:.3f} m outside every allowed landing region", id, outside)});
        } else if (allowed->empty()) {
          out.push_back({"", ev->t_s, {id}, 0.0, 0.0, "m", fmt::format("{} touched down with no allowed region", id)});
        }
      }
    }
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> check_drift(const std::vector<TelemetryRecord>& telemetry, const std::vector<PlannedPath>& plans,
                                   const DriftBound& bound) {
  const auto grouped = by_drone(telemetry);
  std::vector<Violation> out;
  for (const auto& plan : plans) {
    if (bound.fraction && !plan.circle) {
      throw Error("FRACTION_ON_WAYPOINT_MISSION",
                  fmt::format("fractional drift bound needs a circle mission; drone '{}' has none", plan.drone_id));
    }
    auto it = grouped.find(plan.drone_id);
    if (it == grouped.end()) continue;
    const auto& recs = it->second;
    const auto track = track_deviation(recs, plan);
    const bool fractional = bound.fraction.has_value();
    const double limit = fractional ? *bound.fraction : bound.absolute_m.value_or(0.0);
    const char* unit = fractional ? "fraction" : "m";

    std::optional<Violation> current;
    auto close = [&] {
      if (!current) return;
      current->message = fractional
                             ? fmt::format("{} drifted {:.1f}% of the circle radius (limit {:.1f}%)", plan.drone_id,
                                           current->measured * 100.0, limit * 100.0)
                             : fmt::format("{} drifted {:.3f} m from the planned path (limit {:.3f} m)", plan.drone_id,
                                           current->measured, limit);
      out.push_back(std::move(*current));
      current.reset();
    };
    for (std::size_t k = 0; k < recs.size(); ++k) {
      const auto& r = *recs[k];
      bool checked = r.mode == Mode::MISSION && airborne(r);
      if (checked && bound.wind_gate_mps) checked = std::hypot(r.wind_e, r.wind_n) >= *bound.wind_gate_mps;
      const double value = fractional ? track[k].deviation_m / plan.circle->radius_m : track[k].deviation_m;
      if (!checked || !(value > limit)) {
        close();
        continue;
      }
      if (!current) {
        current = Violation{"", r.t_s, {plan.drone_id}, value, limit, unit, ""};
      } else {
        current->measured = std::max(current->measured, value);
      }
    }
    close();
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> check_waypoint_reach(const std::vector<TelemetryRecord>& telemetry,
                                            const std::vector<PlannedPath>& plans, double tolerance_m) {
  const auto grouped = by_drone(telemetry);
  std::vector<Violation> out;
  for (const auto& plan : plans) {
    auto it = grouped.find(plan.drone_id);
    if (it == grouped.end() || it->second.empty()) continue;
    const double limit = tolerance_m + plan.accept_radius_m;
    for (std::size_t w = 0; w < plan.waypoints.size(); ++w) {
      const auto& wp = plan.waypoints[w];
      double best = std::numeric_limits<double>::infinity();
      double best_t = 0.0;
      for (const auto* r : it->second) {
        const double d = geo::horizontal_distance(r->true_pos, wp);
        if (d < best) {
          best = d;
          best_t = r->t_s;
        }
      }
      if (best > limit) {
        out.push_back({"", best_t, {plan.drone_id}, best, limit, "m",
                       fmt::format("{} passed waypoint {} no closer than {:.3f} m (allowed {:.3f} m)", plan.drone_id,
                                   w, best, limit)});
      }
    }
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> check_duration(const std::vector<engine::DroneOutcome>& outcomes,
                                      const std::vector<TelemetryRecord>& /*telemetry*/, double baseline_s,
                                      double factor) {
  const double limit = baseline_s * factor;
  std::vector<Violation> out;
  for (const auto& o : outcomes) {
    if (o.completed && !(o.duration_s > limit)) continue;
    out.push_back({"", o.duration_s, {o.drone_id}, o.duration_s, limit, "s",
                   o.completed ? fmt::format("{} took {:.1f} s (limit {:.1f} s)", o.drone_id, o.duration_s, limit)
                               : fmt::format("{} did not complete its mission ({:.1f} s elapsed)", o.drone_id,
                                             o.duration_s)});
  }
  sort_violations(out);
  return out;
}

Verdict evaluate(const std::vector<MonitorSpec>& monitors, const std::vector<TelemetryRecord>& telemetry,
                 const Scenario& s) {
  const auto plans = planned_paths(s);
  std::optional<std::vector<engine::DroneOutcome>> outcomes;
  auto regions_for = [&](const std::vector<std::string>& ids) {
    std::vector<geo::Region> out;
    for (const auto& id : ids) {
      if (const auto* r = s.find_region(id)) out.push_back(*r);
    }
    return out;
  };

  Verdict verdict;
  for (const auto& spec : monitors) {
    std::vector<Violation> found = std::visit(
        [&](const auto& k) -> std::vector<Violation> {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, MinSeparation>) {
            return check_separation(telemetry, k.min_m, k.mode_filter);
          } else if constexpr (std::is_same_v<T, NoFlyZone>) {
            return check_no_fly(telemetry, regions_for(k.region_ids));
          } else if constexpr (std::is_same_v<T, SafeLanding>) {
            if (k.forbidden_region_ids) {
              const auto forbidden = regions_for(*k.forbidden_region_ids);
              return check_safe_landing(telemetry, nullptr, &forbidden);
            }
            const auto allowed = regions_for(k.allowed_region_ids.value_or(std::vector<std::string>{}));
            return check_safe_landing(telemetry, &allowed, nullptr);
          } else if constexpr (std::is_same_v<T, DriftBound>) {
            return check_drift(telemetry, plans, k);
          } else if constexpr (std::is_same_v<T, WaypointReach>) {
            return check_waypoint_reach(telemetry, plans, k.tolerance_m);
          } else {
            if (!outcomes) outcomes = derive_outcomes(telemetry, plans);
            return check_duration(*outcomes, telemetry, k.baseline_s, k.factor);
          }
        },
        spec.kind);
    for (auto& v : found) {
      v.monitor_id = spec.id;
      verdict.violations.push_back(std::move(v));
    }
  }
  verdict.status = verdict.violations.empty() ? Status::PASSED : Status::FAILED;
  return verdict;
}

Verdict evaluate(const std::vector<MonitorSpec>& monitors, const engine::RunResult& run, const Scenario& s) {
  return evaluate(monitors, run.telemetry, s);
}

}  // namespace drv::monitors
