#include "drv/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace drv::world {

WindSample wind_at(std::span<const WindLayer> layers, double alt_m, RandomStream& rng) {
  auto it = std::find_if(layers.begin(), layers.end(),
                         [&](const WindLayer& l) { return l.alt_lower_m <= alt_m && alt_m < l.alt_upper_m; });
  if (it == layers.end()) return {};
  const double speed = it->speed_mps + rng.uniform() * it->gust_mps;
  const double toward = (it->direction_deg + 180.0) * std::numbers::pi / 180.0;
  return {{speed * std::sin(toward), speed * std::cos(toward), 0.0}};
}

std::optional<double> gps_sigma(const GpsConfig& g) {
  if (g.model == GpsModel::Perfect) return 0.0;
  if (g.satellites) {
    const int sats = *g.satellites;
    if (sats >= 15) return 2.0;
    if (sats < 4) return std::nullopt;
    return 2.0 * std::exp2((15.0 - sats) / 2.0);
  }
  return 2.0 + 0.48 * g.deprivation_pct.value_or(0.0);
}

GpsFix perceived_position(const geo::EnuPoint& true_pos, double sigma_m, bool in_dead_spot, const GpsFix& last_fix,
                          const geo::EnuPoint& velocity, double dt_s, RandomStream& rng) {
  if (in_dead_spot) {
    return {{last_fix.perceived.east_m + velocity.east_m * dt_s, last_fix.perceived.north_m + velocity.north_m * dt_s,
             last_fix.perceived.up_m + velocity.up_m * dt_s},
            false,
            sigma_m};
  }
  if (sigma_m == 0.0) return {true_pos, true, 0.0};
  const double ne = rng.normal() * sigma_m;
  const double nn = rng.normal() * sigma_m;
  return {{true_pos.east_m + ne, true_pos.north_m + nn, true_pos.up_m}, true, sigma_m};
}

bool comms_ok(std::span<const CommsLossWindow> windows, std::string_view drone_id, double t_s) {
  for (const auto& w : windows) {
    if (t_s >= w.start_s && t_s < w.start_s + w.duration_s &&
        std::find(w.drone_ids.begin(), w.drone_ids.end(), drone_id) != w.drone_ids.end()) {
      return false;
    }
  }
  return true;
}

}  // namespace drv::world
