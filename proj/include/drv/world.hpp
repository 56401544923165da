#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "drv/geo.hpp"
#include "drv/rng.hpp"
#include "drv/scenario.hpp"

namespace drv::world {

struct WindSample {
  geo::EnuPoint velocity_enu;  // up is always 0
};

struct GpsFix {
  geo::EnuPoint perceived;
  bool valid = true;
  double sigma_m = 0.0;
};

/// Wind at an altitude. Speed is stable + u * gust with u ~ U[0, 1) drawn
/// from `rng` (one draw per call that hits a layer); the vector points
/// toward direction_deg + 180. Zero outside every [lower, upper) band.
WindSample wind_at(std::span<const WindLayer> layers, double alt_m, RandomStream& rng);

/// Horizontal 1-sigma position error. nullopt means no fix is possible
/// (fewer than 4 satellites). The `perfect` model always yields 0.
std::optional<double> gps_sigma(const GpsConfig& g);

GpsFix perceived_position(const geo::EnuPoint& true_pos, double sigma_m, bool in_dead_spot, const GpsFix& last_fix,
                          const geo::EnuPoint& velocity, double dt_s, RandomStream& rng);

/// False iff a window lists the drone and start <= t < start + duration.
bool comms_ok(std::span<const CommsLossWindow> windows, std::string_view drone_id, double t_s);

}  // namespace drv::world
