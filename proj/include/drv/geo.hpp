#pragma once

#include <span>
#include <string>
#include <vector>

namespace drv::geo {

/// Metres per degree of latitude in the local equirectangular frame.
inline constexpr double kMetersPerDegree = 111320.0;

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  double alt_m = 0.0;  // above ground level
  bool operator==(const GeoPoint&) const = default;
};

struct EnuPoint {
  double east_m = 0.0;
  double north_m = 0.0;
  double up_m = 0.0;
  bool operator==(const EnuPoint&) const = default;
};

/// A no-fly or landing area: horizontal polygon times an altitude band.
struct Region {
  std::string id;
  std::vector<EnuPoint> polygon;  // only east/north are used
  double alt_floor_m = 0.0;
  double alt_ceiling_m = 0.0;
  bool operator==(const Region&) const = default;
};

// Local frame conversions. The frame is flat-earth (equirectangular about the
// origin) and is accurate to well under 0.1% within 20 km of the origin.
// Both throw drv::Error("INVALID_FRAME") on non-finite input or an origin
// latitude outside (-89, 89).
EnuPoint to_enu(const GeoPoint& origin, const GeoPoint& p);
GeoPoint to_lla(const GeoPoint& origin, const EnuPoint& e);

double horizontal_distance(const EnuPoint& a, const EnuPoint& b);

/// Inside-or-on-boundary test against the polygon and the altitude band.
bool contains(const Region& r, const EnuPoint& p);

/// Horizontal-only polygon test; the boundary counts as inside.
bool polygon_contains(std::span<const EnuPoint> polygon, const EnuPoint& p);

/// Distance from p to the nearest polygon edge, positive when p is inside
/// (or on) the polygon and negative outside.
double signed_edge_distance(std::span<const EnuPoint> polygon, const EnuPoint& p);

/// Horizontal distance from p to the closed segment [seg_start, seg_end].
/// Throws drv::Error("DEGENERATE_SEGMENT") when the endpoints coincide.
double cross_track(const EnuPoint& p, const EnuPoint& seg_start, const EnuPoint& seg_end);

/// True when no two non-adjacent edges touch and no adjacent edges overlap.
bool is_simple_polygon(std::span<const EnuPoint> polygon);

}  // namespace drv::geo
