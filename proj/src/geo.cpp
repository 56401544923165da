#include "drv/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "drv/error.hpp"

namespace drv::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kOnEdgeEps = 1e-9;

void check_origin(const GeoPoint& origin) {
  if (!std::isfinite(origin.lat_deg) || !std::isfinite(origin.lon_deg) || !std::isfinite(origin.alt_m)) {
    throw Error("INVALID_FRAME", "frame origin has non-finite coordinates");
  }
  if (!(origin.lat_deg > -89.0 && origin.lat_deg < 89.0)) {
    throw Error("INVALID_FRAME", "frame origin latitude must lie in (-89, 89)");
  }
}

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

double orient(const EnuPoint& a, const EnuPoint& b, const EnuPoint& c) {
  return cross(b.east_m - a.east_m, b.north_m - a.north_m, c.east_m - a.east_m, c.north_m - a.north_m);
}

bool within_box(const EnuPoint& a, const EnuPoint& b, const EnuPoint& p) {
  return std::min(a.east_m, b.east_m) <= p.east_m && p.east_m <= std::max(a.east_m, b.east_m) &&
         std::min(a.north_m, b.north_m) <= p.north_m && p.north_m <= std::max(a.north_m, b.north_m);
}

bool segments_touch(const EnuPoint& a, const EnuPoint& b, const EnuPoint& c, const EnuPoint& d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
  if (o1 == 0 && within_box(a, b, c)) return true;
  if (o2 == 0 && within_box(a, b, d)) return true;
  if (o3 == 0 && within_box(c, d, a)) return true;
  if (o4 == 0 && within_box(c, d, b)) return true;
  return false;
}

double segment_distance(const EnuPoint& p, const EnuPoint& a, const EnuPoint& b) {
  const double dx = b.east_m - a.east_m;
  const double dy = b.north_m - a.north_m;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.east_m - a.east_m) * dx + (p.north_m - a.north_m) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double ex = a.east_m + t * dx - p.east_m;
  const double ey = a.north_m + t * dy - p.north_m;
  return std::sqrt(ex * ex + ey * ey);
}

double nearest_edge_distance(std::span<const EnuPoint> polygon, const EnuPoint& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    best = std::min(best, segment_distance(p, a, b));
  }
  return best;
}

}  // namespace

EnuPoint to_enu(const GeoPoint& origin, const GeoPoint& p) {
  check_origin(origin);
  if (!std::isfinite(p.lat_deg) || !std::isfinite(p.lon_deg) || !std::isfinite(p.alt_m)) {
    throw Error("INVALID_FRAME", "point has non-finite coordinates");
  }
  const double cos_lat = std::cos(origin.lat_deg * kDegToRad);
  return {(p.lon_deg - origin.lon_deg) * kMetersPerDegree * cos_lat,
          (p.lat_deg - origin.lat_deg) * kMetersPerDegree, p.alt_m - origin.alt_m};
}

GeoPoint to_lla(const GeoPoint& origin, const EnuPoint& e) {
  check_origin(origin);
  if (!std::isfinite(e.east_m) || !std::isfinite(e.north_m) || !std::isfinite(e.up_m)) {
    throw Error("INVALID_FRAME", "local point has non-finite coordinates");
  }
  const double cos_lat = std::cos(origin.lat_deg * kDegToRad);
  return {origin.lat_deg + e.north_m / kMetersPerDegree,
          origin.lon_deg + e.east_m / (kMetersPerDegree * cos_lat), origin.alt_m + e.up_m};
}

double horizontal_distance(const EnuPoint& a, const EnuPoint& b) {
  return std::hypot(a.east_m - b.east_m, a.north_m - b.north_m);
}

bool polygon_contains(std::span<const EnuPoint> polygon, const EnuPoint& p) {
  if (polygon.size() < 3) return false;
  if (nearest_edge_distance(polygon, p) <= kOnEdgeEps) return true;
  // Crossing-number test on a horizontal ray towards +east.
  bool inside = false;
  for (std::size_t i = 0, j = polygon.size() - 1; i < polygon.size(); j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.north_m > p.north_m) != (b.north_m > p.north_m)) {
      const double x = a.east_m + (p.north_m - a.north_m) * (b.east_m - a.east_m) / (b.north_m - a.north_m);
      if (p.east_m < x) inside = !inside;
    }
  }
  return inside;
}

bool contains(const Region& r, const EnuPoint& p) {
  if (p.up_m < r.alt_floor_m || p.up_m > r.alt_ceiling_m) return false;
  return polygon_contains(r.polygon, p);
}

double signed_edge_distance(std::span<const EnuPoint> polygon, const EnuPoint& p) {
  const double d = nearest_edge_distance(polygon, p);
  return polygon_contains(polygon, p) ? d : -d;
}

double cross_track(const EnuPoint& p, const EnuPoint& seg_start, const EnuPoint& seg_end) {
  if (seg_start.east_m == seg_end.east_m && seg_start.north_m == seg_end.north_m) {
    throw Error("DEGENERATE_SEGMENT", "cross-track reference segment has zero length");
  }
  return segment_distance(p, seg_start, seg_end);
}

bool is_simple_polygon(std::span<const EnuPoint> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % n];
    if (a.east_m == b.east_m && a.north_m == b.north_m) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& c = polygon[j];
      const auto& d = polygon[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges share one vertex; they must not fold back onto each other.
        const EnuPoint& shared = (j == i + 1) ? b : a;
        const EnuPoint& p = (j == i + 1) ? a : b;
        const EnuPoint& q = (j == i + 1) ? d : c;
        if (orient(p, shared, q) == 0.0) {
          const double dot = (p.east_m - shared.east_m) * (q.east_m - shared.east_m) +
                             (p.north_m - shared.north_m) * (q.north_m - shared.north_m);
          if (dot > 0.0) return false;
        }
        if (n == 3) continue;
      } else if (segments_touch(a, b, c, d)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace drv::geo
