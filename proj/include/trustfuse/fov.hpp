#pragma once

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "trustfuse/geometry.hpp"

namespace trustfuse {

using PointCloud2 = std::vector<Point2>;

/// Visibility polygon of one sensor, star-shaped about the sensor position.
struct FovPolygon
{
  StarPolygon polygon;
  double timestamp = 0.0;
};

inline constexpr int kDefaultFovBins = 72;

/// Quantized ray-tracing field-of-view estimate from a planar scan expressed in the
/// sensor frame (sensor at the origin). Azimuth [0, 2pi) is split into `n_bins` equal
/// bins; each bin's boundary is the farthest return falling in it, capped at
/// `max_range`. A bin without returns is unobstructed and takes `max_range`. Vertices sit
/// at bin-center azimuths, so the polygon is counter-clockwise and star-shaped.
inline FovPolygon estimate_fov(const PointCloud2& cloud, double max_range, int n_bins,
                               double timestamp = 0.0)
{
  if (n_bins < 8) throw std::invalid_argument("estimate_fov: n_bins must be >= 8");
  if (!(max_range > 0.0)) throw std::invalid_argument("estimate_fov: max_range must be > 0");
  const double bin_width = kTwoPi / n_bins;
  std::vector<double> boundary(static_cast<std::size_t>(n_bins), -1.0);
  for (const auto& p : cloud) {
    const double r = p.norm();
    if (r <= 0.0) continue;
    auto bin = static_cast<int>(wrap_angle_positive(std::atan2(p.y, p.x)) / bin_width);
    bin = std::min(bin, n_bins - 1);
    auto& b = boundary[static_cast<std::size_t>(bin)];
    b = std::max(b, std::min(r, max_range));
  }
  FovPolygon fov;
  fov.timestamp = timestamp;
  fov.polygon.origin = {0.0, 0.0};
  fov.polygon.vertices.reserve(static_cast<std::size_t>(n_bins));
  for (int i = 0; i < n_bins; ++i) {
    const double r = boundary[static_cast<std::size_t>(i)] < 0.0 ? max_range
                                                                  : boundary[static_cast<std::size_t>(i)];
    const double az = (i + 0.5) * bin_width;
    fov.polygon.vertices.push_back({r * std::cos(az), r * std::sin(az)});
  }
  return fov;
}

/// Boundary range of each bin of a polygon produced by estimate_fov.
inline std::vector<double> bin_ranges(const FovPolygon& fov)
{
  std::vector<double> out;
  out.reserve(fov.polygon.vertices.size());
  for (const auto& v : fov.polygon.vertices) out.push_back(distance(v, fov.polygon.origin));
  return out;
}

inline FovPolygon transform(const Pose2& pose, const FovPolygon& fov)
{
  return {transform(pose, fov.polygon), fov.timestamp};
}

/// True when `p` is expected to be observable. With a positive `margin` the point is
/// also accepted when the point `margin` meters closer to the sensor along the same
/// azimuth is contained; this accounts for returns on the near face of an object whose
/// reference point lies behind that face.
inline bool expected_observable(const FovPolygon& fov, const Point2& p, double margin = 0.0)
{
  if (contains(fov.polygon, p)) return true;
  if (margin <= 0.0) return false;
  const Point2 rel = p - fov.polygon.origin;
  const double r = rel.norm();
  if (r <= margin) return true;
  return contains(fov.polygon, fov.polygon.origin + rel * ((r - margin) / r));
}

/// Ids of the positioned entities (global frame, same as `fov`) that the sensor is
/// expected to see.
template <typename Range, typename GetId, typename GetPos>
std::set<int> expected_visible(const FovPolygon& fov, const Range& items, GetId get_id,
                               GetPos get_pos, double margin = 0.0)
{
  std::set<int> ids;
  for (const auto& item : items)
    if (expected_observable(fov, get_pos(item), margin)) ids.insert(get_id(item));
  return ids;
}

}  // namespace trustfuse
