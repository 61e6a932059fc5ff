#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace trustfuse {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a)
{
  a = std::fmod(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  if (a > kPi) a -= kTwoPi;
  return a;
}

/// Wrap an angle into [0, 2pi).
inline double wrap_angle_positive(double a)
{
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

struct Point2
{
  double x = 0.0;
  double y = 0.0;

  constexpr Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  constexpr Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Point2&) const = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double squared_norm() const { return x * x + y * y; }
};

inline constexpr double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double distance(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Planar pose. The heading is normalized into (-pi, pi] on construction.
class Pose2
{
public:
  Pose2() = default;
  Pose2(double x, double y, double yaw) : x_(x), y_(y), yaw_(wrap_angle(yaw)) {}
  Pose2(Point2 p, double yaw) : Pose2(p.x, p.y, yaw) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double yaw() const { return yaw_; }
  Point2 position() const { return {x_, y_}; }

  bool operator==(const Pose2&) const = default;

private:
  double x_ = 0.0;
  double y_ = 0.0;
  double yaw_ = 0.0;
};

inline Point2 rotate(const Point2& p, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

/// Rigid transform of a point expressed in the pose's frame into the parent frame.
inline Point2 to_global(const Pose2& pose, const Point2& p_local)
{
  return rotate(p_local, pose.yaw()) + pose.position();
}

inline Point2 to_local(const Pose2& pose, const Point2& p_global)
{
  return rotate(p_global - pose.position(), -pose.yaw());
}

struct Segment
{
  Point2 a;
  Point2 b;
};

/// Distance from p to the closed segment [a, b].
inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b)
{
  const Point2 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

/// Nearest-to-a intersection of segment [a, b] with a circle, if any.
inline std::optional<Point2> segment_circle_intersect(const Point2& a, const Point2& b,
                                                      const Point2& center, double radius)
{
  if (!(radius > 0.0)) throw std::invalid_argument("segment_circle_intersect: radius must be > 0");
  const Point2 d = b - a;
  const Point2 f = a - center;
  const double qa = d.squared_norm();
  const double qb = 2.0 * dot(f, d);
  const double qc = f.squared_norm() - radius * radius;
  if (qa == 0.0) {
    if (qc <= 0.0) return a;
    return std::nullopt;
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double t0 = (-qb - sq) / (2.0 * qa);
  const double t1 = (-qb + sq) / (2.0 * qa);
  // a inside the circle: the segment starts in the disk
  if (t0 <= 0.0 && t1 >= 0.0) return a;
  if (t0 >= 0.0 && t0 <= 1.0) return a + d * t0;
  return std::nullopt;
}

/// Parameter t along [a, b] of the intersection with segment [c, e], if any.
inline std::optional<double> segment_segment_intersect(const Point2& a, const Point2& b,
                                                       const Point2& c, const Point2& e)
{
  const Point2 r = b - a;
  const Point2 s = e - c;
  const double denom = cross(r, s);
  if (denom == 0.0) return std::nullopt;  // parallel or colinear: treated as no crossing
  const Point2 ac = c - a;
  const double t = cross(ac, s) / denom;
  const double u = cross(ac, r) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

/// Polygon that is star-shaped about `origin`, vertices counter-clockwise.
struct StarPolygon
{
  Point2 origin;
  std::vector<Point2> vertices;

  std::size_t size() const { return vertices.size(); }
};

inline double polygon_area(const std::vector<Point2>& v)
{
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

/// Checks the star-polygon invariants: at least 3 vertices, counter-clockwise, and
/// vertex azimuths about the origin strictly increasing through one turn. A polygon whose
/// vertices sweep monotonically around the origin is simple and star-shaped about it.
inline bool is_valid_star(const StarPolygon& poly)
{
  const auto n = poly.vertices.size();
  if (n < 3) return false;
  double swept = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 u = poly.vertices[i] - poly.origin;
    const Point2 w = poly.vertices[(i + 1) % n] - poly.origin;
    if (u.squared_norm() == 0.0 || w.squared_norm() == 0.0) return false;
    const double step = std::atan2(cross(u, w), dot(u, w));
    if (!(step > 0.0)) return false;
    swept += step;
  }
  return std::abs(swept - kTwoPi) < 1e-6;
}

inline bool on_segment(const Point2& p, const Point2& a, const Point2& b, double tol = 1e-9)
{
  return point_segment_distance(p, a, b) <= tol;
}

/// Point-in-polygon; boundary points count as inside.
inline bool contains(const StarPolygon& poly, const Point2& p)
{
  const auto& v = poly.vertices;
  const auto n = v.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (on_segment(p, v[j], v[i])) return true;
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_cross = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

inline StarPolygon transform(const Pose2& pose, const StarPolygon& poly)
{
  StarPolygon out;
  out.origin = to_global(pose, poly.origin);
  out.vertices.reserve(poly.vertices.size());
  for (const auto& v : poly.vertices) out.vertices.push_back(to_global(pose, v));
  return out;
}

/// Uniform sample inside a star polygon by rejection from its bounding disk about the origin.
template <typename Rng>
Point2 sample_uniform_in(const StarPolygon& poly, Rng& rng)
{
  double r_max = 0.0;
  for (const auto& v : poly.vertices) r_max = std::max(r_max, distance(v, poly.origin));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double r = r_max * std::sqrt(unit(rng));
    const double th = kTwoPi * unit(rng);
    const Point2 p = poly.origin + Point2{r * std::cos(th), r * std::sin(th)};
    if (contains(poly, p)) return p;
  }
  return poly.origin;
}

}  // namespace trustfuse
