#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "trustfuse/world.hpp"

namespace trustfuse::scenarios {

// Plus-shaped intersection: two 16 m wide roads crossing at the origin, arms 35 m long,
// corner buildings and end caps as walls. Every point on the roads is in line of sight
// of every other point in the central square, so infrastructure agents placed at the
// corners overlap heavily.
inline constexpr double kRoadHalfWidth = 8.0;
inline constexpr double kArmLength = 35.0;

inline std::vector<Segment> intersection_walls()
{
  const double w = kRoadHalfWidth;
  const double l = kArmLength;
  std::vector<Segment> walls;
  for (double sx : {1.0, -1.0}) {
    for (double sy : {1.0, -1.0}) {
      walls.push_back({{sx * w, sy * w}, {sx * w, sy * l}});
      walls.push_back({{sx * w, sy * w}, {sx * l, sy * w}});
    }
  }
  walls.push_back({{-w, l}, {w, l}});
  walls.push_back({{-w, -l}, {w, -l}});
  walls.push_back({{l, -w}, {l, w}});
  walls.push_back({{-l, -w}, {-l, w}});
  return walls;
}

inline ObjectSpec shuttle(int id, Point2 start, Point2 a, Point2 b, double speed, double radius = 1.0)
{
  ObjectSpec o;
  o.initial = {id, start, {}, radius};
  o.waypoints = {a, b};
  o.speed = speed;
  return o;
}

/// Closed loop along one road: out along one lane, a semicircular turn of radius
/// `lane_offset`, back along the opposite lane. Traffic drives on the right.
inline std::vector<Point2> stadium(double half_length, double lane_offset, bool east_west, int arc_points = 8)
{
  std::vector<Point2> pts;
  const double l = half_length;
  const double r = lane_offset;
  pts.push_back({-l, -r});
  for (int i = 0; i <= arc_points; ++i) {
    const double a = -0.5 * kPi + kPi * i / arc_points;
    pts.push_back({l + r * std::cos(a), r * std::sin(a)});
  }
  for (int i = 0; i <= arc_points; ++i) {
    const double a = 0.5 * kPi + kPi * i / arc_points;
    pts.push_back({-l + r * std::cos(a), r * std::sin(a)});
  }
  pts.pop_back();
  if (!east_west)
    for (auto& p : pts) p = {-p.y, p.x};
  return pts;
}

/// Object driving `route` cyclically, starting at fraction `phase` of its length.
inline ObjectSpec looper(int id, const std::vector<Point2>& route, double phase, double speed, double radius = 1.0)
{
  const std::size_t n = route.size();
  double perimeter = 0.0;
  for (std::size_t i = 0; i < n; ++i) perimeter += distance(route[i], route[(i + 1) % n]);
  double s = (phase - std::floor(phase)) * perimeter;
  std::size_t seg = 0;
  while (s > distance(route[seg], route[(seg + 1) % n])) {
    s -= distance(route[seg], route[(seg + 1) % n]);
    seg = (seg + 1) % n;
  }
  const Point2 a = route[seg];
  const Point2 b = route[(seg + 1) % n];
  const double len = distance(a, b);
  ObjectSpec o;
  o.initial = {id, len > 0.0 ? a + (b - a) * (s / len) : a, {}, radius};
  for (std::size_t i = 1; i <= n; ++i) o.waypoints.push_back(route[(seg + i) % n]);
  o.speed = speed;
  return o;
}

inline ObjectSpec parked(int id, Point2 p, double radius = 1.0)
{
  ObjectSpec o;
  o.initial = {id, p, {}, radius};
  return o;
}

// 2.5 degree bins: half-width shadows of a car at 20 m still land in their own bin.
inline constexpr int kFovBins = 144;

inline AgentSpec static_agent(int id, Point2 p, double yaw)
{
  AgentSpec a;
  a.id = id;
  a.pose = Pose2(p, yaw);
  return a;
}

inline std::vector<AgentSpec> corner_agents()
{
  return {static_agent(1, {7.5, 7.5}, -0.75 * kPi), static_agent(2, {-7.5, 7.5}, -0.25 * kPi),
          static_agent(3, {7.5, -7.5}, 0.75 * kPi)};
}

/// Seven objects; agent 0 sits down the west arm with a parked truck partly blocking it.
inline ScenarioConfig case0()
{
  ScenarioConfig s;
  s.name = "case0";
  s.fov_bins = kFovBins;
  s.walls = intersection_walls();
  const auto ew = stadium(24.0, 2.5, true);
  const auto ns = stadium(24.0, 2.5, false);
  s.objects = {
      looper(0, ew, 0.10, 6.0),
      looper(1, ew, 0.60, 6.0),
      looper(2, ns, 0.30, 5.0),
      looper(3, ns, 0.80, 5.0),
      parked(4, {-22, -6.0}, 1.5),
      shuttle(5, {0, 6}, {6, 6}, {-6, 6}, 1.4, 0.4),
      parked(6, {20, 6.5}),
  };
  s.agents = {static_agent(0, {-30, -5}, 0.0)};
  for (const auto& a : corner_agents()) s.agents.push_back(a);
  return s;
}

/// Dense traffic variant of case0: seven objects packed into the central arms.
inline ScenarioConfig case1()
{
  ScenarioConfig s;
  s.name = "case1";
  s.fov_bins = kFovBins;
  s.walls = intersection_walls();
  const auto ew = stadium(22.0, 2.5, true);
  const auto ns = stadium(22.0, 2.5, false);
  s.objects = {
      looper(0, ew, 0.00, 5.0),
      looper(1, ew, 0.33, 5.0),
      looper(2, ew, 0.66, 5.0),
      looper(3, ns, 0.15, 4.0),
      looper(4, ns, 0.65, 4.0),
      parked(5, {-18, 6.0}, 1.5),
      shuttle(6, {-5, -6}, {5, -6}, {-5, -6}, 1.2, 0.4),
  };
  s.agents = {static_agent(0, {-30, 5}, 0.0)};
  for (const auto& a : corner_agents()) s.agents.push_back(a);
  return s;
}

/// Eight objects; agent 0 is mobile and traverses the intersection along the south edge
/// of the east-west road.
inline ScenarioConfig case2()
{
  ScenarioConfig s;
  s.name = "case2";
  s.fov_bins = kFovBins;
  s.walls = intersection_walls();
  const auto ew = stadium(24.0, 2.5, true);
  const auto ns = stadium(24.0, 2.5, false);
  const auto ns_outer = stadium(20.0, 5.5, false);
  s.objects = {
      looper(0, ew, 0.05, 6.0),
      looper(1, ew, 0.55, 6.0),
      looper(2, ns, 0.20, 5.0),
      looper(3, ns, 0.70, 5.0),
      parked(4, {-15, 6.5}),
      parked(5, {15, -6.5}, 1.5),
      shuttle(6, {5, 6}, {6, 6}, {-6, 6}, 1.4, 0.4),
      looper(7, ns_outer, 0.40, 3.0, 0.5),
  };
  AgentSpec mobile;
  mobile.id = 0;
  mobile.waypoints = {{-28, -6}, {28, -6}};
  mobile.speed = 3.0;
  s.agents = {mobile};
  for (const auto& a : corner_agents()) s.agents.push_back(a);
  return s;
}

inline std::vector<std::string> builtin_names() { return {"case0", "case1", "case2"}; }

inline bool is_builtin(const std::string& name)
{
  return name == "case0" || name == "case1" || name == "case2";
}

inline ScenarioConfig builtin(const std::string& name)
{
  if (name == "case0") return case0();
  if (name == "case1") return case1();
  if (name == "case2") return case2();
  throw std::invalid_argument("unknown built-in scenario '" + name + "'");
}

}  // namespace trustfuse::scenarios
