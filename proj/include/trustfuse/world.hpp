#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "trustfuse/fov.hpp"
#include "trustfuse/geometry.hpp"

namespace trustfuse {

struct ObjectState
{
  int id = 0;
  Point2 position;
  Point2 velocity;
  double radius = 1.0;
};

/// Motion of a ground-truth object: constant velocity when `waypoints` is empty,
/// otherwise cyclic waypoint following at `speed` (two waypoints give a shuttle).
struct ObjectSpec
{
  ObjectState initial;
  std::vector<Point2> waypoints;
  double speed = 0.0;
};

struct SensorSpec
{
  double max_range = 50.0;
  int n_rays = 720;
  double noise_sigma = 0.3;
  double p_natural_fn = 0.05;
  double lambda_natural_fp = 0.05;
};

/// A static agent uses `pose`; a mobile agent follows `waypoints` cyclically at `speed`,
/// heading along its direction of travel.
struct AgentSpec
{
  int id = 0;
  Pose2 pose;
  std::vector<Point2> waypoints;
  double speed = 0.0;
  SensorSpec sensor;

  bool mobile() const { return !waypoints.empty(); }
};

struct Detection
{
  int agent_id = 0;
  Point2 position;  // agent frame
  double timestamp = 0.0;
};

struct ScenarioConfig
{
  std::string name = "custom";
  double duration = 30.0;
  double dt = 0.1;
  std::vector<ObjectSpec> objects;
  std::vector<AgentSpec> agents;
  std::vector<Segment> walls;
  std::uint64_t rng_seed = 0;
  int fov_bins = kDefaultFovBins;
};

/// Follows a cyclic waypoint list, carrying leftover travel distance across corners.
struct WaypointFollower
{
  std::vector<Point2> waypoints;
  double speed = 0.0;
  std::size_t next = 0;

  /// Advances `pos`, returns the heading of the final segment travelled.
  double advance(Point2& pos, double dt, double heading)
  {
    if (waypoints.empty() || speed <= 0.0) return heading;
    double remaining = speed * dt;
    for (std::size_t guard = 0; guard < 4 * waypoints.size() + 4 && remaining > 0.0; ++guard) {
      const Point2 target = waypoints[next];
      const Point2 delta = target - pos;
      const double d = delta.norm();
      if (d > 0.0) heading = std::atan2(delta.y, delta.x);
      if (d > remaining) {
        pos = pos + delta * (remaining / d);
        return heading;
      }
      pos = target;
      remaining -= d;
      next = (next + 1) % waypoints.size();
      const Point2 ahead = waypoints[next] - pos;
      if (ahead.squared_norm() > 0.0) heading = std::atan2(ahead.y, ahead.x);
    }
    return heading;
  }

  Point2 velocity(const Point2& pos) const
  {
    if (waypoints.empty() || speed <= 0.0) return {};
    const Point2 delta = waypoints[next] - pos;
    const double d = delta.norm();
    if (d == 0.0) return {};
    return delta * (speed / d);
  }
};

struct WorldObject
{
  ObjectState state;
  WaypointFollower follower;
};

struct WorldAgent
{
  AgentSpec spec;
  Pose2 pose;
  WaypointFollower follower;
};

struct World
{
  double time = 0.0;
  std::vector<WorldObject> objects;
  std::vector<WorldAgent> agents;
  std::vector<Segment> walls;

  const WorldAgent& agent(int id) const
  {
    for (const auto& a : agents)
      if (a.spec.id == id) return a;
    throw std::out_of_range("World::agent: unknown agent id " + std::to_string(id));
  }
};

inline World make_world(const ScenarioConfig& cfg)
{
  World w;
  w.walls = cfg.walls;
  for (const auto& o : cfg.objects) {
    WorldObject wo;
    wo.state = o.initial;
    wo.follower = {o.waypoints, o.speed, 0};
    if (!o.waypoints.empty()) wo.state.velocity = wo.follower.velocity(wo.state.position);
    w.objects.push_back(wo);
  }
  for (const auto& a : cfg.agents) {
    WorldAgent wa;
    wa.spec = a;
    wa.follower = {a.waypoints, a.speed, 0};
    if (a.mobile()) {
      const Point2 start = a.waypoints.front();
      wa.follower.next = a.waypoints.size() > 1 ? 1 : 0;
      const Point2 ahead = a.waypoints[wa.follower.next] - start;
      const double yaw = ahead.squared_norm() > 0.0 ? std::atan2(ahead.y, ahead.x) : a.pose.yaw();
      wa.pose = Pose2(start, yaw);
    } else {
      wa.pose = a.pose;
    }
    w.agents.push_back(wa);
  }
  return w;
}

/// Advances objects and mobile agents by `dt`.
inline World step_world(World world, double dt)
{
  if (!(dt > 0.0)) throw std::invalid_argument("step_world: dt must be > 0");
  for (auto& o : world.objects) {
    if (o.follower.waypoints.empty()) {
      o.state.position = o.state.position + o.state.velocity * dt;
    } else {
      o.follower.advance(o.state.position, dt, 0.0);
      o.state.velocity = o.follower.velocity(o.state.position);
    }
  }
  for (auto& a : world.agents) {
    if (!a.spec.mobile()) continue;
    Point2 p = a.pose.position();
    const double yaw = a.follower.advance(p, dt, a.pose.yaw());
    a.pose = Pose2(p, yaw);
  }
  world.time += dt;
  return world;
}

namespace detail {

/// Nearest hit distance along the ray from `origin` in direction `dir` (unit), or +inf.
inline double cast_ray(const World& world, const Point2& origin, const Point2& dir, double max_range)
{
  const Point2 end = origin + dir * max_range;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : world.objects) {
    const auto& c = o.state.position;
    const double r = o.state.radius;
    if ((origin - c).squared_norm() <= r * r) continue;  // sensor inside the footprint
    // cheap reject: perpendicular distance from the ray line
    const Point2 oc = c - origin;
    const double along = dot(oc, dir);
    if (along < -r || along > max_range + r) continue;
    if (std::abs(cross(dir, oc)) > r) continue;
    if (auto hit = segment_circle_intersect(origin, end, c, r)) best = std::min(best, distance(origin, *hit));
  }
  for (const auto& wall : world.walls) {
    if (auto t = segment_segment_intersect(origin, end, wall.a, wall.b)) best = std::min(best, *t * max_range);
  }
  return best;
}

}  // namespace detail

/// Planar scan in the agent frame: one return per ray at the nearest disk or wall
/// within range; rays without a hit produce no point.
inline PointCloud2 scan(const WorldAgent& agent, const World& world)
{
  const auto& s = agent.spec.sensor;
  PointCloud2 cloud;
  cloud.reserve(static_cast<std::size_t>(s.n_rays));
  const Point2 origin = agent.pose.position();
  for (int i = 0; i < s.n_rays; ++i) {
    const double az = kTwoPi * i / s.n_rays;
    const double g = agent.pose.yaw() + az;
    const Point2 dir{std::cos(g), std::sin(g)};
    const double range = detail::cast_ray(world, origin, dir, s.max_range);
    if (range <= s.max_range) cloud.push_back({range * std::cos(az), range * std::sin(az)});
  }
  return cloud;
}

/// True when the segment from `from` to `to` is not blocked by a wall or by any object
/// disk other than `exclude_id`.
inline bool line_of_sight(const World& world, const Point2& from, const Point2& to, int exclude_id)
{
  for (const auto& wall : world.walls)
    if (segment_segment_intersect(from, to, wall.a, wall.b)) return false;
  for (const auto& o : world.objects) {
    if (o.state.id == exclude_id) continue;
    const double r = o.state.radius;
    if ((from - o.state.position).squared_norm() <= r * r) continue;
    if (point_segment_distance(o.state.position, from, to) < r) return false;
  }
  return true;
}

/// Ground-truth visibility: object centers in range with unobstructed line of sight.
inline std::set<int> visible_truths(const WorldAgent& agent, const World& world)
{
  std::set<int> ids;
  const Point2 origin = agent.pose.position();
  for (const auto& o : world.objects) {
    if (distance(origin, o.state.position) > agent.spec.sensor.max_range) continue;
    if (line_of_sight(world, origin, o.state.position, o.state.id)) ids.insert(o.state.id);
  }
  return ids;
}

/// Synthetic detector: visible objects survive with probability 1 - p_natural_fn and get
/// Gaussian position noise; Poisson-many spurious returns are placed uniformly inside
/// `fov_local` (agent frame).
template <typename Rng>
std::vector<Detection> generate_detections(const WorldAgent& agent, const World& world,
                                           const FovPolygon& fov_local, Rng& rng)
{
  const auto& s = agent.spec.sensor;
  std::vector<Detection> out;
  std::bernoulli_distribution drop(s.p_natural_fn);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto visible = visible_truths(agent, world);
  for (const auto& o : world.objects) {
    if (!visible.contains(o.state.id)) continue;
    if (drop(rng)) continue;
    Point2 p = to_local(agent.pose, o.state.position);
    if (s.noise_sigma > 0.0) {
      const double nx = noise(rng);
      const double ny = noise(rng);
      p = p + Point2{nx, ny} * s.noise_sigma;
    }
    out.push_back({agent.spec.id, p, world.time});
  }
  if (s.lambda_natural_fp > 0.0) {
    std::poisson_distribution<int> n_fp(s.lambda_natural_fp);
    const int n = n_fp(rng);
    for (int i = 0; i < n; ++i) out.push_back({agent.spec.id, sample_uniform_in(fov_local.polygon, rng), world.time});
  }
  return out;
}

template <typename Rng>
std::vector<Detection> generate_detections(const WorldAgent& agent, const World& world, Rng& rng)
{
  const auto fov = estimate_fov(scan(agent, world), agent.spec.sensor.max_range, kDefaultFovBins, world.time);
  return generate_detections(agent, world, fov, rng);
}

}  // namespace trustfuse
