#include <gtest/gtest.h>

#include <random>

#include "trustfuse/fov.hpp"
#include "trustfuse/world.hpp"

using namespace trustfuse;

namespace {

WorldObject disk(int id, Point2 p, double r = 1.0, Point2 v = {})
{
  WorldObject o;
  o.state = {id, p, v, r};
  return o;
}

WorldAgent agent_at(Point2 p, double yaw = 0.0, double max_range = 20.0)
{
  WorldAgent a;
  a.spec.sensor.max_range = max_range;
  a.pose = Pose2(p, yaw);
  a.spec.pose = a.pose;
  return a;
}

SensorSpec exact_sensor()
{
  SensorSpec s;
  s.noise_sigma = 0.0;
  s.p_natural_fn = 0.0;
  s.lambda_natural_fp = 0.0;
  return s;
}

}  // namespace

TEST(StepWorld, ConstantVelocity)
{
  World w;
  w.objects = {disk(0, {0, 0}, 1.0, {1, 0}), disk(1, {3, 3})};
  w = step_world(w, 0.1);
  EXPECT_NEAR(w.objects[0].state.position.x, 0.1, 1e-12);
  EXPECT_NEAR(w.objects[0].state.position.y, 0.0, 1e-12);
  EXPECT_EQ(w.objects[1].state.position.x, 3.0);
  EXPECT_EQ(w.objects[1].state.position.y, 3.0);
  EXPECT_NEAR(w.time, 0.1, 1e-12);
  EXPECT_THROW(step_world(w, 0.0), std::invalid_argument);
}

TEST(StepWorld, WaypointAgentTurnsAtCorner)
{
  ScenarioConfig cfg;
  AgentSpec a;
  a.waypoints = {{0, 0}, {1, 0}, {1, 1}};
  a.speed = 1.0;
  cfg.agents = {a};
  World w = make_world(cfg);
  EXPECT_NEAR(w.agents[0].pose.yaw(), 0.0, 1e-12);
  // Hand-stepped reference: 0.6 m east, then corner at (1,0) with 0.4 m left over heading north.
  w = step_world(w, 0.6);
  EXPECT_NEAR(w.agents[0].pose.x(), 0.6, 1e-12);
  w = step_world(w, 0.8);
  EXPECT_NEAR(w.agents[0].pose.x(), 1.0, 1e-12);
  EXPECT_NEAR(w.agents[0].pose.y(), 0.4, 1e-12);
  EXPECT_NEAR(w.agents[0].pose.yaw(), kPi / 2, 1e-12);
}

TEST(StepWorld, WaypointObjectKeepsSpeed)
{
  ScenarioConfig cfg;
  ObjectSpec o;
  o.initial = {0, {0, 0}, {}, 1.0};
  o.waypoints = {{5, 0}, {5, 5}, {0, 5}, {0, 0}};
  o.speed = 2.0;
  cfg.objects = {o};
  World w = make_world(cfg);
  for (int i = 0; i < 37; ++i) {
    const Point2 before = w.objects[0].state.position;
    w = step_world(w, 0.1);
    const double moved = distance(before, w.objects[0].state.position);
    // Corner cutting only ever shortens the straight-line displacement.
    EXPECT_LE(moved, 0.2 + 1e-12);
    EXPECT_NEAR(w.objects[0].state.velocity.norm(), 2.0, 1e-9);
  }
}

TEST(Scan, EmptyWorldHasNoReturns)
{
  EXPECT_TRUE(scan(agent_at({0, 0}), World{}).empty());
}

TEST(Scan, DiskOnAxisHitsNearArc)
{
  World w;
  w.objects = {disk(0, {5, 0})};
  const auto cloud = scan(agent_at({0, 0}), w);
  ASSERT_FALSE(cloud.empty());
  double min_r = 1e9;
  for (const auto& p : cloud) {
    min_r = std::min(min_r, p.norm());
    EXPECT_LE(p.x, 5.0 + 1e-9);
    EXPECT_NEAR(distance(p, {5, 0}), 1.0, 1e-9);
  }
  EXPECT_NEAR(min_r, 4.0, 1e-9);
}

TEST(Scan, DiskBehindWallReturnsNothingFromDisk)
{
  World w;
  w.walls = {{{3, -5}, {3, 5}}};
  w.objects = {disk(0, {8, 0})};
  for (const auto& p : scan(agent_at({0, 0}), w)) EXPECT_GT(distance(p, {8, 0}), 1.0 + 1e-9);
}

TEST(Scan, NoReturnBeyondFirstBlockingSurface)
{
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-15, 15);
  World w;
  for (int i = 0; i < 10; ++i) w.objects.push_back(disk(i, {u(rng), u(rng)}, 0.8));
  w.walls = {{{-10, 12}, {10, 12}}};
  const auto a = agent_at({0.0, -14.0}, 0.3);
  for (const auto& p : scan(a, w)) {
    const Point2 g = to_global(a.pose, p);
    // Pull the hit point slightly toward the sensor: nothing may block that shortened ray.
    const Point2 short_end = a.pose.position() + (g - a.pose.position()) * (1.0 - 1e-6);
    EXPECT_TRUE(line_of_sight(w, a.pose.position(), short_end, -1));
  }
}

TEST(VisibleTruths, Examples)
{
  const auto a = agent_at({0, 0}, 0.0, 20.0);
  EXPECT_TRUE(visible_truths(a, World{}).empty());
  World w;
  w.objects = {disk(3, {10, 0})};
  EXPECT_EQ(visible_truths(a, w), std::set<int>{3});
  w.objects = {disk(3, {20.0 + 1e-6, 0})};
  EXPECT_TRUE(visible_truths(a, w).empty());
}

TEST(GenerateDetections, ExactWhenNoiseless)
{
  World w;
  w.objects = {disk(0, {10, 5}), disk(1, {-4, 2}), disk(2, {30, 30})};
  auto a = agent_at({1, 1}, 0.7, 20.0);
  a.spec.sensor = exact_sensor();
  a.spec.sensor.max_range = 20.0;
  std::mt19937_64 rng(1);
  const auto dets = generate_detections(a, w, rng);
  const auto vis = visible_truths(a, w);
  ASSERT_EQ(dets.size(), vis.size());
  std::size_t i = 0;
  for (const auto& o : w.objects) {
    if (!vis.contains(o.state.id)) continue;
    const Point2 want = to_local(a.pose, o.state.position);
    EXPECT_EQ(dets[i].position.x, want.x);
    EXPECT_EQ(dets[i].position.y, want.y);
    ++i;
  }
}

TEST(GenerateDetections, OccludedObjectNotDetected)
{
  World w;
  w.objects = {disk(0, {4, 0}, 1.0), disk(1, {9, 0}, 1.0)};
  auto a = agent_at({0, 0});
  a.spec.sensor = exact_sensor();
  std::mt19937_64 rng(1);
  const auto dets = generate_detections(a, w, rng);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_NEAR(dets[0].position.x, 4.0, 1e-12);
  EXPECT_FALSE(line_of_sight(w, {0, 0}, {9, 0}, 1));
}

TEST(GenerateDetections, PoissonFalsePositiveRate)
{
  World w;
  auto a = agent_at({0, 0});
  a.spec.sensor = exact_sensor();
  a.spec.sensor.lambda_natural_fp = 0.5;
  const auto fov = estimate_fov({}, a.spec.sensor.max_range, 72);
  std::mt19937_64 rng(8);
  long total = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto dets = generate_detections(a, w, fov, rng);
    for (const auto& d : dets) ASSERT_TRUE(contains(fov.polygon, d.position));
    total += static_cast<long>(dets.size());
  }
  EXPECT_NEAR(total / 10000.0, 0.5, 0.02);
}

TEST(GenerateDetections, DeterministicForSameSeed)
{
  World w;
  w.objects = {disk(0, {6, 1}), disk(1, {-3, 7})};
  const auto a = agent_at({0, 0});
  std::mt19937_64 r1(77), r2(77);
  const auto fov = estimate_fov(scan(a, w), 20.0, 72);
  const auto d1 = generate_detections(a, w, fov, r1);
  const auto d2 = generate_detections(a, w, fov, r2);
  ASSERT_EQ(d1.size(), d2.size());
  for (std::size_t i = 0; i < d1.size(); ++i) {
    EXPECT_EQ(d1[i].position.x, d2[i].position.x);
    EXPECT_EQ(d1[i].position.y, d2[i].position.y);
  }
}
