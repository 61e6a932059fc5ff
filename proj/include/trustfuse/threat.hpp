#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "trustfuse/fov.hpp"
#include "trustfuse/geometry.hpp"
#include "trustfuse/world.hpp"

namespace trustfuse {

enum class Manifest { FalsePositive, FalseNegative, Translation };
enum class Temporal { Static, Markovian, Trajectory };

inline constexpr double kAttackAssociationRadius = 2.0;

/// Waypoint offsets relative to each phantom's seeded start, traversed cyclically.
/// Empty waypoints mean a 10 m shuttle along a heading drawn at attack start.
struct AttackTrajectory
{
  std::vector<Point2> waypoints;
  double speed = 3.0;
};

/// Adversary applied to one agent's detection stream.
///  - FalsePositive: n_fp phantom detections. Static holds them fixed, Markovian
///    random-walks them, Trajectory moves them along `trajectory` at its speed.
///  - FalseNegative: removes detections of n_fn true objects chosen once at attack start.
///    The temporal characteristic is ignored; Trajectory is rejected.
///  - Translation: shifts detections of n_fn targeted objects by an offset of length
///    translation_dist with a direction drawn once. Markovian random-walks the offset;
///    Trajectory grows it from zero at `trajectory.speed` until translation_dist.
struct ThreatConfig
{
  int target_agent_id = 0;
  Manifest manifest = Manifest::FalsePositive;
  Temporal temporal = Temporal::Static;
  int n_fp = 1;
  int n_fn = 1;
  double translation_dist = 5.0;
  double start_time = 2.0;
  double markov_step_sigma = 0.1;
  AttackTrajectory trajectory;
  std::uint64_t rng_seed = 0;

  void validate() const
  {
    auto fail = [](const std::string& what) { throw std::invalid_argument("ThreatConfig: " + what); };
    if (n_fp < 0 || n_fn < 0) fail("counts must be >= 0");
    if (!std::isfinite(translation_dist)) fail("translation_dist must be finite");
    if (!(start_time >= 0.0)) fail("start_time must be >= 0");
    if (!(markov_step_sigma >= 0.0)) fail("markov_step_sigma must be >= 0");
    if (!(trajectory.speed >= 0.0)) fail("trajectory speed must be >= 0");
    if (manifest == Manifest::FalseNegative && temporal == Temporal::Trajectory)
      fail("FalseNegative x Trajectory is undefined (false-negative targets are objects, not paths)");
  }
};

/// Mutable per-run adversary state, owned by the scenario run.
struct AttackState
{
  std::mt19937_64 rng;
  bool started = false;
  double last_time = 0.0;
  std::vector<Point2> phantoms;  // global frame
  std::vector<WaypointFollower> phantom_paths;
  std::vector<int> targets;
  double heading = 0.0;
  double offset_length = 0.0;
  Point2 offset;  // global frame

  /// Whether the attack has started and actually manipulates something.
  bool effective() const { return started && (!phantoms.empty() || !targets.empty()); }
};

inline AttackState make_attack_state(const ThreatConfig& cfg)
{
  AttackState s;
  s.rng.seed(cfg.rng_seed);
  return s;
}

/// What the adversary can see of the frame it manipulates.
struct AttackContext
{
  Pose2 pose;
  FovPolygon fov_local;
  std::vector<std::pair<int, Point2>> visible_truths;  // (object id, agent-frame position)
};

namespace detail {

inline void start_attack(const ThreatConfig& cfg, const AttackContext& ctx, AttackState& s)
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  s.started = true;
  s.heading = kTwoPi * unit(s.rng);
  if (cfg.manifest == Manifest::FalsePositive) {
    for (int i = 0; i < cfg.n_fp; ++i) {
      const Point2 start = to_global(ctx.pose, sample_uniform_in(ctx.fov_local.polygon, s.rng));
      s.phantoms.push_back(start);
      if (cfg.temporal == Temporal::Trajectory) {
        WaypointFollower f;
        f.speed = cfg.trajectory.speed;
        if (cfg.trajectory.waypoints.empty()) {
          const double h = kTwoPi * unit(s.rng);
          f.waypoints = {start + Point2{std::cos(h), std::sin(h)} * 10.0, start};
        } else {
          for (const auto& w : cfg.trajectory.waypoints) f.waypoints.push_back(start + w);
        }
        s.phantom_paths.push_back(f);
      }
    }
  } else {
    s.offset_length = cfg.temporal == Temporal::Trajectory ? 0.0 : cfg.translation_dist;
    s.offset = Point2{std::cos(s.heading), std::sin(s.heading)} * s.offset_length;
  }
}

inline void choose_targets(const ThreatConfig& cfg, const AttackContext& ctx, AttackState& s)
{
  if (!s.targets.empty() || ctx.visible_truths.empty() || cfg.n_fn == 0) return;
  std::vector<int> ids;
  for (const auto& [id, p] : ctx.visible_truths) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  std::shuffle(ids.begin(), ids.end(), s.rng);
  ids.resize(std::min<std::size_t>(ids.size(), static_cast<std::size_t>(cfg.n_fn)));
  std::sort(ids.begin(), ids.end());
  s.targets = ids;
}

inline void evolve(const ThreatConfig& cfg, AttackState& s, double dt)
{
  if (dt <= 0.0) return;
  if (cfg.manifest == Manifest::FalsePositive) {
    if (cfg.temporal == Temporal::Markovian && cfg.markov_step_sigma > 0.0) {
      std::normal_distribution<double> step(0.0, cfg.markov_step_sigma);
      for (auto& p : s.phantoms) {
        const double dx = step(s.rng);
        const double dy = step(s.rng);
        p = p + Point2{dx, dy};
      }
    } else if (cfg.temporal == Temporal::Trajectory) {
      for (std::size_t i = 0; i < s.phantoms.size(); ++i) s.phantom_paths[i].advance(s.phantoms[i], dt, 0.0);
    }
  } else if (cfg.manifest == Manifest::Translation) {
    if (cfg.temporal == Temporal::Markovian && cfg.markov_step_sigma > 0.0) {
      std::normal_distribution<double> step(0.0, cfg.markov_step_sigma);
      const double dx = step(s.rng);
      const double dy = step(s.rng);
      s.offset = s.offset + Point2{dx, dy};
    } else if (cfg.temporal == Temporal::Trajectory) {
      s.offset_length = std::min(std::abs(cfg.translation_dist), s.offset_length + cfg.trajectory.speed * dt);
      const double sign = cfg.translation_dist < 0.0 ? -1.0 : 1.0;
      s.offset = Point2{std::cos(s.heading), std::sin(s.heading)} * (sign * s.offset_length);
    }
  }
}

/// Index of the detection nearest to `p` within the association radius, or -1.
inline int nearest_detection(const std::vector<Detection>& dets, const Point2& p)
{
  int best = -1;
  double best_d = kAttackAssociationRadius;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const double d = distance(dets[i].position, p);
    if (d <= best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace detail

/// Applies the adversary to one frame of detections at time `t`. Frames before
/// `start_time` pass through unchanged and leave the state untouched.
inline std::vector<Detection> apply_attack(const ThreatConfig& cfg, std::vector<Detection> detections,
                                           const AttackContext& ctx, double t, AttackState& s)
{
  if (!(t >= 0.0)) throw std::invalid_argument("apply_attack: t must be >= 0");
  if (t < cfg.start_time) return detections;
  if (!s.started) {
    detail::start_attack(cfg, ctx, s);
  } else {
    detail::evolve(cfg, s, t - s.last_time);
  }
  s.last_time = t;

  switch (cfg.manifest) {
    case Manifest::FalsePositive:
      for (const auto& p : s.phantoms) detections.push_back({cfg.target_agent_id, to_local(ctx.pose, p), t});
      break;
    case Manifest::FalseNegative:
    case Manifest::Translation: {
      detail::choose_targets(cfg, ctx, s);
      const Point2 offset_local = rotate(s.offset, -ctx.pose.yaw());
      std::vector<int> to_remove;
      for (int id : s.targets) {
        const auto it = std::find_if(ctx.visible_truths.begin(), ctx.visible_truths.end(),
                                     [&](const auto& v) { return v.first == id; });
        if (it == ctx.visible_truths.end()) continue;
        const int k = detail::nearest_detection(detections, it->second);
        if (k < 0) continue;
        if (cfg.manifest == Manifest::FalseNegative)
          to_remove.push_back(k);
        else
          detections[static_cast<std::size_t>(k)].position = detections[static_cast<std::size_t>(k)].position + offset_local;
      }
      std::sort(to_remove.rbegin(), to_remove.rend());
      to_remove.erase(std::unique(to_remove.begin(), to_remove.end()), to_remove.end());
      for (int k : to_remove) detections.erase(detections.begin() + k);
      break;
    }
  }
  return detections;
}

/// Monte Carlo adversary parameters: Poisson counts, Gaussian distance and start time,
/// uniform choice of attacked agent, scene and attack type.
struct McAttackSampler
{
  double lambda_fp = 2.0;
  double lambda_fn = 2.0;
  double mu_d = 5.0;
  double sigma_d = 2.0;
  double mu_t = 2.0;
  double sigma_t = 0.5;
  std::vector<int> agent_choices{0, 1, 2, 3};
  std::vector<std::string> scene_choices{"case0", "case1", "case2"};
  std::vector<std::pair<Manifest, Temporal>> attack_choices{
      {Manifest::FalsePositive, Temporal::Static},
      {Manifest::FalsePositive, Temporal::Markovian},
      {Manifest::FalsePositive, Temporal::Trajectory},
      {Manifest::FalseNegative, Temporal::Static},
      {Manifest::Translation, Temporal::Static},
  };

  void validate() const
  {
    auto fail = [](const std::string& what) { throw std::invalid_argument("McAttackSampler: " + what); };
    if (!(lambda_fp > 0.0) || !(lambda_fn > 0.0)) fail("rates must be > 0");
    if (!(sigma_d >= 0.0) || !(sigma_t >= 0.0)) fail("sigmas must be >= 0");
    if (agent_choices.empty()) fail("agent_choices must not be empty");
    if (scene_choices.empty()) fail("scene_choices must not be empty");
    if (attack_choices.empty()) fail("attack_choices must not be empty");
  }
};

namespace detail {
template <typename Rng>
double normal_or_mean(double mu, double sigma, Rng& rng)
{
  if (sigma <= 0.0) return mu;
  return std::normal_distribution<double>(mu, sigma)(rng);
}

template <typename T, typename Rng>
const T& choose(const std::vector<T>& v, Rng& rng)
{
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
  return v[pick(rng)];
}
}  // namespace detail

template <typename Rng>
ThreatConfig sample_attack(const McAttackSampler& s, Rng& rng)
{
  ThreatConfig c;
  c.target_agent_id = detail::choose(s.agent_choices, rng);
  const auto& kind = detail::choose(s.attack_choices, rng);
  c.manifest = kind.first;
  c.temporal = kind.second;
  c.n_fp = std::poisson_distribution<int>(s.lambda_fp)(rng);
  c.n_fn = std::poisson_distribution<int>(s.lambda_fn)(rng);
  c.translation_dist = detail::normal_or_mean(s.mu_d, s.sigma_d, rng);
  c.start_time = std::max(0.0, detail::normal_or_mean(s.mu_t, s.sigma_t, rng));
  c.rng_seed = rng();
  return c;
}

inline std::string to_string(Manifest m)
{
  switch (m) {
    case Manifest::FalsePositive: return "FalsePositive";
    case Manifest::FalseNegative: return "FalseNegative";
    case Manifest::Translation: return "Translation";
  }
  return "?";
}

inline std::string to_string(Temporal t)
{
  switch (t) {
    case Temporal::Static: return "Static";
    case Temporal::Markovian: return "Markovian";
    case Temporal::Trajectory: return "Trajectory";
  }
  return "?";
}

}  // namespace trustfuse
