#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trustfuse/harness.hpp"
#include "trustfuse/scenarios.hpp"
#include "trustfuse/threat.hpp"
#include "trustfuse/trust.hpp"
#include "trustfuse/world.hpp"

namespace trustfuse {

using json = nlohmann::json;

/// Invalid configuration; what() starts with the offending field path.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(const std::string& path, const std::string& msg)
      : std::runtime_error((path.empty() ? "<root>" : path) + ": " + msg), path_(path), message_(msg)
  {
  }
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

private:
  std::string path_;
  std::string message_;
};

namespace cfg {

/// Object cursor that remembers its path and rejects keys nobody asked for.
class Node
{
public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const
  {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) const
  {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(child(key), "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) const { return has(key) ? as_number(at(key), child(key)) : fallback; }
  double number(const std::string& key) const { return as_number(at(key), child(key)); }
  int integer(const std::string& key, int fallback) const { return has(key) ? as_int(at(key), child(key)) : fallback; }
  int integer(const std::string& key) const { return as_int(at(key), child(key)); }
  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const
  {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ConfigError(child(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::string string(const std::string& key, const std::string& fallback) const
  {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(child(key), "expected a string");
    return v.get<std::string>();
  }

  void check_no_unknown() const
  {
    for (const auto& [k, v] : j_.items())
      if (!seen_.contains(k)) throw ConfigError(child(k), "unknown field");
  }

  static double as_number(const json& v, const std::string& path)
  {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "expected a finite number");
    return d;
  }
  static int as_int(const json& v, const std::string& path)
  {
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    return v.get<int>();
  }

private:
  const json& j_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

inline std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline Point2 point(const json& v, const std::string& path)
{
  if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected [x, y]");
  return {Node::as_number(v[0], index_path(path, 0)), Node::as_number(v[1], index_path(path, 1))};
}

inline std::vector<Point2> points(const json& v, const std::string& path)
{
  if (!v.is_array()) throw ConfigError(path, "expected an array of [x, y]");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(point(v[i], index_path(path, i)));
  return out;
}

inline json to_json(const Point2& p) { return json::array({p.x, p.y}); }

inline json to_json(const std::vector<Point2>& ps)
{
  json a = json::array();
  for (const auto& p : ps) a.push_back(to_json(p));
  return a;
}

/// Rethrows validate() failures as ConfigError at `path`.
template <typename T>
void validated(const T& value, const std::string& path)
{
  try {
    value.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace cfg

// ---------------------------------------------------------------------------------------
// Enum names

inline Manifest parse_manifest(const std::string& s, const std::string& path)
{
  if (s == "FalsePositive" || s == "FP") return Manifest::FalsePositive;
  if (s == "FalseNegative" || s == "FN") return Manifest::FalseNegative;
  if (s == "Translation") return Manifest::Translation;
  throw ConfigError(path, "unknown manifest '" + s + "' (FalsePositive, FalseNegative, Translation)");
}

inline Temporal parse_temporal(const std::string& s, const std::string& path)
{
  if (s == "Static") return Temporal::Static;
  if (s == "Markovian" || s == "Markov") return Temporal::Markovian;
  if (s == "Trajectory") return Temporal::Trajectory;
  throw ConfigError(path, "unknown temporal characteristic '" + s + "' (Static, Markovian, Trajectory)");
}

inline Mode parse_mode(const std::string& s, const std::string& path = "mode")
{
  if (s == "NoSecurity") return Mode::NoSecurity;
  if (s == "SecurityAware") return Mode::SecurityAware;
  throw ConfigError(path, "unknown mode '" + s + "' (NoSecurity, SecurityAware)");
}

// ---------------------------------------------------------------------------------------
// Scenario

inline SensorSpec sensor_from_json(const json& j, const std::string& path)
{
  cfg::Node n(j, path);
  SensorSpec s;
  s.max_range = n.number("max_range", s.max_range);
  s.n_rays = n.integer("n_rays", s.n_rays);
  s.noise_sigma = n.number("noise_sigma", s.noise_sigma);
  s.p_natural_fn = n.number("p_natural_fn", s.p_natural_fn);
  s.lambda_natural_fp = n.number("lambda_natural_fp", s.lambda_natural_fp);
  n.check_no_unknown();
  if (!(s.max_range > 0.0)) throw ConfigError(n.child("max_range"), "must be > 0");
  if (s.n_rays < 8) throw ConfigError(n.child("n_rays"), "must be >= 8");
  if (!(s.noise_sigma >= 0.0)) throw ConfigError(n.child("noise_sigma"), "must be >= 0");
  if (!(s.p_natural_fn >= 0.0 && s.p_natural_fn <= 1.0)) throw ConfigError(n.child("p_natural_fn"), "must be in [0, 1]");
  if (!(s.lambda_natural_fp >= 0.0)) throw ConfigError(n.child("lambda_natural_fp"), "must be >= 0");
  return s;
}

inline ScenarioConfig scenario_from_json(const json& j, const std::string& path = "")
{
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (!scenarios::is_builtin(name)) throw ConfigError(path, "unknown built-in scenario '" + name + "'");
    return scenarios::builtin(name);
  }
  cfg::Node n(j, path);
  ScenarioConfig s;
  if (n.has("builtin")) {
    const auto name = n.string("builtin", "");
    if (!scenarios::is_builtin(name)) throw ConfigError(n.child("builtin"), "unknown built-in scenario '" + name + "'");
    s = scenarios::builtin(name);
  }
  s.name = n.string("name", s.name);
  s.duration = n.number("duration", s.duration);
  s.dt = n.number("dt", s.dt);
  s.rng_seed = n.seed("rng_seed", s.rng_seed);
  s.fov_bins = n.integer("fov_bins", s.fov_bins);
  if (!(s.dt > 0.0)) throw ConfigError(n.child("dt"), "must be > 0");
  if (!(s.duration >= s.dt)) throw ConfigError(n.child("duration"), "must be >= dt");
  if (s.fov_bins < 8) throw ConfigError(n.child("fov_bins"), "must be >= 8");

  if (n.has("walls")) {
    const auto& w = n.at("walls");
    const auto wp = n.child("walls");
    if (!w.is_array()) throw ConfigError(wp, "expected an array of [x1, y1, x2, y2]");
    s.walls.clear();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto p = cfg::index_path(wp, i);
      if (!w[i].is_array() || w[i].size() != 4) throw ConfigError(p, "expected [x1, y1, x2, y2]");
      double v[4];
      for (std::size_t k = 0; k < 4; ++k) v[k] = cfg::Node::as_number(w[i][k], cfg::index_path(p, k));
      s.walls.push_back({{v[0], v[1]}, {v[2], v[3]}});
    }
  }

  if (n.has("objects")) {
    const auto& objs = n.at("objects");
    const auto op = n.child("objects");
    if (!objs.is_array()) throw ConfigError(op, "expected an array");
    s.objects.clear();
    std::set<int> ids;
    for (std::size_t i = 0; i < objs.size(); ++i) {
      cfg::Node o(objs[i], cfg::index_path(op, i));
      ObjectSpec spec;
      spec.initial.id = o.integer("id", static_cast<int>(i));
      spec.initial.position = cfg::point(o.at("position"), o.child("position"));
      if (o.has("velocity")) spec.initial.velocity = cfg::point(o.at("velocity"), o.child("velocity"));
      spec.initial.radius = o.number("radius", spec.initial.radius);
      if (o.has("waypoints")) spec.waypoints = cfg::points(o.at("waypoints"), o.child("waypoints"));
      spec.speed = o.number("speed", spec.speed);
      o.check_no_unknown();
      if (!(spec.initial.radius > 0.0)) throw ConfigError(o.child("radius"), "must be > 0");
      if (!(spec.speed >= 0.0)) throw ConfigError(o.child("speed"), "must be >= 0");
      if (!ids.insert(spec.initial.id).second) throw ConfigError(o.child("id"), "duplicate object id");
      s.objects.push_back(spec);
    }
  }

  if (n.has("agents")) {
    const auto& ags = n.at("agents");
    const auto ap = n.child("agents");
    if (!ags.is_array()) throw ConfigError(ap, "expected an array");
    s.agents.clear();
    std::set<int> ids;
    for (std::size_t i = 0; i < ags.size(); ++i) {
      cfg::Node a(ags[i], cfg::index_path(ap, i));
      AgentSpec spec;
      spec.id = a.integer("id", static_cast<int>(i));
      if (a.has("pose")) {
        const auto& p = a.at("pose");
        const auto pp = a.child("pose");
        if (!p.is_array() || p.size() != 3) throw ConfigError(pp, "expected [x, y, yaw]");
        spec.pose = Pose2(cfg::Node::as_number(p[0], cfg::index_path(pp, 0)),
                          cfg::Node::as_number(p[1], cfg::index_path(pp, 1)),
                          cfg::Node::as_number(p[2], cfg::index_path(pp, 2)));
      }
      if (a.has("waypoints")) spec.waypoints = cfg::points(a.at("waypoints"), a.child("waypoints"));
      spec.speed = a.number("speed", spec.speed);
      if (a.has("sensor")) spec.sensor = sensor_from_json(a.at("sensor"), a.child("sensor"));
      a.check_no_unknown();
      if (!a.has("pose") && !spec.mobile()) throw ConfigError(a.child("pose"), "static agents need a pose");
      if (spec.mobile() && spec.waypoints.size() < 2) throw ConfigError(a.child("waypoints"), "mobile agents need >= 2 waypoints");
      if (spec.mobile() && !(spec.speed > 0.0)) throw ConfigError(a.child("speed"), "mobile agents need speed > 0");
      if (!ids.insert(spec.id).second) throw ConfigError(a.child("id"), "duplicate agent id");
      s.agents.push_back(spec);
    }
  }
  n.check_no_unknown();
  if (s.agents.empty()) throw ConfigError(n.child("agents"), "at least one agent is required");
  return s;
}

inline json to_json(const ScenarioConfig& s)
{
  json j;
  j["name"] = s.name;
  j["duration"] = s.duration;
  j["dt"] = s.dt;
  j["rng_seed"] = s.rng_seed;
  j["fov_bins"] = s.fov_bins;
  j["walls"] = json::array();
  for (const auto& w : s.walls) j["walls"].push_back({w.a.x, w.a.y, w.b.x, w.b.y});
  j["objects"] = json::array();
  for (const auto& o : s.objects) {
    json oj{{"id", o.initial.id},
            {"position", cfg::to_json(o.initial.position)},
            {"velocity", cfg::to_json(o.initial.velocity)},
            {"radius", o.initial.radius}};
    if (!o.waypoints.empty()) {
      oj["waypoints"] = cfg::to_json(o.waypoints);
      oj["speed"] = o.speed;
    }
    j["objects"].push_back(oj);
  }
  j["agents"] = json::array();
  for (const auto& a : s.agents) {
    json aj{{"id", a.id}, {"pose", {a.pose.x(), a.pose.y(), a.pose.yaw()}}};
    if (a.mobile()) {
      aj["waypoints"] = cfg::to_json(a.waypoints);
      aj["speed"] = a.speed;
    }
    aj["sensor"] = {{"max_range", a.sensor.max_range},
                    {"n_rays", a.sensor.n_rays},
                    {"noise_sigma", a.sensor.noise_sigma},
                    {"p_natural_fn", a.sensor.p_natural_fn},
                    {"lambda_natural_fp", a.sensor.lambda_natural_fp}};
    j["agents"].push_back(aj);
  }
  return j;
}

// ---------------------------------------------------------------------------------------
// Threats

inline ThreatConfig threat_from_json(const json& j, const std::string& path = "")
{
  cfg::Node n(j, path);
  ThreatConfig t;
  t.target_agent_id = n.integer("target_agent_id");
  t.manifest = parse_manifest(n.string("manifest", "FalsePositive"), n.child("manifest"));
  t.temporal = parse_temporal(n.string("temporal", "Static"), n.child("temporal"));
  t.n_fp = n.integer("n_fp", t.n_fp);
  t.n_fn = n.integer("n_fn", t.n_fn);
  t.translation_dist = n.number("translation_dist", t.translation_dist);
  t.start_time = n.number("start_time", t.start_time);
  t.markov_step_sigma = n.number("markov_step_sigma", t.markov_step_sigma);
  t.rng_seed = n.seed("rng_seed", t.rng_seed);
  if (n.has("trajectory")) {
    cfg::Node tr(n.at("trajectory"), n.child("trajectory"));
    if (tr.has("waypoints")) t.trajectory.waypoints = cfg::points(tr.at("waypoints"), tr.child("waypoints"));
    t.trajectory.speed = tr.number("speed", t.trajectory.speed);
    tr.check_no_unknown();
  }
  n.check_no_unknown();
  cfg::validated(t, path);
  return t;
}

/// A single threat object, an array of them, or null for a benign run.
inline std::vector<ThreatConfig> threats_from_json(const json& j, const std::string& path = "")
{
  if (j.is_null()) return {};
  if (j.is_object()) return {threat_from_json(j, path)};
  if (!j.is_array()) throw ConfigError(path, "expected a threat object or an array of them");
  std::vector<ThreatConfig> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(threat_from_json(j[i], cfg::index_path(path, i)));
  return out;
}

inline json to_json(const ThreatConfig& t)
{
  json j{{"target_agent_id", t.target_agent_id},
         {"manifest", to_string(t.manifest)},
         {"temporal", to_string(t.temporal)},
         {"n_fp", t.n_fp},
         {"n_fn", t.n_fn},
         {"translation_dist", t.translation_dist},
         {"start_time", t.start_time},
         {"markov_step_sigma", t.markov_step_sigma},
         {"rng_seed", t.rng_seed}};
  j["trajectory"] = {{"waypoints", cfg::to_json(t.trajectory.waypoints)}, {"speed", t.trajectory.speed}};
  return j;
}

// ---------------------------------------------------------------------------------------
// Trust configuration

inline PropagatorStep propagator_from_json(const json& j, const std::string& path)
{
  cfg::Node n(j, path);
  const auto kind = n.string("kind", "");
  PropagatorStep s;
  if (kind == "prior") {
    s = PropagatorStep::prior(n.number("omega"));
  } else if (kind == "expectation") {
    s = PropagatorStep::expectation(n.number("delta"), n.number("target"));
  } else if (kind == "variance") {
    s = PropagatorStep::variance(n.number("delta"), n.number("target"));
  } else {
    throw ConfigError(n.child("kind"), "expected one of prior, expectation, variance");
  }
  n.check_no_unknown();
  return s;
}

inline TrustConfig trust_from_json(const json& j, const std::string& path = "")
{
  cfg::Node n(j, path);
  TrustConfig t;
  t.agent_prior_alpha = n.number("agent_prior_alpha", t.agent_prior_alpha);
  t.agent_prior_beta = n.number("agent_prior_beta", t.agent_prior_beta);
  t.track_prior_alpha = n.number("track_prior_alpha", t.track_prior_alpha);
  t.track_prior_beta = n.number("track_prior_beta", t.track_prior_beta);
  t.agent_negativity_bias = n.number("agent_negativity_bias", t.agent_negativity_bias);
  t.agent_negativity_threshold = n.number("agent_negativity_threshold", t.agent_negativity_threshold);
  t.track_negativity_bias = n.number("track_negativity_bias", t.track_negativity_bias);
  t.track_negativity_threshold = n.number("track_negativity_threshold", t.track_negativity_threshold);
  t.t_ignore = n.number("t_ignore", t.t_ignore);
  t.gamma = n.number("gamma", t.gamma);
  t.gate = n.number("gate", t.gate);
  t.fov_margin = n.number("fov_margin", t.fov_margin);
  if (n.has("propagation")) {
    const auto& p = n.at("propagation");
    const auto pp = n.child("propagation");
    if (!p.is_array()) throw ConfigError(pp, "expected an array of propagator stages");
    t.propagation.clear();
    for (std::size_t i = 0; i < p.size(); ++i) t.propagation.push_back(propagator_from_json(p[i], cfg::index_path(pp, i)));
  }
  n.check_no_unknown();
  if (!(t.gate > 0.0)) throw ConfigError(n.child("gate"), "must be > 0");
  if (!(t.fov_margin >= 0.0)) throw ConfigError(n.child("fov_margin"), "must be >= 0");
  cfg::validated(t, path);
  return t;
}

inline json to_json(const PropagatorStep& s)
{
  switch (s.kind) {
    case PropagatorStep::Kind::Prior: return {{"kind", "prior"}, {"omega", s.omega}};
    case PropagatorStep::Kind::Expectation: return {{"kind", "expectation"}, {"delta", s.delta}, {"target", s.target}};
    case PropagatorStep::Kind::Variance: return {{"kind", "variance"}, {"delta", s.delta}, {"target", s.target}};
  }
  return {};
}

inline json to_json(const TrustConfig& t)
{
  json j{{"agent_prior_alpha", t.agent_prior_alpha},
         {"agent_prior_beta", t.agent_prior_beta},
         {"track_prior_alpha", t.track_prior_alpha},
         {"track_prior_beta", t.track_prior_beta},
         {"agent_negativity_bias", t.agent_negativity_bias},
         {"agent_negativity_threshold", t.agent_negativity_threshold},
         {"track_negativity_bias", t.track_negativity_bias},
         {"track_negativity_threshold", t.track_negativity_threshold},
         {"t_ignore", t.t_ignore},
         {"gamma", t.gamma},
         {"gate", t.gate},
         {"fov_margin", t.fov_margin}};
  j["propagation"] = json::array();
  for (const auto& s : t.propagation) j["propagation"].push_back(to_json(s));
  return j;
}

// ---------------------------------------------------------------------------------------
// Monte Carlo samplers

inline McAttackSampler mc_attack_from_json(const json& j, const std::string& path = "mc_attack")
{
  cfg::Node n(j, path);
  McAttackSampler s;
  s.lambda_fp = n.number("lambda_fp", s.lambda_fp);
  s.lambda_fn = n.number("lambda_fn", s.lambda_fn);
  s.mu_d = n.number("mu_d", s.mu_d);
  s.sigma_d = n.number("sigma_d", s.sigma_d);
  s.mu_t = n.number("mu_t", s.mu_t);
  s.sigma_t = n.number("sigma_t", s.sigma_t);
  if (n.has("agent_choices")) {
    const auto& a = n.at("agent_choices");
    if (!a.is_array()) throw ConfigError(n.child("agent_choices"), "expected an array of agent ids");
    s.agent_choices.clear();
    for (std::size_t i = 0; i < a.size(); ++i)
      s.agent_choices.push_back(cfg::Node::as_int(a[i], cfg::index_path(n.child("agent_choices"), i)));
  }
  if (n.has("scene_choices")) {
    const auto& a = n.at("scene_choices");
    if (!a.is_array()) throw ConfigError(n.child("scene_choices"), "expected an array of scenario names");
    s.scene_choices.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_string()) throw ConfigError(cfg::index_path(n.child("scene_choices"), i), "expected a string");
      s.scene_choices.push_back(a[i].get<std::string>());
    }
  }
  if (n.has("attack_choices")) {
    const auto& a = n.at("attack_choices");
    const auto ap = n.child("attack_choices");
    if (!a.is_array()) throw ConfigError(ap, "expected an array of [manifest, temporal]");
    s.attack_choices.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto p = cfg::index_path(ap, i);
      if (!a[i].is_array() || a[i].size() != 2 || !a[i][0].is_string() || !a[i][1].is_string())
        throw ConfigError(p, "expected [manifest, temporal]");
      const auto m = parse_manifest(a[i][0].get<std::string>(), cfg::index_path(p, 0));
      const auto t = parse_temporal(a[i][1].get<std::string>(), cfg::index_path(p, 1));
      if (m == Manifest::FalseNegative && t == Temporal::Trajectory)
        throw ConfigError(p, "FalseNegative x Trajectory is undefined");
      s.attack_choices.emplace_back(m, t);
    }
  }
  n.check_no_unknown();
  cfg::validated(s, path);
  return s;
}

inline json to_json(const McAttackSampler& s)
{
  json attacks = json::array();
  for (const auto& [m, t] : s.attack_choices) attacks.push_back({to_string(m), to_string(t)});
  return {{"lambda_fp", s.lambda_fp}, {"lambda_fn", s.lambda_fn}, {"mu_d", s.mu_d},
          {"sigma_d", s.sigma_d},     {"mu_t", s.mu_t},           {"sigma_t", s.sigma_t},
          {"agent_choices", s.agent_choices}, {"scene_choices", s.scene_choices}, {"attack_choices", attacks}};
}

inline McTuneSampler mc_tune_from_json(const json& j, const std::string& path = "mc_tune")
{
  cfg::Node n(j, path);
  McTuneSampler s;
  s.mu_agent_alpha0 = n.number("mu_agent_alpha0", s.mu_agent_alpha0);
  s.sigma_agent_alpha0 = n.number("sigma_agent_alpha0", s.sigma_agent_alpha0);
  s.mu_agent_beta0 = n.number("mu_agent_beta0", s.mu_agent_beta0);
  s.sigma_agent_beta0 = n.number("sigma_agent_beta0", s.sigma_agent_beta0);
  s.mu_track_alpha0 = n.number("mu_track_alpha0", s.mu_track_alpha0);
  s.sigma_track_alpha0 = n.number("sigma_track_alpha0", s.sigma_track_alpha0);
  s.mu_track_beta0 = n.number("mu_track_beta0", s.mu_track_beta0);
  s.sigma_track_beta0 = n.number("sigma_track_beta0", s.sigma_track_beta0);
  s.agent_bias_min = n.number("agent_bias_min", s.agent_bias_min);
  s.agent_bias_max = n.number("agent_bias_max", s.agent_bias_max);
  s.track_bias_min = n.number("track_bias_min", s.track_bias_min);
  s.track_bias_max = n.number("track_bias_max", s.track_bias_max);
  s.threshold_min = n.number("threshold_min", s.threshold_min);
  s.threshold_max = n.number("threshold_max", s.threshold_max);
  s.t_ignore_min = n.number("t_ignore_min", s.t_ignore_min);
  s.t_ignore_max = n.number("t_ignore_max", s.t_ignore_max);
  s.gamma_min = n.number("gamma_min", s.gamma_min);
  s.gamma_max = n.number("gamma_max", s.gamma_max);
  n.check_no_unknown();
  auto range = [&](double lo, double hi, const std::string& key) {
    if (!(lo <= hi)) throw ConfigError(n.child(key), "min must be <= max");
  };
  range(s.agent_bias_min, s.agent_bias_max, "agent_bias_min");
  range(s.track_bias_min, s.track_bias_max, "track_bias_min");
  range(s.threshold_min, s.threshold_max, "threshold_min");
  range(s.t_ignore_min, s.t_ignore_max, "t_ignore_min");
  range(s.gamma_min, s.gamma_max, "gamma_min");
  if (!(s.agent_bias_min >= 1.0)) throw ConfigError(n.child("agent_bias_min"), "must be >= 1");
  if (!(s.track_bias_min >= 1.0)) throw ConfigError(n.child("track_bias_min"), "must be >= 1");
  if (!(s.threshold_min >= 0.0 && s.threshold_max <= 1.0)) throw ConfigError(n.child("threshold_min"), "thresholds must lie in [0, 1]");
  if (!(s.t_ignore_min >= 0.0 && s.t_ignore_max <= 1.0)) throw ConfigError(n.child("t_ignore_min"), "t_ignore must lie in [0, 1]");
  if (!(s.gamma_min > 0.0)) throw ConfigError(n.child("gamma_min"), "must be > 0");
  return s;
}

// ---------------------------------------------------------------------------------------
// Files

inline json load_json_file(const std::string& file)
{
  std::ifstream in(file);
  if (!in) throw ConfigError(file, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(file, std::string("invalid JSON: ") + e.what());
  }
}

template <typename F>
auto load_with_file_context(const std::string& file, F parse)
{
  const auto j = load_json_file(file);
  try {
    return parse(j);
  } catch (const ConfigError& e) {
    throw ConfigError(file + ":" + e.path(), e.message());
  }
}

/// Built-in scenario name or path to a scenario JSON file.
inline ScenarioConfig load_scenario(const std::string& name_or_file)
{
  if (scenarios::is_builtin(name_or_file)) return scenarios::builtin(name_or_file);
  return load_with_file_context(name_or_file, [](const json& j) { return scenario_from_json(j); });
}

inline std::vector<ThreatConfig> load_threats(const std::string& file)
{
  return load_with_file_context(file, [](const json& j) { return threats_from_json(j); });
}

inline TrustConfig load_trust(const std::string& file)
{
  return load_with_file_context(file, [](const json& j) { return trust_from_json(j); });
}

}  // namespace trustfuse
