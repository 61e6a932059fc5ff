#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "trustfuse/fov.hpp"
#include "trustfuse/metrics.hpp"
#include "trustfuse/scenarios.hpp"
#include "trustfuse/threat.hpp"
#include "trustfuse/tracking.hpp"
#include "trustfuse/trust.hpp"
#include "trustfuse/world.hpp"

namespace trustfuse {

enum class Mode { NoSecurity, SecurityAware };

inline std::string to_string(Mode m) { return m == Mode::NoSecurity ? "NoSecurity" : "SecurityAware"; }

// ---------------------------------------------------------------------------------------
// Agent-side simulation. Everything upstream of the aggregator is independent of the trust
// configuration, so it is simulated once into a Dataset and replayed per configuration.

struct TruthState
{
  int id = 0;
  Point2 position;
};

struct FrameData
{
  double time = 0.0;
  std::vector<TruthState> truths;               // every object, global frame
  std::map<int, std::set<int>> visible;         // agent id -> visible object ids
  std::vector<AgentReport> reports;             // ascending agent id
  std::set<int> attacked;                       // agents under an effective attack this frame
};

struct Dataset
{
  std::string scenario;
  std::vector<ThreatConfig> threats;
  std::uint64_t seed = 0;
  double dt = 0.1;
  std::vector<FrameData> frames;
};

/// Independent, reproducible stream for (seed, stream id).
inline std::mt19937_64 derive_rng(std::uint64_t seed, std::uint64_t stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

inline void validate(const ScenarioConfig& s)
{
  auto fail = [](const std::string& what) { throw std::invalid_argument("ScenarioConfig: " + what); };
  if (!(s.dt > 0.0)) fail("dt must be > 0");
  if (!(s.duration >= s.dt)) fail("duration must be >= dt");
  if (s.fov_bins < 8) fail("fov_bins must be >= 8");
  std::set<int> ids;
  for (const auto& o : s.objects) {
    if (!(o.initial.radius > 0.0)) fail("object radius must be > 0");
    if (!ids.insert(o.initial.id).second) fail("duplicate object id " + std::to_string(o.initial.id));
  }
  ids.clear();
  for (const auto& a : s.agents) {
    if (!ids.insert(a.id).second) fail("duplicate agent id " + std::to_string(a.id));
    if (a.mobile() && a.waypoints.size() < 2) fail("mobile agents need >= 2 waypoints");
    if (!(a.sensor.max_range > 0.0)) fail("max_range must be > 0");
    if (a.sensor.n_rays < 8) fail("n_rays must be >= 8");
    auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!unit(a.sensor.p_natural_fn)) fail("p_natural_fn must be in [0,1]");
    if (!(a.sensor.lambda_natural_fp >= 0.0)) fail("lambda_natural_fp must be >= 0");
    if (!(a.sensor.noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  }
}

inline Dataset simulate(const ScenarioConfig& scenario, const std::vector<ThreatConfig>& threats, std::uint64_t seed,
                        const LocalTrackerConfig& tracker_base = {})
{
  validate(scenario);
  for (const auto& t : threats) t.validate();

  Dataset ds;
  ds.scenario = scenario.name;
  ds.threats = threats;
  ds.seed = seed;
  ds.dt = scenario.dt;

  World world = make_world(scenario);
  std::map<int, std::mt19937_64> det_rng;
  std::map<int, LocalTrackerState> trackers;
  std::map<int, LocalTrackerConfig> tracker_cfg;
  for (const auto& a : world.agents) {
    det_rng.emplace(a.spec.id, derive_rng(seed, static_cast<std::uint64_t>(a.spec.id) + 1));
    trackers[a.spec.id] = {};
    auto c = tracker_base;
    c.measurement_sigma = std::max(a.spec.sensor.noise_sigma, 0.05);
    tracker_cfg[a.spec.id] = c;
  }
  std::vector<AttackState> attacks;
  for (const auto& t : threats) attacks.push_back(make_attack_state(t));

  const auto n_frames = static_cast<int>(std::floor(scenario.duration / scenario.dt + 1e-9));
  for (int f = 0; f < n_frames; ++f) {
    if (f > 0) world = step_world(std::move(world), scenario.dt);
    const double t = f * scenario.dt;
    FrameData frame;
    frame.time = t;
    for (const auto& o : world.objects) frame.truths.push_back({o.state.id, o.state.position});

    for (const auto& agent : world.agents) {
      const int id = agent.spec.id;
      const auto fov = estimate_fov(scan(agent, world), agent.spec.sensor.max_range, scenario.fov_bins, t);
      auto detections = generate_detections(agent, world, fov, det_rng.at(id));
      const auto visible = visible_truths(agent, world);
      frame.visible[id] = visible;

      for (std::size_t k = 0; k < threats.size(); ++k) {
        if (threats[k].target_agent_id != id) continue;
        AttackContext ctx{agent.pose, fov, {}};
        for (const auto& o : world.objects)
          if (visible.contains(o.state.id)) ctx.visible_truths.emplace_back(o.state.id, to_local(agent.pose, o.state.position));
        detections = apply_attack(threats[k], std::move(detections), ctx, t, attacks[k]);
        if (attacks[k].effective()) frame.attacked.insert(id);
      }

      std::vector<Point2> measurements;
      measurements.reserve(detections.size());
      for (const auto& d : detections) measurements.push_back(to_global(agent.pose, d.position));
      trackers[id] = local_track_step(std::move(trackers[id]), measurements, t, tracker_cfg[id]);
      frame.reports.push_back(make_report(id, agent.pose, trackers[id], fov, t));
    }
    std::sort(frame.reports.begin(), frame.reports.end(),
              [](const auto& a, const auto& b) { return a.agent_id < b.agent_id; });
    ds.frames.push_back(std::move(frame));
  }
  return ds;
}

// ---------------------------------------------------------------------------------------
// Aggregator-side evaluation

struct EvalSettings
{
  AggregatorConfig aggregator;
  double ospa_c = 10.0;
  double ospa_p = 1.0;
  double f1_threshold = 0.8;
  AgentTargetMode agent_target = AgentTargetMode::Oracle;
  bool keep_snapshots = false;
};

struct FrameMetrics
{
  double timestamp = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ospa = 0.0;
  std::optional<double> mean_track_trust_score;
  std::optional<double> mean_agent_trust_score;
  std::map<int, double> agent_f1;          // local tracks vs locally visible truths
  std::map<int, double> agent_trust_mean;  // empty in NoSecurity mode
  int n_published = 0;
  int n_flagged = 0;
};

struct FrameSnapshot
{
  std::vector<AgentReport> reports;
  std::vector<AggTrack> agg_tracks;
  std::map<int, TrustDistribution> agent_trust;
  std::map<int, TrustDistribution> track_trust;
};

struct RunSummary
{
  double window_start = 0.0;
  int n_frames = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ospa = 0.0;
  std::optional<double> track_trust_score;
  std::optional<double> agent_trust_score;
};

struct RunRecord
{
  std::string run_id;
  std::string scenario;
  std::vector<ThreatConfig> threats;
  TrustConfig trust;
  Mode mode = Mode::NoSecurity;
  std::uint64_t seed = 0;
  std::vector<FrameMetrics> frames;
  std::vector<FrameSnapshot> snapshots;  // only with EvalSettings::keep_snapshots
  RunSummary summary;
  std::uint64_t trust_accesses = 0;
};

/// Start of the post-attack evaluation window: one second after the earliest attack
/// start, or the first frame for benign runs.
inline double default_window_start(const std::vector<ThreatConfig>& threats)
{
  if (threats.empty()) return 0.0;
  double s = threats.front().start_time;
  for (const auto& t : threats) s = std::min(s, t.start_time);
  return s + 1.0;
}

inline RunSummary summarize(const std::vector<FrameMetrics>& frames, double window_start)
{
  RunSummary s;
  s.window_start = window_start;
  double tt = 0.0, at = 0.0;
  int n_tt = 0, n_at = 0;
  for (const auto& f : frames) {
    if (f.timestamp < window_start - 1e-9) continue;
    ++s.n_frames;
    s.precision += f.precision;
    s.recall += f.recall;
    s.f1 += f.f1;
    s.ospa += f.ospa;
    if (f.mean_track_trust_score) { tt += *f.mean_track_trust_score; ++n_tt; }
    if (f.mean_agent_trust_score) { at += *f.mean_agent_trust_score; ++n_at; }
  }
  if (s.n_frames > 0) {
    const double n = s.n_frames;
    s.precision /= n;
    s.recall /= n;
    s.f1 /= n;
    s.ospa /= n;
  }
  if (n_tt > 0) s.track_trust_score = tt / n_tt;
  if (n_at > 0) s.agent_trust_score = at / n_at;
  return s;
}

inline std::vector<Point2> positions(const std::vector<TruthState>& truths)
{
  std::vector<Point2> out;
  for (const auto& t : truths) out.push_back(t.position);
  return out;
}

/// Replays a dataset through the aggregator (and, when security-aware, the trust
/// estimator) and scores every frame against ground truth. NoSecurity never touches
/// trust state; `RunRecord::trust_accesses` stays zero.
inline RunRecord evaluate(const Dataset& ds, const TrustConfig& trust_cfg, Mode mode, const EvalSettings& settings = {},
                          std::optional<double> window_start = std::nullopt)
{
  trust_cfg.validate();
  RunRecord rec;
  rec.scenario = ds.scenario;
  rec.threats = ds.threats;
  rec.trust = trust_cfg;
  rec.mode = mode;
  rec.seed = ds.seed;

  AggregatorState agg;
  TrustState trust;
  const bool secure = mode == Mode::SecurityAware;
  for (const auto& frame : ds.frames) {
    if (secure) {
      FusionTrust ft{trust.agent_means(), trust.track_means(), trust_cfg.gamma, trust_cfg.t_ignore};
      agg = aggregate(std::move(agg), frame.reports, &ft, settings.aggregator);
      mate_step(trust, frame.reports, agg.tracks, trust_cfg);
      apply_thresholding(agg, trust.track_means(), trust_cfg.t_ignore);
    } else {
      agg = aggregate(std::move(agg), frame.reports, nullptr, settings.aggregator);
    }

    FrameMetrics m;
    m.timestamp = frame.time;
    std::vector<Point2> visible_truths;
    std::set<int> any_visible;
    for (const auto& [aid, ids] : frame.visible) any_visible.insert(ids.begin(), ids.end());
    for (const auto& t : frame.truths)
      if (any_visible.contains(t.id)) visible_truths.push_back(t.position);
    std::vector<Point2> published;
    for (const auto& a : published_picture(agg)) published.push_back(a.track.position());
    const auto scores = assignment_metrics(published, visible_truths);
    m.precision = scores.precision;
    m.recall = scores.recall;
    m.f1 = scores.f1;
    m.ospa = ospa(published, visible_truths, settings.ospa_c, settings.ospa_p);
    m.n_published = static_cast<int>(published.size());
    for (const auto& a : agg.tracks) m.n_flagged += a.flagged ? 1 : 0;

    std::map<int, std::vector<Point2>> local_tracks;
    for (const auto& r : frame.reports) {
      std::vector<Point2> tracks;
      for (const auto& t : r.global_tracks()) tracks.push_back(t.position());
      std::vector<Point2> vis;
      for (const auto& t : frame.truths)
        if (frame.visible.at(r.agent_id).contains(t.id)) vis.push_back(t.position);
      m.agent_f1[r.agent_id] = assignment_metrics(tracks, vis).f1;
      local_tracks[r.agent_id] = std::move(tracks);
    }

    if (secure) {
      const auto& tt = trust.tracks();
      if (!agg.tracks.empty()) {
        std::vector<Point2> est;
        for (const auto& a : agg.tracks) est.push_back(a.track.position());
        const auto targets = track_trust_targets(est, positions(frame.truths));
        double sum = 0.0;
        for (std::size_t i = 0; i < agg.tracks.size(); ++i)
          sum += track_trust_score(tt.at(agg.tracks[i].track.id), targets[i]);
        m.mean_track_trust_score = sum / static_cast<double>(agg.tracks.size());
      }
      const auto& at = trust.agents();
      if (!at.empty()) {
        double sum = 0.0;
        for (const auto& [aid, dist] : at) {
          std::vector<Point2> vis;
          for (const auto& t : frame.truths)
            if (frame.visible.at(aid).contains(t.id)) vis.push_back(t.position);
          const auto target = agent_trust_target(local_tracks[aid], vis, settings.f1_threshold, settings.agent_target,
                                                 frame.attacked.contains(aid));
          sum += track_trust_score(dist, target);
          m.agent_trust_mean[aid] = dist.mean();
        }
        m.mean_agent_trust_score = sum / static_cast<double>(at.size());
      }
    }
    rec.frames.push_back(std::move(m));
    if (settings.keep_snapshots) {
      FrameSnapshot snap{frame.reports, agg.tracks, {}, {}};
      if (secure) {
        snap.agent_trust = trust.agents();
        snap.track_trust = trust.tracks();
      }
      rec.snapshots.push_back(std::move(snap));
    }
  }
  rec.summary = summarize(rec.frames, window_start.value_or(default_window_start(ds.threats)));
  rec.trust_accesses = trust.access_count();
  return rec;
}

inline RunRecord run_scenario(const ScenarioConfig& scenario, const std::vector<ThreatConfig>& threats,
                              const TrustConfig& trust_cfg, Mode mode, std::uint64_t seed,
                              const EvalSettings& settings = {})
{
  auto rec = evaluate(simulate(scenario, threats, seed), trust_cfg, mode, settings);
  rec.run_id = scenario.name + "-s" + std::to_string(seed) + "-" + to_string(mode);
  return rec;
}

// ---------------------------------------------------------------------------------------
// Monte Carlo adversary corpus

/// One sampled adversarial run with its paired benign baseline, executed in both modes.
struct McRun
{
  std::string run_id;
  std::string scenario;
  ThreatConfig threat;
  std::uint64_t seed = 0;
  RunRecord no_security;
  RunRecord security_aware;
  RunSummary benign_no_security;
  RunSummary benign_security_aware;
};

using ScenarioLibrary = std::map<std::string, ScenarioConfig>;

inline ScenarioLibrary builtin_library()
{
  ScenarioLibrary lib;
  for (const auto& n : scenarios::builtin_names()) lib[n] = scenarios::builtin(n);
  return lib;
}

/// Corpus entry identity: everything needed to regenerate a run.
struct McCase
{
  std::string run_id;
  std::string scenario;
  ThreatConfig threat;
  std::uint64_t seed = 0;
};

inline std::vector<McCase> sample_corpus(const McAttackSampler& sampler, int n_runs, std::uint64_t seed)
{
  if (n_runs <= 0) throw std::invalid_argument("mc_attacks: n_runs must be > 0");
  sampler.validate();
  std::mt19937_64 rng(seed);
  std::vector<McCase> out;
  for (int i = 0; i < n_runs; ++i) {
    McCase c;
    c.run_id = "mc" + std::to_string(i);
    c.seed = rng();
    c.scenario = detail::choose(sampler.scene_choices, rng);
    c.threat = sample_attack(sampler, rng);
    out.push_back(c);
  }
  return out;
}

inline McRun execute_case(const McCase& c, const ScenarioLibrary& lib, const TrustConfig& trust_cfg,
                          const EvalSettings& settings = {})
{
  const auto it = lib.find(c.scenario);
  if (it == lib.end()) throw std::invalid_argument("mc_attacks: unknown scenario '" + c.scenario + "'");
  const auto attacked = simulate(it->second, {c.threat}, c.seed);
  const auto benign = simulate(it->second, {}, c.seed);
  const double window = default_window_start({c.threat});
  McRun run;
  run.run_id = c.run_id;
  run.scenario = c.scenario;
  run.threat = c.threat;
  run.seed = c.seed;
  run.no_security = evaluate(attacked, trust_cfg, Mode::NoSecurity, settings, window);
  run.security_aware = evaluate(attacked, trust_cfg, Mode::SecurityAware, settings, window);
  run.no_security.run_id = c.run_id + "-NoSecurity";
  run.security_aware.run_id = c.run_id + "-SecurityAware";
  run.benign_no_security = evaluate(benign, trust_cfg, Mode::NoSecurity, settings, window).summary;
  run.benign_security_aware = evaluate(benign, trust_cfg, Mode::SecurityAware, settings, window).summary;
  return run;
}

inline std::vector<McRun> mc_attacks(const ScenarioLibrary& lib, const McAttackSampler& sampler, int n_runs,
                                     std::uint64_t seed, const TrustConfig& trust_cfg = {},
                                     const EvalSettings& settings = {})
{
  std::vector<McRun> runs;
  for (const auto& c : sample_corpus(sampler, n_runs, seed)) runs.push_back(execute_case(c, lib, trust_cfg, settings));
  return runs;
}

// ---------------------------------------------------------------------------------------
// Monte Carlo trust-parameter tuning

struct McTuneSampler
{
  double mu_agent_alpha0 = 5.0, sigma_agent_alpha0 = 2.0;
  double mu_agent_beta0 = 1.0, sigma_agent_beta0 = 0.5;
  double mu_track_alpha0 = 1.0, sigma_track_alpha0 = 0.5;
  double mu_track_beta0 = 1.0, sigma_track_beta0 = 0.5;
  double agent_bias_min = 1.0, agent_bias_max = 20.0;
  double track_bias_min = 1.0, track_bias_max = 10.0;
  double threshold_min = 0.0, threshold_max = 0.6;
  double t_ignore_min = 0.2, t_ignore_max = 0.8;
  double gamma_min = 0.1, gamma_max = 10.0;

  template <typename Rng>
  TrustConfig sample(const TrustConfig& base, Rng& rng) const
  {
    auto positive_normal = [&](double mu, double sigma) {
      return std::max(0.1, detail::normal_or_mean(mu, sigma, rng));
    };
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    TrustConfig c = base;
    c.agent_prior_alpha = positive_normal(mu_agent_alpha0, sigma_agent_alpha0);
    c.agent_prior_beta = positive_normal(mu_agent_beta0, sigma_agent_beta0);
    c.track_prior_alpha = positive_normal(mu_track_alpha0, sigma_track_alpha0);
    c.track_prior_beta = positive_normal(mu_track_beta0, sigma_track_beta0);
    c.agent_negativity_bias = uniform(agent_bias_min, agent_bias_max);
    c.track_negativity_bias = uniform(track_bias_min, track_bias_max);
    c.agent_negativity_threshold = uniform(threshold_min, threshold_max);
    c.track_negativity_threshold = uniform(threshold_min, threshold_max);
    c.t_ignore = uniform(t_ignore_min, t_ignore_max);
    c.gamma = std::exp(uniform(std::log(gamma_min), std::log(gamma_max)));
    return c;
  }
};

struct TuneResult
{
  TrustConfig config;
  double objective = 0.0;
  double agent_trust_score = 0.0;
  double track_trust_score = 0.0;
  double ospa_term = 0.0;
};

/// A corpus case materialized for repeated evaluation.
struct TuneCorpusItem
{
  Dataset attacked;
  RunSummary benign_no_security;
  double window_start = 0.0;
};

inline std::vector<TuneCorpusItem> materialize(const std::vector<McCase>& cases, const ScenarioLibrary& lib,
                                               const EvalSettings& settings = {})
{
  std::vector<TuneCorpusItem> out;
  for (const auto& c : cases) {
    const auto& scen = lib.at(c.scenario);
    TuneCorpusItem item;
    item.attacked = simulate(scen, {c.threat}, c.seed);
    item.window_start = default_window_start({c.threat});
    item.benign_no_security =
        evaluate(simulate(scen, {}, c.seed), TrustConfig{}, Mode::NoSecurity, settings, item.window_start).summary;
    out.push_back(std::move(item));
  }
  return out;
}

/// Tuning objective of one configuration: mean over the corpus of the average of the
/// agent trust score, the track trust score and one minus the post-attack OSPA excess
/// over the benign unsecured baseline, normalized by the OSPA cutoff and clamped to [0, 1].
inline TuneResult score_config(const TrustConfig& cfg, const std::vector<TuneCorpusItem>& corpus,
                               const EvalSettings& settings = {})
{
  TuneResult r;
  r.config = cfg;
  if (corpus.empty()) return r;
  for (const auto& item : corpus) {
    const auto rec = evaluate(item.attacked, cfg, Mode::SecurityAware, settings, item.window_start);
    const double agent = rec.summary.agent_trust_score.value_or(0.0);
    const double track = rec.summary.track_trust_score.value_or(0.0);
    const double excess = (rec.summary.ospa - item.benign_no_security.ospa) / settings.ospa_c;
    const double ospa_term = 1.0 - std::clamp(excess, 0.0, 1.0);
    r.agent_trust_score += agent;
    r.track_trust_score += track;
    r.ospa_term += ospa_term;
  }
  const double n = static_cast<double>(corpus.size());
  r.agent_trust_score /= n;
  r.track_trust_score /= n;
  r.ospa_term /= n;
  r.objective = (r.agent_trust_score + r.track_trust_score + r.ospa_term) / 3.0;
  return r;
}

/// Samples `n_configs` trust configurations (the first is `base` itself when
/// `include_base`), scores each on the corpus and returns them best first.
inline std::vector<TuneResult> mc_tune(const std::vector<TuneCorpusItem>& corpus, const McTuneSampler& sampler,
                                       int n_configs, std::uint64_t seed, const TrustConfig& base = {},
                                       bool include_base = false, const EvalSettings& settings = {})
{
  if (n_configs <= 0) throw std::invalid_argument("mc_tune: n_configs must be > 0");
  std::mt19937_64 rng(seed);
  std::vector<TuneResult> results;
  for (int i = 0; i < n_configs; ++i) {
    const TrustConfig cfg = (include_base && i == 0) ? base : sampler.sample(base, rng);
    results.push_back(score_config(cfg, corpus, settings));
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const TuneResult& a, const TuneResult& b) { return a.objective > b.objective; });
  return results;
}

}  // namespace trustfuse
