#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trustfuse/assignment.hpp"
#include "trustfuse/fov.hpp"
#include "trustfuse/tracking.hpp"
#include "trustfuse/trust_distribution.hpp"

namespace trustfuse {

enum class EntityClass { Agent, Track };

/// Trust pseudomeasurement: an observation (value, confidence) in [0, 1]^2 about one
/// entity, produced by comparing agent reports against the aggregator's tracks.
struct Psm
{
  int target = 0;
  double value = 0.0;
  double confidence = 0.0;
  int source = 0;
};

/// One stage of trust propagation; stages are applied in the order listed.
struct PropagatorStep
{
  enum class Kind { Prior, Expectation, Variance };
  Kind kind = Kind::Prior;
  double omega = 0.02;   // Prior: interpolation weight toward the class prior
  double delta = 10.0;   // Expectation / Variance: change factor (>= 1)
  double target = 0.5;   // Expectation: target mean; Variance: target precision

  static PropagatorStep prior(double omega) { return {Kind::Prior, omega, 1.0, 0.0}; }
  static PropagatorStep expectation(double delta_mu, double target_mu) { return {Kind::Expectation, 0.0, delta_mu, target_mu}; }
  static PropagatorStep variance(double delta_nu, double target_nu) { return {Kind::Variance, 0.0, delta_nu, target_nu}; }
};

struct TrustConfig
{
  double agent_prior_alpha = 5.0;
  double agent_prior_beta = 1.0;
  double track_prior_alpha = 1.0;
  double track_prior_beta = 1.0;
  std::vector<PropagatorStep> propagation{PropagatorStep::prior(0.02)};
  double agent_negativity_bias = 10.0;
  double agent_negativity_threshold = 0.3;
  double track_negativity_bias = 5.0;
  double track_negativity_threshold = 0.3;
  double t_ignore = 0.5;
  double gamma = 1.0;
  double gate = 2.0;        // agent-track to aggregator-track association gate (m)
  double fov_margin = 1.5;  // see expected_observable

  void validate() const
  {
    auto fail = [](const std::string& what) { throw std::invalid_argument("TrustConfig: " + what); };
    if (!(agent_prior_alpha > 0.0) || !(agent_prior_beta > 0.0)) fail("agent prior parameters must be > 0");
    if (!(track_prior_alpha > 0.0) || !(track_prior_beta > 0.0)) fail("track prior parameters must be > 0");
    if (!(agent_negativity_bias >= 1.0) || !(track_negativity_bias >= 1.0)) fail("negativity biases must be >= 1");
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(agent_negativity_threshold) || !unit(track_negativity_threshold)) fail("negativity thresholds must be in [0,1]");
    if (!unit(t_ignore)) fail("t_ignore must be in [0,1]");
    if (!(gamma > 0.0)) fail("gamma must be > 0");
    for (const auto& s : propagation) {
      if (s.kind == PropagatorStep::Kind::Prior && !unit(s.omega)) fail("prior propagator omega must be in [0,1]");
      if (s.kind != PropagatorStep::Kind::Prior && !(s.delta >= 1.0)) fail("propagator change factor must be >= 1");
      if (s.kind == PropagatorStep::Kind::Expectation && !unit(s.target)) fail("expectation target must be in [0,1]");
      if (s.kind == PropagatorStep::Kind::Variance && !(s.target > 0.0)) fail("precision target must be > 0");
    }
  }
};

inline TrustDistribution init_trust(const TrustConfig& cfg, EntityClass cls)
{
  return cls == EntityClass::Agent ? TrustDistribution::make(cfg.agent_prior_alpha, cfg.agent_prior_beta)
                                   : TrustDistribution::make(cfg.track_prior_alpha, cfg.track_prior_beta);
}

// ---------------------------------------------------------------------------------------
// Propagation

inline TrustDistribution propagate_prior(TrustDistribution t, const TrustDistribution& prior, double omega)
{
  t.alpha = (1.0 - omega) * t.alpha + omega * prior.alpha;
  t.beta = (1.0 - omega) * t.beta + omega * prior.beta;
  t.clamp_to_floor();
  return t;
}

inline TrustDistribution propagate_expectation(TrustDistribution t, double delta_mu, double target_mu)
{
  constexpr double eps = 1e-9;
  const double nu = t.precision();
  double mu = t.mean();
  mu = std::clamp(mu + (target_mu - mu) / delta_mu, eps, 1.0 - eps);
  t.alpha = mu * nu;
  t.beta = (1.0 - mu) * nu;
  t.clamp_to_floor();
  return t;
}

inline TrustDistribution propagate_variance(TrustDistribution t, double delta_nu, double target_nu)
{
  const double mu = t.mean();
  const double nu = t.precision() + (target_nu - t.precision()) / delta_nu;
  t.alpha = mu * nu;
  t.beta = (1.0 - mu) * nu;
  t.clamp_to_floor();
  return t;
}

inline TrustDistribution propagate(TrustDistribution t, std::span<const PropagatorStep> steps,
                                   const TrustDistribution& prior)
{
  for (const auto& s : steps) {
    switch (s.kind) {
      case PropagatorStep::Kind::Prior: t = propagate_prior(t, prior, s.omega); break;
      case PropagatorStep::Kind::Expectation: t = propagate_expectation(t, s.delta, s.target); break;
      case PropagatorStep::Kind::Variance: t = propagate_variance(t, s.delta, s.target); break;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------------------
// Updates

/// Conjugate Beta update with fractional Bernoulli observations:
/// alpha += sum c*v, beta += sum c*(1-v).
inline TrustDistribution update_trust(TrustDistribution t, std::span<const Psm> psms)
{
  double da = 0.0;
  double db = 0.0;
  for (const auto& p : psms) {
    da += p.confidence * p.value;
    db += p.confidence * (1.0 - p.value);
  }
  t.alpha += da;
  t.beta += db;
  t.clamp_to_floor();
  return t;
}

struct TrustIncrement
{
  double d_alpha = 0.0;
  double d_beta = 0.0;
};

/// Increments of the negatively weighted update; decidedly negative PSMs
/// (value < threshold) have their negative mass multiplied by `bias`.
inline TrustIncrement weighted_increment(std::span<const Psm> psms, double bias, double threshold)
{
  TrustIncrement inc;
  for (const auto& p : psms) {
    const double w = p.value < threshold ? bias : 1.0;
    inc.d_alpha += p.confidence * p.value;
    inc.d_beta += w * p.confidence * (1.0 - p.value);
  }
  return inc;
}

inline TrustDistribution update_trust_weighted(TrustDistribution t, std::span<const Psm> psms, double bias,
                                               double threshold)
{
  if (!(bias >= 1.0)) throw std::invalid_argument("update_trust_weighted: bias must be >= 1");
  const auto inc = weighted_increment(psms, bias, threshold);
  t.alpha += inc.d_alpha;
  t.beta += inc.d_beta;
  t.clamp_to_floor();
  return t;
}

// ---------------------------------------------------------------------------------------
// Pseudomeasurements

enum class PsmPass { TrackPass, AgentPass };

/// Builds PSMs by associating each agent's tracks with the aggregator tracks.
///  - matched pair: track PSM (1, E[agent]); agent PSM (E[track], 1 - Var[track])
///  - aggregator track expected in the agent's FOV but unmatched: track PSM
///    (0, E[agent]); agent PSM (1 - E[track], 1 - Var[track])
///  - aggregator tracks neither matched nor expected produce nothing.
/// Missing trust entries fall back to `fallback_agent` / `fallback_track`.
inline std::vector<Psm> generate_psms(const std::vector<AgentReport>& reports, const std::vector<AggTrack>& agg,
                                      const std::map<int, TrustDistribution>& agent_trust,
                                      const std::map<int, TrustDistribution>& track_trust, PsmPass pass,
                                      double gate, double fov_margin,
                                      const TrustDistribution& fallback_agent = {},
                                      const TrustDistribution& fallback_track = {})
{
  std::vector<Psm> out;
  auto lookup = [](const std::map<int, TrustDistribution>& m, int id, const TrustDistribution& fb) {
    const auto it = m.find(id);
    return it == m.end() ? fb : it->second;
  };
  for (const auto& report : reports) {
    const auto tracks = report.global_tracks();
    const auto fov = report.global_fov();
    const auto cost = distance_matrix(tracks, agg, [](const Track& t) { return t.position(); },
                                      [](const AggTrack& a) { return a.track.position(); });
    const auto assign = gated_assignment(cost, gate);
    std::vector<char> matched(agg.size(), 0);
    for (const auto& m : assign.matches) matched[static_cast<std::size_t>(m.second)] = 1;
    const auto agent = lookup(agent_trust, report.agent_id, fallback_agent);

    for (std::size_t j = 0; j < agg.size(); ++j) {
      const bool seen = matched[j] != 0;
      if (!seen && !expected_observable(fov, agg[j].track.position(), fov_margin)) continue;
      const int track_id = agg[j].track.id;
      if (pass == PsmPass::TrackPass) {
        out.push_back({track_id, seen ? 1.0 : 0.0, agent.mean(), report.agent_id});
      } else {
        const auto tt = lookup(track_trust, track_id, fallback_track);
        out.push_back({report.agent_id, seen ? tt.mean() : 1.0 - tt.mean(), 1.0 - tt.variance(), track_id});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------
// Estimator state and the per-frame step

/// Agent and track trust, keyed by id. Every access through the accessors is counted so
/// callers can prove a code path never touched trust.
class TrustState
{
public:
  const std::map<int, TrustDistribution>& agents() const { ++accesses_; return agents_; }
  const std::map<int, TrustDistribution>& tracks() const { ++accesses_; return tracks_; }
  std::map<int, TrustDistribution>& agents_mut() { ++accesses_; return agents_; }
  std::map<int, TrustDistribution>& tracks_mut() { ++accesses_; return tracks_; }

  std::map<int, double> agent_means() const { return means(agents()); }
  std::map<int, double> track_means() const { return means(tracks()); }

  std::uint64_t access_count() const { return accesses_; }

private:
  static std::map<int, double> means(const std::map<int, TrustDistribution>& m)
  {
    std::map<int, double> out;
    for (const auto& [id, t] : m) out[id] = t.mean();
    return out;
  }

  std::map<int, TrustDistribution> agents_;
  std::map<int, TrustDistribution> tracks_;
  mutable std::uint64_t accesses_ = 0;
};

inline std::map<int, std::vector<Psm>> group_by_target(const std::vector<Psm>& psms)
{
  std::map<int, std::vector<Psm>> g;
  for (const auto& p : psms) g[p.target].push_back(p);
  return g;
}

/// One trust-estimation frame: propagate every trust, update track trust from PSMs built
/// with the previous agent trust, then update agent trust from PSMs built with the new
/// track trust. Entities are updated independently within each pass.
inline void mate_step(TrustState& state, const std::vector<AgentReport>& reports, const std::vector<AggTrack>& agg,
                      const TrustConfig& cfg)
{
  auto& agents = state.agents_mut();
  auto& tracks = state.tracks_mut();
  const auto agent_prior = init_trust(cfg, EntityClass::Agent);
  const auto track_prior = init_trust(cfg, EntityClass::Track);

  for (const auto& r : reports)
    if (!agents.contains(r.agent_id)) agents[r.agent_id] = agent_prior;
  std::set<int> live;
  for (const auto& a : agg) {
    live.insert(a.track.id);
    if (!tracks.contains(a.track.id)) tracks[a.track.id] = track_prior;
  }
  std::erase_if(tracks, [&](const auto& kv) { return !live.contains(kv.first); });

  for (auto& [id, t] : agents) t = propagate(t, cfg.propagation, agent_prior);
  for (auto& [id, t] : tracks) t = propagate(t, cfg.propagation, track_prior);

  const auto track_psms = group_by_target(
      generate_psms(reports, agg, agents, tracks, PsmPass::TrackPass, cfg.gate, cfg.fov_margin, agent_prior, track_prior));
  for (auto& [id, t] : tracks) {
    const auto it = track_psms.find(id);
    if (it != track_psms.end())
      t = update_trust_weighted(t, it->second, cfg.track_negativity_bias, cfg.track_negativity_threshold);
  }

  const auto agent_psms = group_by_target(
      generate_psms(reports, agg, agents, tracks, PsmPass::AgentPass, cfg.gate, cfg.fov_margin, agent_prior, track_prior));
  for (auto& [id, t] : agents) {
    const auto it = agent_psms.find(id);
    if (it != agent_psms.end())
      t = update_trust_weighted(t, it->second, cfg.agent_negativity_bias, cfg.agent_negativity_threshold);
  }
}

}  // namespace trustfuse
