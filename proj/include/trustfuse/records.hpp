#pragma once

#include <cstdio>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "trustfuse/config.hpp"
#include "trustfuse/harness.hpp"

namespace trustfuse {

// Line-delimited JSON records. Key order is fixed and doubles print in shortest
// round-trip form, so identical runs give byte-identical output.
using record = nlohmann::ordered_json;

namespace rec_detail {
inline record opt(const std::optional<double>& v) { return v ? record(*v) : record(nullptr); }

inline record track_json(const Track& t)
{
  return {{"id", t.id},           {"x", t.state(0)},  {"y", t.state(1)},          {"vx", t.state(2)},
          {"vy", t.state(3)},     {"hits", t.hits},   {"misses", t.misses},       {"confirmed", t.confirmed}};
}

inline record trust_json(const TrustDistribution& d)
{
  return {{"alpha", d.alpha}, {"beta", d.beta}, {"mean", d.mean()}, {"variance", d.variance()}};
}

inline record summary_json(const RunSummary& s)
{
  return {{"window_start", s.window_start}, {"n_frames", s.n_frames},   {"precision", s.precision},
          {"recall", s.recall},             {"f1", s.f1},               {"ospa", s.ospa},
          {"track_trust_score", opt(s.track_trust_score)}, {"agent_trust_score", opt(s.agent_trust_score)}};
}
}  // namespace rec_detail

inline record to_record(const std::string& run_id, const AgentReport& r)
{
  record tracks = record::array();
  for (const auto& t : r.global_tracks()) tracks.push_back(rec_detail::track_json(t));
  return {{"type", "agent_report"},
          {"run_id", run_id},
          {"t", r.timestamp},
          {"agent_id", r.agent_id},
          {"pose", {r.pose.x(), r.pose.y(), r.pose.yaw()}},
          {"fov_area", polygon_area(r.fov.polygon.vertices)},
          {"tracks", tracks}};
}

inline record to_record(const std::string& run_id, double t, const AggTrack& a,
                        const std::map<int, TrustDistribution>& track_trust)
{
  record r{{"type", "agg_track"}, {"run_id", run_id}, {"t", t}};
  r.update(rec_detail::track_json(a.track));
  r["flagged"] = a.flagged;
  r["contributors"] = a.contributors;
  const auto it = track_trust.find(a.track.id);
  r["trust"] = it == track_trust.end() ? record(nullptr) : rec_detail::trust_json(it->second);
  return r;
}

inline record trust_record(const std::string& run_id, double t, const std::string& entity, int id,
                           const TrustDistribution& d)
{
  record r{{"type", "trust"}, {"run_id", run_id}, {"t", t}, {"entity", entity}, {"id", id}};
  r.update(rec_detail::trust_json(d));
  return r;
}

inline record to_record(const std::string& run_id, const FrameMetrics& m)
{
  record agent_f1 = record::object();
  for (const auto& [id, v] : m.agent_f1) agent_f1[std::to_string(id)] = v;
  record agent_trust = record::object();
  for (const auto& [id, v] : m.agent_trust_mean) agent_trust[std::to_string(id)] = v;
  return {{"type", "frame_metrics"},
          {"run_id", run_id},
          {"t", m.timestamp},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"ospa", m.ospa},
          {"track_trust_score", rec_detail::opt(m.mean_track_trust_score)},
          {"agent_trust_score", rec_detail::opt(m.mean_agent_trust_score)},
          {"n_published", m.n_published},
          {"n_flagged", m.n_flagged},
          {"agent_f1", agent_f1},
          {"agent_trust_mean", agent_trust}};
}

inline record summary_record(const RunRecord& r)
{
  record threats = record::array();
  for (const auto& t : r.threats) threats.push_back(record::parse(to_json(t).dump()));
  record out{{"type", "summary"},
             {"run_id", r.run_id},
             {"scenario", r.scenario},
             {"mode", to_string(r.mode)},
             {"seed", r.seed},
             {"threats", threats}};
  out.update(rec_detail::summary_json(r.summary));
  return out;
}

/// Every record of one run in emission order: per frame the agent reports, aggregator
/// tracks, trust snapshot (security-aware only) and frame metrics; then the summary.
inline void write_run(std::ostream& os, const RunRecord& r)
{
  for (std::size_t f = 0; f < r.frames.size(); ++f) {
    const double t = r.frames[f].timestamp;
    if (f < r.snapshots.size()) {
      const auto& s = r.snapshots[f];
      for (const auto& rep : s.reports) os << to_record(r.run_id, rep).dump() << '\n';
      for (const auto& a : s.agg_tracks) os << to_record(r.run_id, t, a, s.track_trust).dump() << '\n';
      for (const auto& [id, d] : s.agent_trust) os << trust_record(r.run_id, t, "agent", id, d).dump() << '\n';
      for (const auto& [id, d] : s.track_trust) os << trust_record(r.run_id, t, "track", id, d).dump() << '\n';
    }
    os << to_record(r.run_id, r.frames[f]).dump() << '\n';
  }
  os << summary_record(r).dump() << '\n';
}

inline record case_record(const McCase& c)
{
  return {{"type", "mc_case"},
          {"run_id", c.run_id},
          {"scenario", c.scenario},
          {"seed", c.seed},
          {"threat", record::parse(to_json(c.threat).dump())}};
}

inline McCase case_from_record(const json& j, const std::string& path)
{
  cfg::Node n(j, path);
  McCase c;
  if (n.string("type", "mc_case") != "mc_case") throw ConfigError(n.child("type"), "expected mc_case");
  c.run_id = n.string("run_id", "");
  c.scenario = n.string("scenario", "");
  c.seed = n.seed("seed", 0);
  c.threat = threat_from_json(n.at("threat"), n.child("threat"));
  n.check_no_unknown();
  if (c.scenario.empty()) throw ConfigError(n.child("scenario"), "missing scenario name");
  return c;
}

inline record mc_run_record(const McRun& run)
{
  return {{"type", "mc_run"},
          {"run_id", run.run_id},
          {"scenario", run.scenario},
          {"seed", run.seed},
          {"threat", record::parse(to_json(run.threat).dump())},
          {"NoSecurity", rec_detail::summary_json(run.no_security.summary)},
          {"SecurityAware", rec_detail::summary_json(run.security_aware.summary)},
          {"benign_NoSecurity", rec_detail::summary_json(run.benign_no_security)},
          {"benign_SecurityAware", rec_detail::summary_json(run.benign_security_aware)}};
}

inline record tune_record(int rank, const TuneResult& r)
{
  return {{"type", "tune_result"},
          {"rank", rank},
          {"objective", r.objective},
          {"agent_trust_score", r.agent_trust_score},
          {"track_trust_score", r.track_trust_score},
          {"ospa_term", r.ospa_term},
          {"trust_config", record::parse(to_json(r.config).dump())}};
}

// ---------------------------------------------------------------------------------------
// Plain-text tables

/// Fixed-width table; the first column is left aligned, the rest right aligned.
class TextTable
{
public:
  explicit TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& os) const
  {
    std::vector<std::size_t> w(header_.size(), 0);
    auto widen = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size() && i < w.size(); ++i) w[i] = std::max(w[i], r[i].size());
    };
    widen(header_);
    for (const auto& r : rows_) widen(r);
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < w.size(); ++i) {
        const std::string cell = i < r.size() ? r[i] : "";
        if (i > 0) os << "  ";
        if (i == 0)
          os << std::left << std::setw(static_cast<int>(w[i])) << cell;
        else
          os << std::right << std::setw(static_cast<int>(w[i])) << cell;
      }
      os << '\n';
    };
    line(header_);
    std::size_t total = 0;
    for (auto x : w) total += x;
    os << std::string(total + 2 * (w.size() - 1), '-') << '\n';
    for (const auto& r : rows_) line(r);
  }

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string fmt(double v, int precision = 3)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

inline std::string fmt(const std::optional<double>& v, int precision = 3) { return v ? fmt(*v, precision) : "-"; }

inline std::vector<std::string> summary_row(const std::string& label, const RunSummary& s)
{
  return {label, std::to_string(s.n_frames), fmt(s.precision), fmt(s.recall), fmt(s.f1), fmt(s.ospa),
          fmt(s.track_trust_score), fmt(s.agent_trust_score)};
}

inline std::vector<std::string> summary_header()
{
  return {"run", "frames", "precision", "recall", "f1", "ospa", "track_trust", "agent_trust"};
}

}  // namespace trustfuse
