#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "trustfuse/assignment.hpp"
#include "trustfuse/fov.hpp"
#include "trustfuse/geometry.hpp"

namespace trustfuse {

using StateVector = Eigen::Vector4d;      // (x, y, vx, vy)
using StateCovariance = Eigen::Matrix4d;

struct Track
{
  int id = 0;
  StateVector state = StateVector::Zero();
  StateCovariance covariance = StateCovariance::Identity();
  int hits = 0;
  int misses = 0;
  bool confirmed = false;
  double last_update = 0.0;

  Point2 position() const { return {state(0), state(1)}; }
  Point2 velocity() const { return {state(2), state(3)}; }
  Eigen::Matrix2d position_covariance() const { return covariance.topLeftCorner<2, 2>(); }
};

/// Constant-velocity transition and its continuous white-acceleration process noise.
inline Eigen::Matrix4d cv_transition(double dt)
{
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  return f;
}

inline Eigen::Matrix4d cv_process_noise(double dt, double q)
{
  const double dt2 = dt * dt;
  const double a = q * dt2 * dt / 3.0;
  const double b = q * dt2 / 2.0;
  const double c = q * dt;
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = a; m(0, 2) = b; m(2, 0) = b; m(2, 2) = c;
  m(1, 1) = a; m(1, 3) = b; m(3, 1) = b; m(3, 3) = c;
  return m;
}

inline void kf_predict(Track& t, double dt, double q)
{
  if (dt <= 0.0) return;
  const auto f = cv_transition(dt);
  t.state = f * t.state;
  t.covariance = f * t.covariance * f.transpose() + cv_process_noise(dt, q);
}

/// Position-only Kalman measurement update with the gain scaled by `gain_scale`. The
/// Joseph form keeps the covariance valid for any gain, scaled or not.
inline void kf_update(Track& t, const Point2& z, const Eigen::Matrix2d& r, double gain_scale = 1.0)
{
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Eigen::Matrix2d s = h * t.covariance * h.transpose() + r;
  const Eigen::Matrix<double, 4, 2> k = gain_scale * (t.covariance * h.transpose() * s.inverse());
  const Eigen::Vector2d innovation(z.x - t.state(0), z.y - t.state(1));
  t.state += k * innovation;
  const Eigen::Matrix4d i_kh = Eigen::Matrix4d::Identity() - k * h;
  t.covariance = i_kh * t.covariance * i_kh.transpose() + k * r * k.transpose();
  t.covariance = 0.5 * (t.covariance + t.covariance.transpose());
}

inline double min_eigenvalue(const Eigen::Matrix4d& m)
{
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
  return es.eigenvalues().minCoeff();
}

/// Rotation of a state and covariance into a frame rotated by `angle`.
inline Track rotate_track(Track t, double angle)
{
  Eigen::Matrix4d rot = Eigen::Matrix4d::Zero();
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  rot.topLeftCorner<2, 2>() << c, -s, s, c;
  rot.bottomRightCorner<2, 2>() << c, -s, s, c;
  t.state = rot * t.state;
  t.covariance = rot * t.covariance * rot.transpose();
  return t;
}

inline Track track_to_global(const Pose2& pose, const Track& local)
{
  Track g = rotate_track(local, pose.yaw());
  g.state(0) += pose.x();
  g.state(1) += pose.y();
  return g;
}

inline Track track_to_local(const Pose2& pose, const Track& global)
{
  Track l = global;
  l.state(0) -= pose.x();
  l.state(1) -= pose.y();
  return rotate_track(l, -pose.yaw());
}

// ---------------------------------------------------------------------------------------
// Agent-local tracker

struct LocalTrackerConfig
{
  double gate = 2.0;
  int confirm_hits = 3;
  int delete_misses = 5;
  double process_noise = 1.0;  // m^2/s^3
  double measurement_sigma = 0.3;
  double initial_velocity_sigma = 5.0;
};

struct LocalTrackerState
{
  std::vector<Track> tracks;
  int next_id = 0;
  double time = 0.0;
  bool started = false;
};

/// One frame of agent-local tracking: predict, gated optimal assignment, Kalman update of
/// matched tracks, birth of tentative tracks from unmatched measurements, then the
/// confirm/delete lifecycle. Measurements and tracks share one frame.
inline LocalTrackerState local_track_step(LocalTrackerState st, const std::vector<Point2>& measurements,
                                          double time, const LocalTrackerConfig& cfg)
{
  const double dt = st.started ? time - st.time : 0.0;
  if (st.started && !(dt > 0.0)) throw std::invalid_argument("local_track_step: dt must be > 0");
  for (auto& t : st.tracks) kf_predict(t, dt, cfg.process_noise);

  const auto cost = distance_matrix(st.tracks, measurements, [](const Track& t) { return t.position(); },
                                    [](const Point2& p) { return p; });
  const auto assign = gated_assignment(cost, cfg.gate);
  const double var = cfg.measurement_sigma * cfg.measurement_sigma;
  const Eigen::Matrix2d r = var * Eigen::Matrix2d::Identity();

  for (const auto& [ti, mi] : assign.matches) {
    auto& t = st.tracks[static_cast<std::size_t>(ti)];
    kf_update(t, measurements[static_cast<std::size_t>(mi)], r);
    ++t.hits;
    t.misses = 0;
    t.last_update = time;
    if (t.hits >= cfg.confirm_hits) t.confirmed = true;
  }
  for (int ti : assign.unmatched_rows) ++st.tracks[static_cast<std::size_t>(ti)].misses;
  std::erase_if(st.tracks, [&](const Track& t) { return t.misses >= cfg.delete_misses; });

  for (int mi : assign.unmatched_cols) {
    Track t;
    t.id = st.next_id++;
    const auto& z = measurements[static_cast<std::size_t>(mi)];
    t.state << z.x, z.y, 0.0, 0.0;
    t.covariance = StateCovariance::Zero();
    const double pos_var = std::max(var, 1e-4);
    const double vel_var = cfg.initial_velocity_sigma * cfg.initial_velocity_sigma;
    t.covariance.diagonal() << pos_var, pos_var, vel_var, vel_var;
    t.hits = 1;
    t.confirmed = t.hits >= cfg.confirm_hits;
    t.last_update = time;
    st.tracks.push_back(t);
  }
  st.time = time;
  st.started = true;
  return st;
}

// ---------------------------------------------------------------------------------------
// Aggregator

/// What one agent sends per frame: pose, confirmed tracks and FOV, in the agent frame.
struct AgentReport
{
  int agent_id = 0;
  Pose2 pose;
  std::vector<Track> tracks;
  FovPolygon fov;
  double timestamp = 0.0;

  std::vector<Track> global_tracks() const
  {
    std::vector<Track> out;
    out.reserve(tracks.size());
    for (const auto& t : tracks) out.push_back(track_to_global(pose, t));
    return out;
  }
  FovPolygon global_fov() const { return transform(pose, fov); }
};

inline AgentReport make_report(int agent_id, const Pose2& pose, const LocalTrackerState& tracker,
                               const FovPolygon& fov_local, double timestamp)
{
  AgentReport r{agent_id, pose, {}, fov_local, timestamp};
  for (const auto& t : tracker.tracks)
    if (t.confirmed) r.tracks.push_back(track_to_local(pose, t));
  return r;
}

/// Aggregator track (global frame). Trust lives in the trust estimator, keyed by id.
struct AggTrack
{
  Track track;
  bool flagged = false;
  std::vector<int> contributors;  // agents fused into this track in the latest frame
};

struct AggregatorConfig
{
  double gate = 2.0;
  int confirm_hits = 1;
  int delete_misses = 5;
  double process_noise = 1.0;
};

/// Trust-derived inputs to fusion. Absent (nullptr) means unsecured fusion.
struct FusionTrust
{
  std::map<int, double> agent_mean;  // E[agent trust] by agent id
  std::map<int, double> track_mean;  // E[track trust] by aggregator track id
  double gamma = 1.0;
  double t_ignore = 0.0;

  double agent_weight(int agent_id) const
  {
    const auto it = agent_mean.find(agent_id);
    const double m = it == agent_mean.end() ? 1.0 : it->second;
    return std::pow(m, gamma);
  }
};

struct AggregatorState
{
  std::vector<AggTrack> tracks;
  int next_id = 0;
  double time = 0.0;
  bool started = false;
};

/// Flags tracks whose expected trust is below `t_ignore`; tracks without a trust
/// estimate are left unflagged.
inline void apply_thresholding(AggregatorState& st, const std::map<int, double>& track_mean, double t_ignore)
{
  for (auto& a : st.tracks) {
    const auto it = track_mean.find(a.track.id);
    a.flagged = it != track_mean.end() && it->second < t_ignore;
  }
}

/// One fusion frame: align reports into the global frame, associate each agent's tracks
/// to aggregator tracks (ascending agent id), fuse with trust-weighted gain, seed new
/// tracks, run the lifecycle and finally apply trust thresholding.
inline AggregatorState aggregate(AggregatorState st, std::vector<AgentReport> reports,
                                 const FusionTrust* trust, const AggregatorConfig& cfg)
{
  if (reports.empty()) return st;
  const double now = reports.front().timestamp;
  for (const auto& r : reports)
    if (r.timestamp != now) throw std::invalid_argument("aggregate: reports have mismatched timestamps");
  std::sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) { return a.agent_id < b.agent_id; });

  const double dt = st.started ? now - st.time : 0.0;
  for (auto& a : st.tracks) {
    kf_predict(a.track, dt, cfg.process_noise);
    a.contributors.clear();
  }

  for (const auto& report : reports) {
    const auto agent_tracks = report.global_tracks();
    const auto cost = distance_matrix(agent_tracks, st.tracks, [](const Track& t) { return t.position(); },
                                      [](const AggTrack& a) { return a.track.position(); });
    const auto assign = gated_assignment(cost, cfg.gate);
    const double w = trust ? trust->agent_weight(report.agent_id) : 1.0;
    for (const auto& [ai, gi] : assign.matches) {
      const auto& src = agent_tracks[static_cast<std::size_t>(ai)];
      auto& dst = st.tracks[static_cast<std::size_t>(gi)];
      kf_update(dst.track, src.position(), src.position_covariance(), w);
      dst.contributors.push_back(report.agent_id);
    }
    for (int ai : assign.unmatched_rows) {
      AggTrack a;
      a.track = agent_tracks[static_cast<std::size_t>(ai)];
      a.track.id = st.next_id++;
      a.track.hits = 0;
      a.track.misses = 0;
      a.track.confirmed = false;
      a.contributors.push_back(report.agent_id);
      st.tracks.push_back(a);
    }
  }

  for (auto& a : st.tracks) {
    if (a.contributors.empty()) {
      ++a.track.misses;
    } else {
      ++a.track.hits;
      a.track.misses = 0;
      a.track.last_update = now;
      if (a.track.hits >= cfg.confirm_hits) a.track.confirmed = true;
    }
  }
  std::erase_if(st.tracks, [&](const AggTrack& a) { return a.track.misses >= cfg.delete_misses; });

  if (trust)
    apply_thresholding(st, trust->track_mean, trust->t_ignore);
  else
    for (auto& a : st.tracks) a.flagged = false;

  st.time = now;
  st.started = true;
  return st;
}

/// The operating picture: confirmed, unflagged aggregator tracks.
inline std::vector<AggTrack> published_picture(const AggregatorState& st)
{
  std::vector<AggTrack> out;
  for (const auto& a : st.tracks)
    if (a.track.confirmed && !a.flagged) out.push_back(a);
  return out;
}

inline std::set<int> expected_visible(const FovPolygon& fov_global, const std::vector<Track>& tracks,
                                      double margin = 0.0)
{
  return expected_visible(fov_global, tracks, [](const Track& t) { return t.id; },
                          [](const Track& t) { return t.position(); }, margin);
}

}  // namespace trustfuse
