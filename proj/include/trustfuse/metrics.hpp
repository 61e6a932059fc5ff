#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "trustfuse/assignment.hpp"
#include "trustfuse/geometry.hpp"
#include "trustfuse/trust_distribution.hpp"

namespace trustfuse {

inline constexpr double kMetricGate = 2.0;

struct AssignmentScores
{
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
};

/// Precision, recall and F1 from a gated optimal assignment of estimates to truths.
/// Empty estimates and empty truths score (1, 1, 1); any other 0/0 ratio scores 0.
inline AssignmentScores assignment_metrics(const std::vector<Point2>& estimates, const std::vector<Point2>& truths,
                                           double gate = kMetricGate)
{
  AssignmentScores s;
  if (estimates.empty() && truths.empty()) {
    s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  const auto cost = distance_matrix(estimates, truths, [](const Point2& p) { return p; },
                                    [](const Point2& p) { return p; });
  const auto a = gated_assignment(cost, gate);
  s.true_positives = static_cast<int>(a.matches.size());
  s.false_positives = static_cast<int>(a.unmatched_rows.size());
  s.false_negatives = static_cast<int>(a.unmatched_cols.size());
  const int tp = s.true_positives;
  s.precision = tp + s.false_positives > 0 ? static_cast<double>(tp) / (tp + s.false_positives) : 0.0;
  s.recall = tp + s.false_negatives > 0 ? static_cast<double>(tp) / (tp + s.false_negatives) : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

/// Optimal sub-pattern assignment distance with cutoff `c` and order `p`:
///   ( (1/n) * ( min_perm sum min(d, c)^p + c^p * (n - m) ) )^(1/p),
/// n = max(|X|, |Y|), m = min(|X|, |Y|); zero when both sets are empty.
inline double ospa(const std::vector<Point2>& x, const std::vector<Point2>& y, double c = 10.0, double p = 1.0)
{
  if (!(c > 0.0)) throw std::invalid_argument("ospa: cutoff c must be > 0");
  if (!(p >= 1.0)) throw std::invalid_argument("ospa: order p must be >= 1");
  // Canonical argument order so that ospa(x, y) and ospa(y, x) are bitwise equal.
  const auto less = [](const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); };
  const bool swap = x.size() != y.size() ? x.size() > y.size()
                                         : std::lexicographical_compare(y.begin(), y.end(), x.begin(), x.end(), less);
  const auto& estimates = swap ? y : x;
  const auto& truths = swap ? x : y;
  const auto n = std::max(estimates.size(), truths.size());
  const auto m = std::min(estimates.size(), truths.size());
  if (n == 0) return 0.0;
  double total = std::pow(c, p) * static_cast<double>(n - m);
  if (m > 0) {
    CostMatrix cost(static_cast<Eigen::Index>(estimates.size()), static_cast<Eigen::Index>(truths.size()));
    for (std::size_t i = 0; i < estimates.size(); ++i)
      for (std::size_t j = 0; j < truths.size(); ++j)
        cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            std::pow(std::min(distance(estimates[i], truths[j]), c), p);
    const auto assign = solve_assignment(cost);
    for (std::size_t i = 0; i < assign.size(); ++i)
      if (assign[i] >= 0) total += cost(static_cast<Eigen::Index>(i), assign[i]);
  }
  return std::pow(total / static_cast<double>(n), 1.0 / p);
}

enum class TrustTarget { Trusted, Distrusted };

/// Area between the CDF of `trust` and the CDF of the ideal binary target, which reduces
/// to the mean (distrusted target) or one minus the mean (trusted target).
inline double trust_distance(const TrustDistribution& trust, TrustTarget target)
{
  return target == TrustTarget::Distrusted ? trust.mean() : 1.0 - trust.mean();
}

inline double track_trust_score(const TrustDistribution& trust, TrustTarget target)
{
  return 1.0 - trust_distance(trust, target);
}

/// Targets for every estimate: trusted iff assigned to a truth within the gate
/// (distance <= gate).
inline std::vector<TrustTarget> track_trust_targets(const std::vector<Point2>& estimates,
                                                    const std::vector<Point2>& truths, double gate = kMetricGate)
{
  std::vector<TrustTarget> out(estimates.size(), TrustTarget::Distrusted);
  const auto cost = distance_matrix(estimates, truths, [](const Point2& p) { return p; },
                                    [](const Point2& p) { return p; });
  for (const auto& [i, j] : gated_assignment(cost, gate).matches) out[static_cast<std::size_t>(i)] = TrustTarget::Trusted;
  return out;
}

/// Single-track form: with no competing estimates the assignment reduces to the nearest
/// truth within the gate.
inline TrustTarget track_trust_target(const Point2& estimate, const std::vector<Point2>& truths,
                                      double gate = kMetricGate)
{
  return track_trust_targets({estimate}, truths, gate).front();
}

enum class AgentTargetMode { F1Threshold, Oracle };

/// Agent target from its local tracking quality (F1 > threshold) or, in oracle mode,
/// from membership in the attacked set.
inline TrustTarget agent_trust_target(const std::vector<Point2>& agent_tracks, const std::vector<Point2>& visible_truths,
                                      double f1_threshold, AgentTargetMode mode = AgentTargetMode::F1Threshold,
                                      bool attacked = false, double gate = kMetricGate)
{
  if (mode == AgentTargetMode::Oracle) return attacked ? TrustTarget::Distrusted : TrustTarget::Trusted;
  if (!(f1_threshold > 0.0 && f1_threshold < 1.0))
    throw std::invalid_argument("agent_trust_target: f1_threshold must be in (0,1)");
  return assignment_metrics(agent_tracks, visible_truths, gate).f1 > f1_threshold ? TrustTarget::Trusted
                                                                                   : TrustTarget::Distrusted;
}

}  // namespace trustfuse
