#pragma once

#include <algorithm>
#include <stdexcept>

namespace trustfuse {

/// Lower bound kept on both Beta parameters after every trust operation.
inline constexpr double kTrustParamFloor = 1e-3;

/// Beta(alpha, beta) belief over trustworthiness in [0, 1].
struct TrustDistribution
{
  double alpha = 1.0;
  double beta = 1.0;

  static TrustDistribution make(double alpha, double beta)
  {
    if (!(alpha > 0.0) || !(beta > 0.0))
      throw std::invalid_argument("TrustDistribution: alpha and beta must be > 0");
    return {alpha, beta};
  }

  double mean() const { return alpha / (alpha + beta); }
  double precision() const { return alpha + beta; }
  double variance() const
  {
    const double s = alpha + beta;
    return alpha * beta / (s * s * (s + 1.0));
  }

  void clamp_to_floor()
  {
    alpha = std::max(alpha, kTrustParamFloor);
    beta = std::max(beta, kTrustParamFloor);
  }

  bool operator==(const TrustDistribution&) const = default;
};

}  // namespace trustfuse
