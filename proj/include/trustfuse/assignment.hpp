#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace trustfuse {

/// Dense cost matrix, rows x cols.
using CostMatrix = Eigen::MatrixXd;

/// Minimum-cost rectangular assignment (Hungarian method with row potentials and
/// shortest augmenting paths, the Jonker-Volgenant formulation). Every row of the
/// smaller dimension is assigned. Returns, for each row, the assigned column or -1.
inline std::vector<int> solve_assignment(const CostMatrix& cost)
{
  const auto rows = static_cast<int>(cost.rows());
  const auto cols = static_cast<int>(cost.cols());
  std::vector<int> row_to_col(static_cast<std::size_t>(rows), -1);
  if (rows == 0 || cols == 0) return row_to_col;

  const bool transposed = rows > cols;
  const CostMatrix a = transposed ? CostMatrix(cost.transpose()) : cost;
  const int n = static_cast<int>(a.rows());  // n <= m
  const int m = static_cast<int>(a.cols());
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based arrays; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (int j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transposed)
      row_to_col[static_cast<std::size_t>(j - 1)] = p[j] - 1;
    else
      row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
  }
  return row_to_col;
}

struct GatedAssignment
{
  std::vector<std::pair<int, int>> matches;  // (row, col)
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

/// Optimal assignment restricted to pairs with cost <= gate. Out-of-gate pairs get a
/// prohibitive cost, so the solver first maximizes the number of admissible matches and
/// then minimizes their total cost.
inline GatedAssignment gated_assignment(const CostMatrix& cost, double gate)
{
  GatedAssignment out;
  const auto rows = static_cast<int>(cost.rows());
  const auto cols = static_cast<int>(cost.cols());
  if (rows == 0 || cols == 0) {
    for (int r = 0; r < rows; ++r) out.unmatched_rows.push_back(r);
    for (int c = 0; c < cols; ++c) out.unmatched_cols.push_back(c);
    return out;
  }
  const double forbidden = 1e6 * (1.0 + gate);
  CostMatrix padded = cost.unaryExpr([&](double c) { return c <= gate ? c : forbidden; });
  const auto row_to_col = solve_assignment(padded);
  std::vector<char> col_used(static_cast<std::size_t>(cols), 0);
  for (int r = 0; r < rows; ++r) {
    const int c = row_to_col[static_cast<std::size_t>(r)];
    if (c >= 0 && cost(r, c) <= gate) {
      out.matches.emplace_back(r, c);
      col_used[static_cast<std::size_t>(c)] = 1;
    } else {
      out.unmatched_rows.push_back(r);
    }
  }
  for (int c = 0; c < cols; ++c)
    if (!col_used[static_cast<std::size_t>(c)]) out.unmatched_cols.push_back(c);
  return out;
}

/// Pairwise Euclidean distance matrix between two point lists.
template <typename PointsA, typename PointsB, typename GetA, typename GetB>
CostMatrix distance_matrix(const PointsA& as, const PointsB& bs, GetA get_a, GetB get_b)
{
  CostMatrix d(static_cast<Eigen::Index>(as.size()), static_cast<Eigen::Index>(bs.size()));
  Eigen::Index i = 0;
  for (const auto& a : as) {
    Eigen::Index j = 0;
    const auto pa = get_a(a);
    for (const auto& b : bs) {
      const auto pb = get_b(b);
      d(i, j++) = std::hypot(pa.x - pb.x, pa.y - pb.y);
    }
    ++i;
  }
  return d;
}

}  // namespace trustfuse
