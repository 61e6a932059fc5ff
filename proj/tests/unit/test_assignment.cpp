#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "trustfuse/assignment.hpp"
#include "trustfuse/geometry.hpp"

using namespace trustfuse;

namespace {

// Exhaustive minimum over all injective maps from the smaller side into the larger.
double brute_force_min(const CostMatrix& c)
{
  const bool transpose = c.rows() > c.cols();
  const CostMatrix m = transpose ? CostMatrix(c.transpose()) : c;
  std::vector<int> cols(static_cast<std::size_t>(m.cols()));
  std::iota(cols.begin(), cols.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) s += m(r, cols[static_cast<std::size_t>(r)]);
    best = std::min(best, s);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

double assignment_cost(const CostMatrix& c, const std::vector<int>& a)
{
  double s = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r)
    if (a[r] >= 0) s += c(static_cast<Eigen::Index>(r), a[r]);
  return s;
}

}  // namespace

TEST(Assignment, EmptyMatrix)
{
  EXPECT_TRUE(solve_assignment(CostMatrix(0, 0)).empty());
  const auto a = solve_assignment(CostMatrix(2, 0));
  EXPECT_EQ(a, (std::vector<int>{-1, -1}));
}

TEST(Assignment, SimpleSquare)
{
  CostMatrix c(3, 3);
  c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const auto a = solve_assignment(c);
  EXPECT_DOUBLE_EQ(assignment_cost(c, a), 5.0);
}

TEST(Assignment, MatchesBruteForceOnRandomRectangles)
{
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int r = dim(rng);
    const int k = dim(rng);
    CostMatrix c(r, k);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < k; ++j) c(i, j) = u(rng);
    const auto a = solve_assignment(c);
    ASSERT_EQ(static_cast<int>(a.size()), r);
    std::vector<int> used;
    int assigned = 0;
    for (int x : a) {
      if (x < 0) continue;
      ++assigned;
      used.push_back(x);
    }
    std::sort(used.begin(), used.end());
    EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end());
    EXPECT_EQ(assigned, std::min(r, k));
    EXPECT_NEAR(assignment_cost(c, a), brute_force_min(c), 1e-9);
  }
}

TEST(GatedAssignment, RespectsGate)
{
  CostMatrix c(2, 2);
  c << 0.5, 3.0, 3.0, 2.5;
  const auto g = gated_assignment(c, 2.0);
  ASSERT_EQ(g.matches.size(), 1u);
  EXPECT_EQ(g.matches[0], std::make_pair(0, 0));
  EXPECT_EQ(g.unmatched_rows, std::vector<int>{1});
  EXPECT_EQ(g.unmatched_cols, std::vector<int>{1});
}

TEST(GatedAssignment, GateBoundaryIsInclusive)
{
  CostMatrix c(1, 1);
  c << 2.0;
  EXPECT_EQ(gated_assignment(c, 2.0).matches.size(), 1u);
}

TEST(GatedAssignment, PrefersMoreAdmissibleMatches)
{
  // Row 0 is cheapest at col 0, but taking it would leave row 1 unmatched.
  CostMatrix c(2, 2);
  c << 0.1, 1.5, 1.0, 9.0;
  const auto g = gated_assignment(c, 2.0);
  EXPECT_EQ(g.matches.size(), 2u);
}

TEST(GatedAssignment, EmptySides)
{
  const auto g = gated_assignment(CostMatrix(3, 0), 2.0);
  EXPECT_EQ(g.unmatched_rows.size(), 3u);
  EXPECT_TRUE(g.matches.empty());
}

TEST(DistanceMatrix, Euclidean)
{
  const std::vector<Point2> a{{0, 0}, {1, 1}};
  const std::vector<Point2> b{{3, 4}};
  const auto id = [](const Point2& p) { return p; };
  const auto d = distance_matrix(a, b, id, id);
  EXPECT_DOUBLE_EQ(d(0, 0), 5.0);
  EXPECT_NEAR(d(1, 0), std::sqrt(13.0), 1e-12);
}
