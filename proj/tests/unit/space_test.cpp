#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "bdswap/configuration.hpp"
#include "bdswap/stats.hpp"

namespace bdswap {
namespace {

Point at(PointId id, double x, double y) { return Point{id, {x, y, 0.0}}; }

TEST(Window, VolumeAndValidation) {
  EXPECT_DOUBLE_EQ(Window::unit_square().volume(), 1.0);
  EXPECT_DOUBLE_EQ(Window(2, {2.0, 1.0}).volume(), 2.0);
  EXPECT_DOUBLE_EQ(Window(3, {0.5}).volume(), 0.125);
  EXPECT_THROW(Window(2, {1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(Window(4, {1.0}), std::invalid_argument);
  EXPECT_THROW(Window(0, {1.0}), std::invalid_argument);
}

TEST(Distance, Examples) {
  const Window plain;
  const Window torus(2, {1.0}, true);
  EXPECT_EQ(distance(at(0, 0.3, 0.4), at(1, 0.3, 0.4), plain), 0.0);
  EXPECT_NEAR(distance(at(0, 0.1, 0.5), at(1, 0.2, 0.5), plain), 0.1, 1e-15);
  EXPECT_NEAR(distance(at(0, 0.05, 0.5), at(1, 0.95, 0.5), torus), 0.1, 1e-15);
  EXPECT_NEAR(distance(at(0, 0.05, 0.5), at(1, 0.95, 0.5), plain), 0.9, 1e-15);
}

TEST(Distance, SymmetricOnRandomPairs) {
  RandomStream s(11, StreamPurpose::test);
  for (bool t : {false, true}) {
    const Window w(2, {1.0, 2.0}, t);
    for (int i = 0; i < 1000; ++i) {
      const Point p{0, draw_uniform_coords(w, s)}, q{1, draw_uniform_coords(w, s)};
      EXPECT_EQ(distance(p, q, w), distance(q, p, w));
    }
  }
}

TEST(DrawUniformPoint, DeterministicForSeed) {
  const Window w;
  RandomStream a(123, StreamPurpose::test), b(123, StreamPurpose::test);
  IdCounter ia, ib;
  const Point p = draw_uniform_point(w, a, ia);
  const Point q = draw_uniform_point(w, b, ib);
  EXPECT_EQ(p.id, q.id);
  EXPECT_EQ(p.coords, q.coords);
  EXPECT_EQ(ia.peek(), 1u);
}

TEST(DrawUniformPoint, MeanIsCentre) {
  const Window w;
  RandomStream s(5, StreamPurpose::test);
  IdCounter ids;
  const int n = 1000000;
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto p = draw_uniform_point(w, s, ids);
    sx += p.coords[0];
    sy += p.coords[1];
  }
  const double tol = 3.0 * (1.0 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(sx / n, 0.5, tol);
  EXPECT_NEAR(sy / n, 0.5, tol);
}

TEST(DrawUniformPoint, SupportAndUniformity) {
  const Window w(2, {2.0, 1.0});
  RandomStream s(6, StreamPurpose::test);
  IdCounter ids;
  std::vector<double> xs, ys;
  for (int i = 0; i < 100000; ++i) {
    const auto p = draw_uniform_point(w, s, ids);
    ASSERT_GE(p.coords[0], 0.0);
    ASSERT_LE(p.coords[0], 2.0);
    ASSERT_GE(p.coords[1], 0.0);
    ASSERT_LE(p.coords[1], 1.0);
    xs.push_back(p.coords[0] / 2.0);
    ys.push_back(p.coords[1]);
  }
  EXPECT_GT(stats::ks_uniform(xs).p_value, 1e-3);
  EXPECT_GT(stats::ks_uniform(ys).p_value, 1e-3);
}

TEST(PoissonPointProcess, ZeroIntensityIsEmpty) {
  RandomStream s(1, StreamPurpose::test);
  IdCounter ids;
  EXPECT_TRUE(poisson_point_process(Window{}, 0.0, s, ids).empty());
  EXPECT_THROW(poisson_point_process(Window{}, -1.0, s, ids), std::invalid_argument);
}

TEST(PoissonPointProcess, CountMeanAndVariance) {
  std::vector<double> counts;
  const Window w;
  for (int rep = 0; rep < 2000; ++rep) {
    RandomStream s(static_cast<std::uint64_t>(rep), StreamPurpose::test);
    IdCounter ids;
    const auto x = poisson_point_process(w, 50.0, s, ids);
    for (const auto& p : x) ASSERT_TRUE(w.contains(p.coords));
    counts.push_back(static_cast<double>(x.size()));
  }
  EXPECT_NEAR(stats::mean(counts), 50.0, 3.0 * std::sqrt(50.0 / 2000.0));
  EXPECT_NEAR(stats::variance(counts), 50.0, 5.0);
}

TEST(BallArea, Examples) {
  EXPECT_EQ(ball_area(0.0, Window{}), 0.0);
  EXPECT_NEAR(ball_area(0.1, Window{}), 0.0314159, 1e-7);
  EXPECT_DOUBLE_EQ(ball_area(0.1, Window(1, {1.0})), 0.2);
  EXPECT_NEAR(ball_area(0.5, Window(3, {1.0})), std::numbers::pi / 6.0, 1e-15);
  EXPECT_THROW(ball_area(-1.0, Window{}), std::invalid_argument);
}

TEST(Configuration, InsertEraseAndLookup) {
  const Window w;
  Configuration c(w, 0.1);
  c.insert(at(3, 0.1, 0.1));
  c.insert(at(1, 0.5, 0.5));
  c.insert(at(2, 0.12, 0.1));
  EXPECT_THROW(c.insert(at(1, 0.9, 0.9)), std::invalid_argument);
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.within({0.1, 0.1, 0}, 0.05, w), (std::vector<PointId>{2, 3}));
  EXPECT_TRUE(c.erase(3));
  EXPECT_FALSE(c.erase(3));
  EXPECT_EQ(c.within({0.1, 0.1, 0}, 0.05, w), (std::vector<PointId>{2}));
  EXPECT_EQ(c.ids(), (std::vector<PointId>{1, 2}));
}

// Grid-backed range queries must match a brute-force scan exactly.
TEST(Configuration, GridQueryMatchesBruteForce) {
  RandomStream s(77, StreamPurpose::test);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + s.index_below(3);
    const bool torus = s.uniform() < 0.5;
    const Window w(dim, {0.5 + s.uniform(), 0.5 + s.uniform(), 0.5 + s.uniform()}, torus);
    const double radius = 0.02 + 0.6 * s.uniform();
    Configuration grid(w, radius);
    Configuration plain;
    IdCounter ids;
    const auto n = s.index_below(60);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = draw_uniform_point(w, s, ids);
      grid.insert(p);
      plain.insert(p);
    }
    // Churn to exercise removals from grid cells.
    for (std::size_t i = 0; i < n / 3; ++i) {
      const PointId victim = s.index_below(ids.peek() + 1);
      grid.erase(victim);
      plain.erase(victim);
    }
    for (int q = 0; q < 10; ++q) {
      const Coords c = draw_uniform_coords(w, s);
      std::vector<PointId> brute;
      for (const auto& p : plain) {
        if (distance(p.coords, c, w) <= radius) brute.push_back(p.id);
      }
      std::sort(brute.begin(), brute.end());
      ASSERT_EQ(grid.within(c, radius, w), brute) << "trial " << trial;
    }
  }
}

}  // namespace
}  // namespace bdswap
