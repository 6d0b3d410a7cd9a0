#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lcd/symmetrization.hpp"

using namespace lcd;
constexpr double pi = std::numbers::pi;

namespace {

GridSet disc_grid(int n, Vec2 c, double r, std::size_t cells) {
  return rasterize(Disc(c, r), GridSet::polar(n, 2.0, cells, cells));
}

}  // namespace

TEST(GridSet, Validation) {
  auto g = GridSet::polar(2, 1.0, 4, 8);
  EXPECT_NO_THROW(g.validate());
  EXPECT_DOUBLE_EQ(g.a_edges.front(), -pi);
  EXPECT_DOUBLE_EQ(GridSet::polar(3, 1.0, 4, 8).a_edges.front(), 0.0);
  EXPECT_THROW(GridSet::polar(4, 1.0, 4, 8), std::invalid_argument);
  EXPECT_THROW(GridSet::polar(2, 1.0, 4, 7), std::invalid_argument);
  g.at(0, 0) = 1.5;
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g.at(0, 0) = 0.0;
  g.r_edges[2] = g.r_edges[1];
  EXPECT_THROW(g.validate(), std::invalid_argument);
  auto h = GridSet::polar(2, 1.0, 4, 8);
  h.a_edges[1] += 0.01;
  EXPECT_THROW(h.validate(), std::invalid_argument);
}

TEST(ShellMeasure, FullEmptyAndHalf) {
  const auto d = Density::constant();
  auto g = GridSet::polar(2, 2.0, 2, 16);
  EXPECT_EQ(shell_measure(g, 0, d), 0.0);
  for (std::size_t j = 0; j < 16; ++j) g.at(1, j) = 1.0;
  EXPECT_NEAR(shell_measure(g, 1, d), 2.0 * pi * 1.5, 1e-13);
  auto half = g;
  for (std::size_t j = 0; j < 16; ++j) half.at(1, j) = 0.5;
  EXPECT_NEAR(shell_measure(half, 1, d), 0.5 * shell_measure(g, 1, d), 1e-13);
  const auto q = Density::quadratic(1.0);
  EXPECT_NEAR(shell_measure(g, 1, q), std::exp(2.25) * 2.0 * pi * 1.5, 1e-12);
  auto s = GridSet::polar(3, 1.0, 1, 8);
  for (std::size_t j = 0; j < 8; ++j) s.at(0, j) = 1.0;
  EXPECT_NEAR(shell_measure(s, 0, d), 4.0 * pi * 0.25, 1e-13);
  EXPECT_THROW(shell_measure(s, 1, d), std::out_of_range);
}

TEST(Rasterize, ExactVolumeOfAlignedShapes) {
  const auto d = Density::constant();
  // Annulus with edges on the grid: fractions are exactly 0 or 1.
  const auto g = rasterize(AnnulusSector(0.5, 1.5, -pi, pi), GridSet::polar(2, 2.0, 8, 16));
  for (double v : g.occupancy) EXPECT_TRUE(v == 0.0 || v == 1.0);
  EXPECT_NEAR(weighted_volume(g, d), pi * (1.5 * 1.5 - 0.25), 1e-12);
  const auto b = rasterize(Disc({0.0, 0.0}, 1.0), GridSet::polar(3, 2.0, 8, 16));
  EXPECT_NEAR(weighted_volume(b, d), 4.0 * pi / 3.0, 1e-12);
  EXPECT_THROW(rasterize(Disc({0.0, 0.0}, 1.0), GridSet::polar(2, 2.0, 8, 16), 0), std::invalid_argument);
  EXPECT_THROW(Disc({0.0, 0.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(AnnulusSector(1.0, 0.5, 0.0, 1.0), std::invalid_argument);
}

TEST(Rasterize, OffAxisDiscArea) {
  const auto g = disc_grid(2, {1.0, 0.5}, 0.6, 256);
  EXPECT_NEAR(weighted_volume(g, Density::constant()), pi * 0.36, 1e-3 * pi * 0.36);
}

TEST(Symmetrize, CentredBallIsFixedPoint) {
  for (int n : {2, 3}) {
    const auto g = disc_grid(n, {0.0, 0.0}, 1.0, 64);
    EXPECT_EQ(symmetrize(g).occupancy, g.occupancy) << n;
  }
}

TEST(Symmetrize, ShellMeasuresPreservedAndCapShaped) {
  const auto d = Density::quadratic(1.0);
  for (int n : {2, 3}) {
    const auto g = disc_grid(n, {1.0, 0.5}, 0.6, 128);
    const auto s = symmetrize(g);
    for (std::size_t i = 0; i < g.radial_cells(); ++i) {
      const double before = shell_measure(g, i, d);
      EXPECT_NEAR(shell_measure(s, i, d), before, 1e-12 * std::max(1.0, before));
    }
    const double v = weighted_volume(g, d);
    EXPECT_NEAR(weighted_volume(s, d), v, 1e-12 * v);
    // Each shell is nonincreasing in distance from the positive e1 axis.
    const std::size_t m = s.angular_cells();
    for (std::size_t i = 0; i < s.radial_cells(); ++i) {
      if (n == 3) {
        for (std::size_t j = 1; j < m; ++j) EXPECT_LE(s.at(i, j), s.at(i, j - 1));
      } else {
        for (std::size_t k = 1; k < m / 2; ++k) {
          EXPECT_LE(s.at(i, m / 2 + k), s.at(i, m / 2 + k - 1));
          EXPECT_EQ(s.at(i, m / 2 + k), s.at(i, m / 2 - 1 - k));
        }
      }
    }
  }
}

TEST(Symmetrize, Idempotent) {
  for (int n : {2, 3})
    for (const auto& shape : symmetrization_corpus()) {
      const auto s = symmetrize(rasterize(*shape.shape, GridSet::polar(n, 2.0, 64, 64)));
      EXPECT_EQ(symmetrize(s).occupancy, s.occupancy) << shape.name << " n=" << n;
    }
}

TEST(Symmetrize, EmptyShellStaysEmpty) {
  const auto g = disc_grid(2, {1.0, 0.0}, 0.3, 64);
  const auto s = symmetrize(g);
  for (std::size_t j = 0; j < s.angular_cells(); ++j) EXPECT_EQ(s.at(0, j), 0.0);
}

TEST(GridPerimeter, CentredDisc) {
  const auto d = Density::constant();
  const auto g = disc_grid(2, {0.0, 0.0}, 1.0, 512);
  EXPECT_NEAR(grid_perimeter(g, d), 2.0 * pi, 0.01 * 2.0 * pi);
  EXPECT_EQ(grid_perimeter(symmetrize(g), d), grid_perimeter(g, d));
  const auto q = Density::quadratic(1.0);
  EXPECT_NEAR(grid_perimeter(g, q), 2.0 * pi * std::exp(1.0), 0.01 * 2.0 * pi * std::exp(1.0));
  const auto b = disc_grid(3, {0.0, 0.0}, 1.0, 256);
  EXPECT_NEAR(grid_perimeter(b, d), 4.0 * pi, 0.01 * 4.0 * pi);
  EXPECT_THROW(grid_perimeter(g, d, -1), std::invalid_argument);
}

TEST(GridPerimeter, OffCentreShapes) {
  const auto d = Density::constant();
  // Disc not centred at the origin: boundary oblique to the grid.
  EXPECT_NEAR(grid_perimeter(disc_grid(2, {1.0, 0.0}, 0.8, 256), d), 2.0 * pi * 0.8, 0.005 * 2.0 * pi * 0.8);
  // Off-centre ball on the axis.
  EXPECT_NEAR(grid_perimeter(disc_grid(3, {0.3, 0.0}, 0.8, 256), d), 4.0 * pi * 0.64, 0.005 * 4.0 * pi * 0.64);
  // Two disjoint components add.
  const Union two({std::make_shared<const Disc>(Vec2{1.0, 0.0}, 0.4), std::make_shared<const Disc>(Vec2{-1.0, 0.0}, 0.4)});
  const auto g = rasterize(two, GridSet::polar(2, 2.0, 256, 256));
  EXPECT_NEAR(grid_perimeter(g, d), 2.0 * 2.0 * pi * 0.4, 0.01 * 2.0 * 2.0 * pi * 0.4);
}

TEST(GridPerimeter, SharpRuleWithoutSmoothing) {
  // Grid-aligned annulus: the sharp-interface rule is exact up to the midpoint radius.
  const auto g = rasterize(AnnulusSector(0.5, 1.5, -pi, pi), GridSet::polar(2, 2.0, 64, 256));
  EXPECT_NEAR(grid_perimeter(g, Density::constant(), 0), 2.0 * pi * 2.0, 1e-3);
}

TEST(GridPerimeter, OffAxisDiscNotIncreased) {
  const auto d = Density::quadratic(1.0);
  for (int n : {2, 3}) {
    const auto g = disc_grid(n, {1.0, 0.5}, 0.6, 256);
    EXPECT_LE(grid_perimeter(symmetrize(g), d), grid_perimeter(g, d) * 1.02) << n;
  }
}

TEST(Corpus, TenShapesInsideDomain) {
  const auto c = symmetrization_corpus();
  EXPECT_EQ(c.size(), 10u);
  for (const auto& s : c) {
    EXPECT_FALSE(s.shape->contains({2.0, 0.0}));
    EXPECT_FALSE(s.shape->contains({-2.0, 0.0}));
  }
}
