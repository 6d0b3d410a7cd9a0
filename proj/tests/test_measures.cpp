#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lcd/measures.hpp"

using namespace lcd;
constexpr double pi = std::numbers::pi;
constexpr double e = std::numbers::e;

namespace {

Trajectory ball(int n, const Density& d, double R0) {
  auto cfg = ShootingConfig::make(n, d, R0, ball_curvature(d, n, R0));
  cfg.tolerance = 1e-12;
  return shoot(cfg);
}

/// Green's theorem oracle: the half-region integral of y^(n-2) e^g equals
/// the line integral of Phi dy with Phi(x, y) = y^(n-2) int_0^x e^g(|(t,y)|) dt.
double green_volume(const Trajectory& t, int n, const Density& d) {
  auto phi = [&](double x, double y) {
    return std::pow(y, n - 2) * quad::adaptive([&](double u) { return d.weight(std::hypot(u, y)); }, 0.0, x, 1e-13);
  };
  const double L = t.length();
  const int panels = 400;
  double acc = 0.0;
  for (int i = 0; i < panels; ++i) {
    acc += quad::fixed(
        [&](double s) {
          const auto st = t.state_at(s);
          return phi(st.x, std::max(st.y, 0.0)) * std::sin(st.theta);
        },
        L * i / panels, L * (i + 1) / panels, quad::rule(10));
  }
  return sphere_area(n - 2) * acc;
}

}  // namespace

TEST(SphereArea, Values) {
  EXPECT_DOUBLE_EQ(sphere_area(0), 2.0);
  EXPECT_NEAR(sphere_area(1), 2 * pi, 1e-14);
  EXPECT_NEAR(sphere_area(2), 4 * pi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 2 * pi * pi, 1e-13);
  EXPECT_THROW(sphere_area(-1), std::invalid_argument);
}

TEST(BallMeasures, Examples) {
  const auto disc = ball_measures(1, 2, Density::constant());
  EXPECT_NEAR(disc.perimeter, 2 * pi, 1e-14);
  EXPECT_NEAR(disc.volume, pi, 1e-14);
  // Independent closed forms: int_0^1 r e^{r^2} dr = (e - 1)/2.
  const auto q = ball_measures(1, 2, Density::quadratic(1));
  EXPECT_NEAR(q.perimeter, 2 * pi * e, 1e-13);
  EXPECT_NEAR(q.volume, pi * (e - 1), 1e-13);
  EXPECT_NEAR(q.perimeter, 17.0794684453, 1e-9);
  EXPECT_NEAR(q.volume, 5.3981415691, 1e-9);
  const auto s = ball_measures(2, 3, Density::constant());
  EXPECT_NEAR(s.perimeter, 16 * pi, 1e-13);
  EXPECT_NEAR(s.volume, 32 * pi / 3, 1e-13);
  EXPECT_NEAR(s.sigma, 4 * pi, 1e-14);
  const auto seg = ball_measures(1.5, 1, Density::constant());
  EXPECT_NEAR(seg.perimeter, 2.0, 1e-15);
  EXPECT_NEAR(seg.volume, 3.0, 1e-14);
  EXPECT_THROW(ball_measures(0, 2, Density::constant()), std::invalid_argument);
  EXPECT_THROW(ball_measures(1, 0, Density::constant()), std::invalid_argument);
}

TEST(TrajectoryMeasures, CircleExamples) {
  EXPECT_NEAR(trajectory_perimeter(ball(2, Density::constant(), 1), 2, Density::constant()), 2 * pi, 1e-9);
  EXPECT_NEAR(trajectory_perimeter(ball(3, Density::constant(), 1), 3, Density::constant()), 4 * pi, 1e-9);
  const auto q = ball(2, Density::quadratic(1), 1);
  EXPECT_NEAR(trajectory_perimeter(q, 2, Density::quadratic(1)) / (2 * pi * e), 1.0, 1e-8);
  EXPECT_NEAR(trajectory_volume(q, 2, Density::quadratic(1)) / (pi * (e - 1)), 1.0, 1e-8);
  EXPECT_NEAR(trajectory_volume(ball(3, Density::constant(), 1), 3, Density::constant()), 4 * pi / 3, 1e-9);
}

TEST(TrajectoryMeasures, PlateauInteriorCircleHasUnitWeight) {
  const Density d = Density::plateau(2, 1);
  const auto t = shoot(ShootingConfig::make(2, d, 1.5, 1.0));
  ASSERT_EQ(classify_closure(t).outcome, ClosureOutcome::closed_smooth);
  EXPECT_NEAR(trajectory_volume(t, 2, d), pi, 1e-9);
  EXPECT_NEAR(trajectory_perimeter(t, 2, d), 2 * pi, 1e-9);
}

TEST(TrajectoryMeasures, OracleEquivalenceOnRandomBalls) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uR(0.4, 2.0);
  std::uniform_int_distribution<int> un(2, 4), uk(0, 2);
  for (int i = 0; i < 10; ++i) {
    const double R = uR(rng);
    const int n = un(rng);
    const int k = uk(rng);
    const Density d = k == 0 ? Density::constant() : k == 1 ? Density::quadratic(1) : Density::cosh(1);
    const auto t = ball(n, d, R);
    const auto ref = ball_measures(R, n, d);
    EXPECT_NEAR(trajectory_perimeter(t, n, d) / ref.perimeter, 1.0, 1e-6) << R << " " << n << " " << k;
    EXPECT_NEAR(trajectory_volume(t, n, d) / ref.volume, 1.0, 1e-6) << R << " " << n << " " << k;
  }
}

TEST(TrajectoryMeasures, VolumeMatchesGreenOracleOffCentre) {
  // Off-centre circle from the plateau density, weighted by a density that
  // varies across it.
  const auto t = shoot(ShootingConfig::make(3, Density::plateau(2, 1), 1.5, 2.0));
  ASSERT_EQ(classify_closure(t).outcome, ClosureOutcome::closed_smooth);
  for (int n : {2, 3, 4}) {
    const Density w = Density::quadratic(0.7);
    EXPECT_NEAR(trajectory_volume(t, n, w) / green_volume(t, n, w), 1.0, 1e-8) << n;
  }
  for (int n : {2, 3}) {
    const auto b = ball(n, Density::cosh(1), 1.3);
    EXPECT_NEAR(trajectory_volume(b, n, Density::cosh(1)) / green_volume(b, n, Density::cosh(1)), 1.0, 1e-8);
  }
}

TEST(TrajectoryMeasures, StripDoublingConverges) {
  const auto t = ball(3, Density::quadratic(1), 1.5);
  const auto v = trajectory_volume_detailed(t, 3, Density::quadratic(1), 1e-8);
  EXPECT_LT(v.last_relative_change, 1e-8);
  const auto finer = trajectory_volume_detailed(t, 3, Density::quadratic(1), 1e-13);
  EXPECT_NEAR(v.volume / finer.volume, 1.0, 1e-8);
}

TEST(TrajectoryMeasures, RejectsOpenCurves) {
  const auto open = shoot(ShootingConfig::make(2, Density::quadratic(1), 1.0, 2.4));
  EXPECT_THROW(trajectory_volume(open, 2, Density::quadratic(1)), std::invalid_argument);
  EXPECT_THROW(trajectory_perimeter(open, 1, Density::quadratic(1)), std::invalid_argument);
}

TEST(TrajectoryMeasures, SelfIntersectionDetection) {
  using measures_detail::polyline_self_intersects;
  EXPECT_FALSE(polyline_self_intersects({{1, 0}, {0, 1}, {-1, 0}}));
  EXPECT_TRUE(polyline_self_intersects({{0, 0}, {2, 2}, {2, 0}, {0, 2}}));
  EXPECT_FALSE(polyline_self_intersects({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}}));
}

TEST(Profile, Examples) {
  const auto flat = profile(Density::constant(), 2, {pi});
  EXPECT_NEAR(flat[0].perimeter, 2 * pi, 1e-10);
  EXPECT_NEAR(flat[0].radius, 1.0, 1e-11);
  for (double V : {0.1, 1.0, 7.0}) EXPECT_NEAR(profile(Density::constant(), 2, {V})[0].perimeter, 2 * std::sqrt(pi * V), 1e-9);
  const auto q = profile(Density::quadratic(1), 2, {pi * (e - 1)});
  EXPECT_NEAR(q[0].perimeter, 2 * pi * e, 1e-9);
  EXPECT_THROW(profile(Density::constant(), 2, {}), std::invalid_argument);
  EXPECT_THROW(profile(Density::constant(), 2, {1.0, 0.5}), std::invalid_argument);
  EXPECT_THROW(profile(Density::constant(), 2, {-1.0}), std::invalid_argument);
}

TEST(Profile, Monotone) {
  std::vector<double> V;
  for (int i = 1; i <= 40; ++i) V.push_back(0.05 * i * i);
  for (const auto& d : {Density::constant(), Density::quadratic(1), Density::cosh(1), Density::plateau(1, 1)}) {
    for (int n : {2, 3}) {
      const auto p = profile(d, n, V);
      for (std::size_t i = 1; i < p.size(); ++i) {
        EXPECT_GE(p[i].perimeter - p[i - 1].perimeter, -1e-10);
        EXPECT_GT(p[i].radius, p[i - 1].radius);
      }
    }
  }
}
