#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lcd/comparisons.hpp"

using namespace lcd;
constexpr double pi = std::numbers::pi;

namespace {

using Arc = ArcGraph;

std::vector<double> uniform(double a, double b, int m) {
  std::vector<double> xs;
  for (int i = 0; i < m; ++i) xs.push_back(a + (b - a) * i / m);
  return xs;
}

Trajectory shot(int n, const Density& d, double R0, double c) {
  return shoot(ShootingConfig::make(n, d, R0, c));
}

}  // namespace

TEST(CurvatureComparison, EqualGraphsHoldWithEquality) {
  const Arc arc(1.0, 0.5, 1.0, 0.6);
  const auto f = arc.graph(0.0, 0.5, uniform(0.0, 0.5, 200));
  const auto r = curvature_comparison_verify(f, f);
  EXPECT_TRUE(r.applicable);
  EXPECT_TRUE(r.passed);
  EXPECT_FALSE(r.strict_gap);
  EXPECT_EQ(r.max_value_excess, 0.0);
  EXPECT_EQ(r.max_angle_deficit, 0.0);
}

TEST(CurvatureComparison, InternallyTangentArcs) {
  // Radii 2 and 1 sharing the point and tangent at b.
  const double a = 0.0, b = 0.5;
  const auto xs = uniform(a, b, 400);
  const auto f = Arc(2.0, b, 1.0, 0.6).graph(a, b, xs);
  const auto g = Arc(1.0, b, 1.0, 0.6).graph(a, b, xs);
  const auto r = curvature_comparison_verify(f, g);
  ASSERT_TRUE(r.applicable);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.strict_gap);
  EXPECT_GT(r.phi, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_LE(f.value[i], g.value[i]);
    EXPECT_GE(f.theta(i), g.theta(i));
  }
  // Independent value at a: both angles follow sin theta = (x - xc) / R.
  const double tf = std::asin((a - (b - 2.0 * std::sin(0.6))) / 2.0);
  const double tg = std::asin((a - (b - std::sin(0.6))) / 1.0);
  EXPECT_NEAR(r.phi, tf - tg, 1e-12);
}

TEST(CurvatureComparison, TangentLineBelowArc) {
  const double a = 0.0, b = 0.5, tb = 0.6;
  const auto xs = uniform(a, b, 300);
  const auto f = make_graph(
      a, b, xs, [&](double x) { return 1.0 + std::tan(tb) * (x - b); }, [&](double) { return std::tan(tb); },
      [](double) { return 0.0; });
  const auto g = Arc(1.0, b, 1.0, tb).graph(a, b, xs);
  const auto r = curvature_comparison_verify(f, g);
  ASSERT_TRUE(r.applicable);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.strict_gap);
  EXPECT_LT(r.max_value_excess, 0.0);
}

TEST(CurvatureComparison, StrictBoundaryData) {
  // f below g at b and steeper there, kappa_f = 1 <= kappa_g = 2.
  const double a = 0.3, b = 0.5;
  const auto xs = uniform(a, b, 300);
  const auto f = Arc(1.0, b, 0.9, 0.7).graph(a, b, xs);
  const auto g = Arc(0.5, b, 1.0, 0.6).graph(a, b, xs);
  const auto r = curvature_comparison_verify(f, g);
  ASSERT_TRUE(r.applicable);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_value_excess, -0.09);
  EXPECT_GT(r.phi, 0.1);
}

TEST(CurvatureComparison, LibraryArcCasesPass) {
  const auto cases = arc_comparison_cases(300);
  ASSERT_EQ(cases.size(), 3u);
  for (const auto& c : cases) {
    const auto r = curvature_comparison_verify(c.f, c.g);
    EXPECT_TRUE(r.applicable) << c.name;
    EXPECT_TRUE(r.passed) << c.name;
    EXPECT_TRUE(r.strict_gap) << c.name;
  }
}

TEST(CurvatureComparison, ViolatedHypothesesAreInapplicable) {
  const double a = 0.0, b = 0.5;
  const auto xs = uniform(a, b, 100);
  const auto f = Arc(1.0, b, 1.0, 0.6).graph(a, b, xs);
  const auto g = Arc(2.0, b, 1.0, 0.6).graph(a, b, xs);
  const auto r = curvature_comparison_verify(f, g);
  EXPECT_FALSE(r.applicable);
  EXPECT_TRUE(r.passed);
  ASSERT_FALSE(r.hypothesis_failures.empty());
  EXPECT_NE(r.hypothesis_failures.front().find("kappa_f > kappa_g"), std::string::npos);
  EXPECT_THROW(curvature_comparison_verify(f, Arc(1.0, b, 1.0, 0.6).graph(a, b, uniform(a, b, 50))),
               std::invalid_argument);
}

TEST(CurvatureComparison, StableUnderRefinement) {
  const double a = 0.0, b = 0.5;
  auto run = [&](int m) {
    const auto xs = uniform(a, b, m);
    return curvature_comparison_verify(Arc(2.0, b, 1.0, 0.6).graph(a, b, xs), Arc(1.0, b, 1.0, 0.6).graph(a, b, xs));
  };
  const auto coarse = run(200), fine = run(400);
  EXPECT_EQ(coarse.passed, fine.passed);
  EXPECT_LT(std::abs(coarse.phi - fine.phi), 1e-6);
}

TEST(CurvatureComparison, SinThetaDerivativeIsCurvature) {
  const double a = 0.0, b = 0.5;
  const auto xs = uniform(a, b, 2000);
  EXPECT_LT(sin_theta_identity_residual(Arc(2.0, b, 1.0, 0.6).graph(a, b, xs)), 1e-6);
  EXPECT_LT(sin_theta_identity_residual(Arc(0.7, b, 1.0, 0.9).graph(a, b, xs)), 1e-6);
}

TEST(Admissible, SymmetricPairIsEqualityCase) {
  const auto p = symmetric_pair(1.0, 3 * pi / 4);
  EXPECT_NEAR(p.x1, 1.0, 1e-15);
  const auto adm = is_admissible(p);
  EXPECT_TRUE(adm.admissible);
  EXPECT_NEAR(adm.a1, 0.0, 1e-15);
  EXPECT_NEAR(adm.r1, std::sqrt(2.0), 1e-14);
  const auto r = h1_comparison_verify(p);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.equality);
  EXPECT_TRUE(r.equality_case);
  EXPECT_NEAR(r.theta1, 0.0, 1e-14);
  EXPECT_NEAR(r.theta2, 0.0, 1e-14);
}

TEST(Admissible, Diagnostics) {
  const Vec2 v1{-1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
  AdmissiblePair p{1.0, -1.0, 1.0, v1, {-std::cos(0.3), -std::sin(0.3)}};
  auto r = is_admissible(p);
  EXPECT_NEAR(r.a1, 0.0, 1e-15);
  EXPECT_NEAR(r.r1, std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(r.r2, 1.0 / std::cos(0.3), 1e-14);
  // Same circle data as the generic canonical circle.
  const auto c2 = canonical_circle(CurveState{0.0, p.x2, p.y, std::atan2(p.v2.y, p.v2.x)});
  EXPECT_NEAR(r.a2, c2.center_x, 1e-14);
  EXPECT_NEAR(r.r2, c2.radius, 1e-14);
  EXPECT_FALSE(r.admissible);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0], "r2 < r1");

  p = {0.5, -1.0, 1.0, v1, {v1.x, -v1.y}};
  r = is_admissible(p);
  EXPECT_FALSE(r.admissible);
  EXPECT_EQ(r.failures[0], "a1 < 0");

  p = {1.5, -1.0, 1.0, v1, {v1.x, -v1.y}};
  r = is_admissible(p);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0], "x1 - a1 < a1 - x2");
}

TEST(Admissible, QuadrantBoundariesRejected) {
  AdmissiblePair p{1.0, -1.0, 1.0, {-1.0, 0.0}, {-std::sqrt(0.5), -std::sqrt(0.5)}};
  EXPECT_THROW(is_admissible(p), std::invalid_argument);
  p.v1 = {-std::sqrt(0.5), std::sqrt(0.5)};
  p.v2 = {0.0, -1.0};
  EXPECT_THROW(is_admissible(p), std::invalid_argument);
  p.v2 = {-std::sqrt(0.5), -std::sqrt(0.5)};
  p.x1 = -2.0;
  EXPECT_THROW(is_admissible(p), std::invalid_argument);
}

TEST(H1Comparison, BruteForceGridIsStrictOffOrigin) {
  const auto g = h1_comparison_grid(symmetric_pair(1.0, 3 * pi / 4), 20, 0.5);
  EXPECT_EQ(g.cells.size(), 8000u);
  EXPECT_TRUE(g.origin_equality);
  EXPECT_EQ(g.non_strict_off_origin, 0u);
  EXPECT_EQ(g.strict_cells, 7999u);
  EXPECT_TRUE(g.passed);
  for (const auto& c : g.cells) EXPECT_TRUE(c.report.admissibility.admissible);
}

TEST(H1Comparison, SmallShiftIsStrict) {
  const auto r = h1_comparison_verify(perturb_pair(symmetric_pair(1.0, 3 * pi / 4), 0.1, 0.0, 0.0));
  EXPECT_TRUE(r.passed);
  EXPECT_GT(r.dot1, r.dot2);
  // Angles from the integral of y / (t^2 + y^2): atan differences.
  EXPECT_NEAR(r.theta1, std::atan(1.1) - std::atan(1.0), 1e-14);
  EXPECT_NEAR(r.theta2, std::atan(1.0) - std::atan(0.9), 1e-14);
}

TEST(H1Comparison, RandomAdmissiblePairs) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int checked = 0, drawn = 0;
  while (checked < 1000) {
    ASSERT_LT(++drawn, 100000);
    const double y = 0.1 + 2.0 * U(rng);
    const double t1 = pi / 2 + (0.02 + 0.96 * U(rng)) * pi / 2;
    const Vec2 v1{std::cos(t1), std::sin(t1)};
    const double a1 = 3.0 * U(rng);
    const double x1 = a1 - y * v1.y / v1.x;
    // r2 >= r1 needs |v2.x| <= |v1.x|.
    const double alpha_min = std::acos(std::abs(v1.x));
    const double alpha = alpha_min + (pi / 2 - alpha_min) * (0.01 + 0.98 * U(rng));
    const Vec2 v2{-std::cos(alpha), -std::sin(alpha)};
    // x1 - a1 >= a1 - x2 and x1 >= x2.
    const double x2 = (2 * a1 - x1) + (x1 - (2 * a1 - x1)) * U(rng);
    const AdmissiblePair p{x1, x2, y, v1, v2};
    if (!is_admissible(p).admissible) continue;
    const auto r = h1_comparison_verify(p, 1e-12);
    EXPECT_TRUE(r.norms_ordered);
    EXPECT_TRUE(r.dots_ordered) << r.dot1 << " " << r.dot2;
    ++checked;
  }
}

TEST(UpperCurve, CentredCircle) {
  const auto d = Density::quadratic(1.0);
  const auto t = shot(3, d, 1.0, ball_curvature(d, 3, 1.0));
  const auto u = analyze_upper_curve(t);
  EXPECT_EQ(u.reason, UpperBreak::tangent_horizontal);
  EXPECT_NEAR(u.delta, pi / 2, 1e-9);
  EXPECT_EQ(u.violations_before_delta, 0u);
  EXPECT_NEAR(u.state.x, 0.0, 1e-9);
  EXPECT_NEAR(u.max_F, 0.0, 1e-9);
}

TEST(UpperCurve, PlateauInteriorCircleHasConstantF) {
  const auto t = shot(3, Density::plateau(2.0, 1.0), 1.5, 2.0);
  const auto u = analyze_upper_curve(t);
  EXPECT_EQ(u.reason, UpperBreak::tangent_horizontal);
  EXPECT_NEAR(u.delta, pi / 2, 1e-9);
  EXPECT_NEAR(u.max_F, 0.5, 1e-9);
  for (const auto& s : t.samples) {
    if (s.state.s == 0.0 || s.state.s > u.delta || geom::is_vertical(s.state.theta)) continue;
    EXPECT_NEAR(center_F(s.state), 0.5, 1e-8);
    EXPECT_NEAR(center_F_prime(s.state, s.bundle.kappa) * std::pow(std::cos(s.state.theta), 2), 0.0, 1e-8);
  }
}

TEST(UpperCurve, NonClosingShotEndsAtHorizontalTangent) {
  const auto t = shot(3, Density::quadratic(1.0), 1.0, 4.3);
  const auto u = analyze_upper_curve(t);
  EXPECT_EQ(u.reason, UpperBreak::tangent_horizontal);
  EXPECT_NEAR(u.delta, 1.2740914, 1e-6);
  EXPECT_NEAR(u.state.theta, pi, 1e-9);
  EXPECT_TRUE(u.x_delta_positive);
  EXPECT_TRUE(u.x_delta_dominates_F);
  EXPECT_THROW(analyze_upper_curve(Trajectory{}), std::invalid_argument);
}

TEST(LowerCurve, CentredCircleIsMirrorSymmetric) {
  const auto d = Density::quadratic(1.0);
  const auto t = shot(3, d, 1.0, ball_curvature(d, 3, 1.0));
  const auto u = analyze_upper_curve(t);
  const auto l = analyze_lower_curve(t, u);
  EXPECT_EQ(l.reason, LowerBreak::axis_reached);
  EXPECT_NEAR(l.eta, pi, 1e-8);
  EXPECT_EQ(l.lemma_violations, 0u);
  ASSERT_FALSE(l.pairs.empty());
  for (const auto& p : l.pairs) {
    EXPECT_NEAR(p.x_bar, -p.x, 1e-8);
    EXPECT_NEAR(p.kappa_bar, p.kappa, 1e-8);
  }
  const auto qw = build_QW(t, u, l);
  for (std::size_t i = 0; i < qw.Q.size(); ++i) EXPECT_NEAR(qw.Q.value[i], qw.W.value[i], 1e-8);
}

TEST(LowerCurve, NonClosingShotHasStrictBand) {
  const auto t = shot(3, Density::quadratic(1.0), 1.0, 4.3);
  const auto u = analyze_upper_curve(t);
  const auto l = analyze_lower_curve(t, u);
  EXPECT_LT(l.eta, t.length());
  EXPECT_NE(l.reason, LowerBreak::axis_reached);
  EXPECT_EQ(l.lemma_violations, 0u);
  EXPECT_NEAR(l.strict_band_high, 0.835, 2e-3);
  EXPECT_NEAR(l.strict_band_low, 0.406, 2e-3);
  // Just past eta one of the lower-curve conditions fails.
  const CurveState past = t.state_at(l.eta + 1e-6);
  const double h = past.y;
  const double kbar = t.kappa_at(t.state_at(upper_point_at_height(t, u.delta, h)));
  EXPECT_TRUE(past.theta > 1.5 * pi || t.kappa_at(past) < kbar);
}

TEST(QW, CurvatureComparisonOnShots) {
  const auto d = Density::quadratic(1.0);
  for (auto [n, R0, c] : {std::tuple{2, 1.0, 3.2}, {2, 0.8, 3.5}, {3, 1.0, 4.3}, {3, 1.2, 5.0}}) {
    const auto t = shot(n, d, R0, c);
    const auto u = analyze_upper_curve(t);
    const auto l = analyze_lower_curve(t, u);
    const auto qw = build_QW(t, u, l);
    EXPECT_NEAR(qw.Q.limit_value, qw.W.limit_value, 0.0);
    EXPECT_NEAR(qw.Q.value.back(), qw.W.value.back(), 1e-3);
    const auto r = curvature_comparison_verify(qw.Q, qw.W, {1e-8, 1e-8});
    EXPECT_TRUE(r.applicable) << n << " " << c;
    EXPECT_TRUE(r.passed) << n << " " << c;
    EXPECT_TRUE(r.strict_gap);
    EXPECT_GT(r.phi, 0.0);
  }
}

TEST(QW, EmptyIntervalRejected) {
  const auto d = Density::quadratic(1.0);
  const auto t = shot(3, d, 1.0, 4.3);
  auto u = analyze_upper_curve(t);
  auto l = analyze_lower_curve(t, u);
  l.eta = u.delta;
  l.state = u.state;
  EXPECT_THROW(build_QW(t, u, l), std::invalid_argument);
}
