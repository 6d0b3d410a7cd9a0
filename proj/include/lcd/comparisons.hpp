#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcd/geometry.hpp"
#include "lcd/shooting.hpp"

namespace lcd {

/// Samples of a C2 graph u on (a, b) with one-sided limits at b. theta is
/// the tangent angle atan(u') in [0, pi/2) and kappa the upward curvature.
struct GraphFunction {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> xs;  // increasing, inside [a, b)
  std::vector<double> value;
  std::vector<double> d1;
  std::vector<double> d2;
  double limit_value = 0.0;  // u(b-)
  double limit_theta = 0.0;  // theta(b-)

  std::size_t size() const { return xs.size(); }
  double theta(std::size_t i) const { return std::atan(d1[i]); }
  double kappa(std::size_t i) const { return d2[i] / std::pow(1.0 + d1[i] * d1[i], 1.5); }

  void validate() const {
    if (!(b > a)) throw std::invalid_argument("GraphFunction: need b > a");
    if (xs.size() < 2) throw std::invalid_argument("GraphFunction: need at least 2 samples");
    if (value.size() != xs.size() || d1.size() != xs.size() || d2.size() != xs.size())
      throw std::invalid_argument("GraphFunction: sample arrays differ in length");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] < a || xs[i] >= b) throw std::invalid_argument("GraphFunction: sample outside [a, b)");
      if (i > 0 && !(xs[i] > xs[i - 1])) throw std::invalid_argument("GraphFunction: samples must increase");
    }
  }
};

/// Tabulates u on the given abscissae from callables for u, u', u'' and the
/// limits at b.
template <class U, class U1, class U2>
GraphFunction make_graph(double a, double b, const std::vector<double>& xs, U u, U1 u1, U2 u2) {
  GraphFunction g;
  g.a = a;
  g.b = b;
  g.xs = xs;
  for (double x : xs) {
    g.value.push_back(u(x));
    g.d1.push_back(u1(x));
    g.d2.push_back(u2(x));
  }
  g.limit_value = u(b);
  g.limit_theta = std::atan(u1(b));
  g.validate();
  return g;
}

/// Lower arc of the circle of radius R whose height at x = b is u_b and
/// whose tangent angle there is theta_b.
struct ArcGraph {
  double R = 1.0, xc = 0.0, yc = 0.0;

  ArcGraph(double R_, double b, double u_b, double theta_b)
      : R(R_), xc(b - R_ * std::sin(theta_b)), yc(u_b + R_ * std::cos(theta_b)) {
    if (!(R_ > 0.0)) throw std::invalid_argument("ArcGraph: radius must be positive");
  }
  double u(double x) const { return yc - std::sqrt(R * R - (x - xc) * (x - xc)); }
  double u1(double x) const { return (x - xc) / std::sqrt(R * R - (x - xc) * (x - xc)); }
  double u2(double x) const { return R * R / std::pow(R * R - (x - xc) * (x - xc), 1.5); }
  GraphFunction graph(double a, double b, const std::vector<double>& xs) const {
    return make_graph(a, b, xs, [&](double x) { return u(x); }, [&](double x) { return u1(x); },
                      [&](double x) { return u2(x); });
  }
};

struct ComparisonCase {
  std::string name;
  GraphFunction f;
  GraphFunction g;
};

/// Three analytic pairs satisfying the comparison hypotheses: arcs of radii
/// 2 and 1 tangent at b, a tangent line against an arc, and arcs with
/// strict boundary inequalities.
inline std::vector<ComparisonCase> arc_comparison_cases(std::size_t samples = 400) {
  if (samples < 2) throw std::invalid_argument("arc_comparison_cases: need at least 2 samples");
  auto uniform = [&](double a, double b) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < samples; ++i) xs.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(samples));
    return xs;
  };
  std::vector<ComparisonCase> out;
  {
    const auto xs = uniform(0.0, 0.5);
    out.push_back({"tangent_arcs", ArcGraph(2.0, 0.5, 1.0, 0.6).graph(0.0, 0.5, xs),
                   ArcGraph(1.0, 0.5, 1.0, 0.6).graph(0.0, 0.5, xs)});
  }
  {
    const double b = 0.5, tb = 0.6;
    const auto xs = uniform(0.0, b);
    const double slope = std::tan(tb);
    out.push_back({"line_and_arc",
                   make_graph(0.0, b, xs, [&](double x) { return 1.0 + slope * (x - b); },
                              [&](double) { return slope; }, [](double) { return 0.0; }),
                   ArcGraph(1.0, b, 1.0, tb).graph(0.0, b, xs)});
  }
  {
    const auto xs = uniform(0.3, 0.5);
    out.push_back({"strict_boundary", ArcGraph(1.0, 0.5, 0.9, 0.7).graph(0.3, 0.5, xs),
                   ArcGraph(0.5, 0.5, 1.0, 0.6).graph(0.3, 0.5, xs)});
  }
  return out;
}

struct ComparisonOptions {
  double tol = 1e-9;      // slack on every inequality
  double gap_tol = 1e-9;  // kappa_g - kappa_f above this counts as strict
};

struct CurvatureComparisonReport {
  bool applicable = true;          // hypotheses hold on the samples
  std::vector<std::string> hypothesis_failures;
  bool values_ordered = true;      // f <= g everywhere
  bool angles_ordered = true;      // theta_f >= theta_g everywhere
  double max_value_excess = -std::numeric_limits<double>::infinity();  // max f - g
  double max_angle_deficit = -std::numeric_limits<double>::infinity(); // max theta_g - theta_f
  bool strict_gap = false;         // kappa_f < kappa_g somewhere
  double gap_point = 0.0;          // y with the largest curvature gap (ties: leftmost)
  double phi = 0.0;                // min theta_f - theta_g over samples x <= y
  bool phi_positive = true;
  bool passed = true;              // inapplicable or all conclusions hold
};

/// Checks the curvature comparison: under f' >= 0, g' >= 0, f(b-) <= g(b-),
/// theta_f(b-) >= theta_g(b-) and kappa_f <= kappa_g, the conclusions
/// f <= g and theta_f >= theta_g at every sample, plus a uniform angle gap
/// left of any strict curvature gap. Both graphs must share abscissae.
inline CurvatureComparisonReport curvature_comparison_verify(const GraphFunction& f, const GraphFunction& g,
                                                             const ComparisonOptions& opt = {}) {
  f.validate();
  g.validate();
  if (f.xs != g.xs || f.a != g.a || f.b != g.b)
    throw std::invalid_argument("curvature_comparison_verify: graphs must share samples");
  CurvatureComparisonReport r;
  const double tol = opt.tol;
  auto fail = [&](std::string what) {
    r.applicable = false;
    r.hypothesis_failures.push_back(std::move(what));
  };
  const std::size_t m = f.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (f.d1[i] < -tol || g.d1[i] < -tol) {
      fail("derivative negative at x = " + std::to_string(f.xs[i]));
      break;
    }
  }
  if (!std::isfinite(f.limit_value) || !std::isfinite(g.limit_value) || !std::isfinite(f.limit_theta) ||
      !std::isfinite(g.limit_theta))
    fail("limits at b do not exist");
  if (f.limit_value > g.limit_value + tol) fail("f(b) > g(b)");
  if (f.limit_theta < g.limit_theta - tol) fail("theta_f(b) < theta_g(b)");
  double best_gap = -std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double gap = g.kappa(i) - f.kappa(i);
    if (gap < -tol) {
      fail("kappa_f > kappa_g at x = " + std::to_string(f.xs[i]));
      break;
    }
    if (gap > best_gap + opt.gap_tol) {
      best_gap = gap;
      best = i;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    r.max_value_excess = std::max(r.max_value_excess, f.value[i] - g.value[i]);
    r.max_angle_deficit = std::max(r.max_angle_deficit, g.theta(i) - f.theta(i));
  }
  r.values_ordered = r.max_value_excess <= tol;
  r.angles_ordered = r.max_angle_deficit <= tol;
  r.strict_gap = best_gap > opt.gap_tol;
  if (r.strict_gap) {
    r.gap_point = f.xs[best];
    r.phi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i <= best; ++i) r.phi = std::min(r.phi, f.theta(i) - g.theta(i));
    r.phi_positive = r.phi > 0.0;
  }
  r.passed = !r.applicable || (r.values_ordered && r.angles_ordered && r.phi_positive);
  return r;
}

/// max |(sin theta)' - kappa| over interior samples, with the derivative
/// from a 5-point local interpolant in x.
inline double sin_theta_identity_residual(const GraphFunction& u) {
  u.validate();
  constexpr std::size_t stencil = 5;
  if (u.size() < stencil) throw std::invalid_argument("sin_theta_identity_residual: need 5 samples");
  double worst = 0.0;
  std::vector<double> xs(stencil);
  for (std::size_t i = stencil / 2; i + stencil / 2 < u.size(); ++i) {
    const std::size_t first = i - stencil / 2;
    for (std::size_t k = 0; k < stencil; ++k) xs[k] = u.xs[first + k];
    const auto w = detail::fornberg_weights(u.xs[i], xs, 1);
    double deriv = 0.0;
    for (std::size_t k = 0; k < stencil; ++k) deriv += w[1][k] * std::sin(u.theta(first + k));
    worst = std::max(worst, std::abs(deriv - u.kappa(i)));
  }
  return worst;
}

/// Point/vector pair at a common height y > 0: v1 strictly in the second
/// quadrant at (x1, y), v2 strictly in the third at (x2, y), x1 >= x2.
struct AdmissiblePair {
  double x1 = 0.0;
  double x2 = 0.0;
  double y = 1.0;
  Vec2 v1;
  Vec2 v2;
};

struct AdmissibilityReport {
  bool admissible = false;
  double a1 = 0.0, r1 = 0.0;
  double a2 = 0.0, r2 = 0.0;
  std::vector<std::string> failures;  // "a1 < 0", "r2 < r1", "x1 - a1 < a1 - x2"
};

namespace cmp_detail {

inline void require_pair(const AdmissiblePair& p) {
  if (!(p.y > 0.0)) throw std::invalid_argument("admissible pair: height must be positive");
  if (!(p.x1 >= p.x2)) throw std::invalid_argument("admissible pair: need x1 >= x2");
  for (Vec2 v : {p.v1, p.v2})
    if (std::abs(norm(v) - 1.0) > 1e-12) throw std::invalid_argument("admissible pair: vectors must be unit");
  if (!(p.v1.x < 0.0 && p.v1.y > 0.0))
    throw std::invalid_argument("admissible pair: v1 must lie strictly in the second quadrant");
  if (!(p.v2.x < 0.0 && p.v2.y < 0.0))
    throw std::invalid_argument("admissible pair: v2 must lie strictly in the third quadrant");
}

/// Counterclockwise angle from a to b in (-pi, pi].
inline double angle_between(Vec2 a, Vec2 b) {
  return std::atan2(a.x * b.y - a.y * b.x, dot(a, b));
}

}  // namespace cmp_detail

/// Canonical-circle data straight from the vector components: centre
/// x + y v.y / v.x, radius y / |v.x|. Inequalities allow a roundoff slack
/// of `slack` relative to the coordinate scale, so boundary configurations
/// (such as the symmetric pair) are not lost to the last bit.
inline AdmissibilityReport is_admissible(const AdmissiblePair& p, double slack = 1e-12) {
  cmp_detail::require_pair(p);
  AdmissibilityReport r;
  r.a1 = p.x1 + p.y * p.v1.y / p.v1.x;
  r.r1 = p.y / std::abs(p.v1.x);
  r.a2 = p.x2 + p.y * p.v2.y / p.v2.x;
  r.r2 = p.y / std::abs(p.v2.x);
  const double eps = slack * (std::abs(p.x1) + std::abs(p.x2) + p.y + r.r1 + r.r2);
  if (r.a1 < -eps) r.failures.emplace_back("a1 < 0");
  if (r.r2 < r.r1 - eps) r.failures.emplace_back("r2 < r1");
  if (p.x1 - r.a1 < r.a1 - p.x2 - eps) r.failures.emplace_back("x1 - a1 < a1 - x2");
  r.admissible = r.failures.empty();
  return r;
}

struct H1ComparisonReport {
  AdmissibilityReport admissibility;
  double norm1 = 0.0, norm2 = 0.0;  // |(x1, y)|, |(x2, y)|
  double dot1 = 0.0, dot2 = 0.0;    // v_i^perp . N(x_i, y)
  double theta1 = 0.0, theta2 = 0.0;
  bool norms_ordered = false;
  bool dots_ordered = false;
  bool equality = false;           // dot1 == dot2 within tol
  bool equality_case = false;      // C1 = C2 and centred
  bool passed = false;             // conclusions hold and equality matches its case
};

/// H1 comparison on an admissible pair; perp is the clockwise quarter turn.
/// theta_i is the angle from N(x_i, y) to v_i^perp.
inline H1ComparisonReport h1_comparison_verify(const AdmissiblePair& p, double tol = 1e-12) {
  H1ComparisonReport r;
  r.admissibility = is_admissible(p);
  const Vec2 P1{p.x1, p.y}, P2{p.x2, p.y};
  r.norm1 = norm(P1);
  r.norm2 = norm(P2);
  const Vec2 N1 = (1.0 / r.norm1) * P1, N2 = (1.0 / r.norm2) * P2;
  const Vec2 w1 = perp_cw(p.v1), w2 = perp_cw(p.v2);
  r.dot1 = dot(w1, N1);
  r.dot2 = dot(w2, N2);
  r.theta1 = std::abs(cmp_detail::angle_between(N1, w1));
  r.theta2 = std::abs(cmp_detail::angle_between(N2, w2));
  r.norms_ordered = r.norm1 >= r.norm2 - tol;
  r.dots_ordered = r.dot1 >= r.dot2 - tol;
  r.equality = std::abs(r.dot1 - r.dot2) <= tol;
  const auto& a = r.admissibility;
  r.equality_case = std::abs(a.a1) <= tol && std::abs(a.a2 - a.a1) <= tol && std::abs(a.r2 - a.r1) <= tol;
  r.passed = a.admissible && r.norms_ordered && r.dots_ordered && (r.equality == r.equality_case);
  return r;
}

/// Symmetric base configuration: C1 centred at the origin through (x1*, y)
/// with tangent v1, and its mirror image at x2* = -x1*.
inline AdmissiblePair symmetric_pair(double y, double v1_angle) {
  if (!(v1_angle > std::numbers::pi / 2 && v1_angle < std::numbers::pi))
    throw std::invalid_argument("symmetric_pair: v1 angle must lie in (pi/2, pi)");
  AdmissiblePair p;
  p.y = y;
  p.v1 = {std::cos(v1_angle), std::sin(v1_angle)};
  p.v2 = {p.v1.x, -p.v1.y};
  p.x1 = -y * p.v1.y / p.v1.x;
  p.x2 = -p.x1;
  return p;
}

/// Perturbation of the base: x1 = x1* + c, x2 = x2* + c + d, v2 rotated
/// counterclockwise by phi.
inline AdmissiblePair perturb_pair(const AdmissiblePair& base, double c, double d, double phi) {
  AdmissiblePair p = base;
  p.x1 += c;
  p.x2 += c + d;
  const double cs = std::cos(phi), sn = std::sin(phi);
  p.v2 = {cs * base.v2.x - sn * base.v2.y, sn * base.v2.x + cs * base.v2.y};
  return p;
}

struct H1GridCell {
  double c = 0.0, d = 0.0, phi = 0.0;
  H1ComparisonReport report;
  bool strict = false;  // theta1 < theta2 and dot1 > dot2
};

struct H1GridReport {
  std::vector<H1GridCell> cells;
  std::size_t strict_cells = 0;
  std::size_t non_strict_off_origin = 0;
  bool origin_equality = false;
  bool passed = false;  // strict everywhere except the origin, equality there
};

/// Brute-force sweep over (c, d, phi) in [0, max]^3 with `points` nodes per
/// axis on top of a symmetric base pair.
inline H1GridReport h1_comparison_grid(const AdmissiblePair& base, int points = 20, double max = 0.5) {
  if (points < 2) throw std::invalid_argument("h1_comparison_grid: need at least 2 points per axis");
  H1GridReport g;
  const double step = max / static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j)
      for (int k = 0; k < points; ++k) {
        H1GridCell cell{i * step, j * step, k * step, {}, false};
        cell.report = h1_comparison_verify(perturb_pair(base, cell.c, cell.d, cell.phi));
        cell.strict = cell.report.theta1 < cell.report.theta2 && cell.report.dot1 > cell.report.dot2;
        const bool origin = i == 0 && j == 0 && k == 0;
        if (origin) g.origin_equality = cell.report.equality && cell.report.equality_case;
        else if (cell.strict) ++g.strict_cells;
        else ++g.non_strict_off_origin;
        g.cells.push_back(cell);
      }
  g.passed = g.origin_equality && g.non_strict_off_origin == 0;
  return g;
}

enum class UpperBreak {
  tangent_horizontal,     // gamma' = (-1, 0)
  curvature_below_circle, // kappa < lambda
  circle_not_positive,    // lambda <= 0
  F_not_smooth,           // vertical tangent away from the axis
  F_decreasing,
  trajectory_end,
};

inline const char* to_string(UpperBreak b) {
  switch (b) {
    case UpperBreak::tangent_horizontal: return "gamma'=(-1,0)";
    case UpperBreak::curvature_below_circle: return "kappa<lambda";
    case UpperBreak::circle_not_positive: return "lambda<=0";
    case UpperBreak::F_not_smooth: return "F not smooth";
    case UpperBreak::F_decreasing: return "F'<0";
    case UpperBreak::trajectory_end: return "trajectory end";
  }
  return "unknown";
}

struct UpperCurveReport {
  double delta = 0.0;  // arclength where the upper curve ends
  UpperBreak reason = UpperBreak::trajectory_end;
  CurveState state;    // at delta
  std::size_t samples_checked = 0;
  std::size_t violations_before_delta = 0;
  double max_F = -std::numeric_limits<double>::infinity();  // over samples in [0, delta]
  bool x_delta_positive = false;
  bool x_delta_dominates_F = false;
};

struct CurveAnalysisOptions {
  double tol = 1e-8;  // relative slack on curvature comparisons
};

namespace cmp_detail {

inline bool upper_quadrant(double theta) {
  return theta >= std::numbers::pi / 2 && theta <= std::numbers::pi;
}

/// First failing upper-curve condition at a sample, if any.
inline std::optional<UpperBreak> upper_failure(const CurveState& st, double kappa, double lambda, double tol) {
  if (st.s == 0.0) return std::nullopt;  // axis point: kappa = lambda, F' = 0
  if (!upper_quadrant(st.theta)) return UpperBreak::tangent_horizontal;
  const double slack = tol * (std::abs(kappa) + std::abs(lambda) + 1.0);
  if (!(lambda > 0.0)) return UpperBreak::circle_not_positive;
  if (kappa < lambda - slack) return UpperBreak::curvature_below_circle;
  if (geom::is_vertical(st.theta)) return UpperBreak::F_not_smooth;
  const double c = std::cos(st.theta);
  if (center_F_prime(st, kappa) < -slack * st.y / (c * c)) return UpperBreak::F_decreasing;
  return std::nullopt;
}

/// Bisection on [lo, hi] for the last s where pred holds (pred(lo) true).
template <class Pred>
double last_true(double lo, double hi, Pred pred, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) lo = mid; else hi = mid;
  }
  return lo;
}

}  // namespace cmp_detail

/// Longest initial arc on which gamma' lies in the second quadrant,
/// kappa >= lambda > 0 and F is smooth with F' >= 0. The trajectory must
/// start at an axis point that is a local maximum of |gamma|.
inline UpperCurveReport analyze_upper_curve(const Trajectory& t, const CurveAnalysisOptions& opt = {}) {
  if (t.samples.size() < 3 || !(t.length() > 0.0))
    throw std::invalid_argument("analyze_upper_curve: trajectory too short");
  UpperCurveReport r;
  const double event_tol = std::max(t.config.event_tol, 1e-14 * t.config.R0);
  std::optional<double> horizontal;
  for (const auto& e : t.events)
    if (e.kind == EventKind::horizontal_left) {
      horizontal = e.s;
      break;
    }
  std::optional<std::pair<std::size_t, UpperBreak>> fail;
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const auto& smp = t.samples[i];
    if (horizontal && smp.state.s > *horizontal) break;
    ++r.samples_checked;
    if (auto f = cmp_detail::upper_failure(smp.state, smp.bundle.kappa, smp.bundle.lambda, opt.tol)) {
      fail = {i, *f};
      break;
    }
  }
  if (fail) {
    const std::size_t i = fail->first;
    const double lo = t.samples[i - 1].state.s, hi = t.samples[i].state.s;
    r.reason = fail->second;
    r.delta = cmp_detail::last_true(
        lo, hi,
        [&](double s) {
          const CurveState st = t.state_at(s);
          const CurvatureBundle b = t.bundle_at(st);
          return !cmp_detail::upper_failure(st, b.kappa, b.lambda, opt.tol);
        },
        event_tol);
  } else if (horizontal) {
    r.reason = UpperBreak::tangent_horizontal;
    r.delta = *horizontal;
  } else {
    r.reason = UpperBreak::trajectory_end;
    r.delta = t.length();
  }
  r.state = t.state_at(r.delta);
  for (const auto& smp : t.samples) {
    if (smp.state.s > r.delta) break;
    if (smp.state.s > 0.0 && !geom::is_vertical(smp.state.theta)) r.max_F = std::max(r.max_F, center_F(smp.state));
    else if (smp.state.s == 0.0) r.max_F = std::max(r.max_F, smp.state.x - 1.0 / smp.bundle.kappa);
  }
  r.x_delta_positive = r.state.x > 0.0;
  r.x_delta_dominates_F = r.state.x >= r.max_F - opt.tol * (std::abs(r.max_F) + 1.0);
  return r;
}

enum class LowerBreak { tangent_vertical, curvature_comparison, axis_reached, trajectory_end };

inline const char* to_string(LowerBreak b) {
  switch (b) {
    case LowerBreak::tangent_vertical: return "gamma'=(0,-1)";
    case LowerBreak::curvature_comparison: return "kappa(z)<kappa(zbar)";
    case LowerBreak::axis_reached: return "axis reached";
    case LowerBreak::trajectory_end: return "trajectory end";
  }
  return "unknown";
}

/// A lower-curve point z and the upper-curve point zbar at the same height.
struct LowerPair {
  double s = 0.0, s_bar = 0.0;
  double height = 0.0;
  double x = 0.0, x_bar = 0.0;
  double theta = 0.0, theta_bar = 0.0;  // unwrapped
  double kappa = 0.0, kappa_bar = 0.0;
  bool position_ok = false;  // x_bar - x_delta >= x_delta - x
  bool angle_ok = false;     // theta(zbar) >= -theta(z), angles in (-pi, pi]
};

struct LowerCurveReport {
  double delta = 0.0;
  double eta = 0.0;
  LowerBreak reason = LowerBreak::trajectory_end;
  CurveState state;  // at eta
  std::vector<LowerPair> pairs;
  std::size_t lemma_violations = 0;
  double strict_band_low = 0.0;   // heights where kappa(z) > kappa(zbar) strictly,
  double strict_band_high = 0.0;  // the first maximal band below y(delta)
  double max_position_slack = 0.0;
  double min_angle_slack = std::numeric_limits<double>::infinity();
};

namespace cmp_detail {

inline bool lower_quadrant(double theta) {
  return theta >= std::numbers::pi && theta <= 1.5 * std::numbers::pi;
}

/// Angle in (-pi, pi].
inline double principal(double a) { return wrap_angle(a); }

}  // namespace cmp_detail

/// Arclength on the upper curve [0, delta] at height h (y increasing there).
inline double upper_point_at_height(const Trajectory& t, double delta, double h) {
  return height_crossing(t, 0.0, delta, h);
}

/// Lower curve after delta: third-quadrant tangents with kappa(zbar) <=
/// kappa(z), where zbar is the upper-curve point at the same height. Every
/// sample pair is checked against the two position/angle conclusions.
inline LowerCurveReport analyze_lower_curve(const Trajectory& t, const UpperCurveReport& upper,
                                            const CurveAnalysisOptions& opt = {}) {
  if (upper.reason != UpperBreak::tangent_horizontal)
    throw std::invalid_argument("analyze_lower_curve: upper curve does not end at a horizontal tangent");
  if (!(t.length() > upper.delta)) throw std::invalid_argument("analyze_lower_curve: trajectory ends at delta");
  LowerCurveReport r;
  r.delta = upper.delta;
  const double delta = upper.delta;
  const double y_top = upper.state.y;
  const double x_delta = upper.state.x;
  const double event_tol = std::max(t.config.event_tol, 1e-14 * t.config.R0);
  const bool reaches_axis = t.termination == Termination::axis_crossing ||
                            t.termination == Termination::arrival_matched;

  auto slack = [&](double a, double b) { return opt.tol * (std::abs(a) + std::abs(b) + 1.0); };
  // kappa(z) - kappa(zbar) at arclength s, or nullopt when z is not in the
  // height range of the upper curve.
  auto compare = [&](double s) -> std::optional<std::pair<LowerPair, bool>> {
    const CurveState z = t.state_at(s);
    if (z.y < 0.0 || z.y > y_top) return std::nullopt;
    LowerPair p;
    p.s = s;
    p.height = z.y;
    p.x = z.x;
    p.theta = z.theta;
    p.kappa = t.kappa_at(z);
    p.s_bar = z.y <= 0.0 ? 0.0 : (z.y >= y_top ? delta : upper_point_at_height(t, delta, z.y));
    const CurveState zb = t.state_at(p.s_bar);
    p.x_bar = zb.x;
    p.theta_bar = zb.theta;
    p.kappa_bar = t.kappa_at(zb);
    const double pos = (p.x_bar - x_delta) - (x_delta - p.x);
    const double ang = cmp_detail::principal(p.theta_bar) + cmp_detail::principal(p.theta);
    p.position_ok = pos >= -slack(p.x_bar, p.x);
    p.angle_ok = ang >= -slack(p.theta_bar, p.theta);
    r.max_position_slack = std::max(r.max_position_slack, -pos);
    r.min_angle_slack = std::min(r.min_angle_slack, ang);
    const bool ok = cmp_detail::lower_quadrant(z.theta) && p.kappa >= p.kappa_bar - slack(p.kappa, p.kappa_bar);
    return std::make_pair(p, ok);
  };

  std::optional<std::size_t> fail;
  bool vertical_fail = false;
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const double s = t.samples[i].state.s;
    if (s <= delta) continue;
    const CurveState& st = t.samples[i].state;
    if (!cmp_detail::lower_quadrant(st.theta)) {
      fail = i;
      vertical_fail = true;
      break;
    }
    auto c = compare(s);
    if (!c) {
      fail = i;
      break;
    }
    if (!c->second) {
      fail = i;
      break;
    }
    r.pairs.push_back(c->first);
  }
  if (fail) {
    const double lo = std::max(delta, t.samples[*fail - 1].state.s), hi = t.samples[*fail].state.s;
    if (vertical_fail) {
      r.reason = LowerBreak::tangent_vertical;
      r.eta = lo;
      for (const auto& e : t.events)
        if (e.kind == EventKind::vertical_down && e.s > delta) {
          r.eta = e.s;
          break;
        }
    } else {
      r.reason = LowerBreak::curvature_comparison;
      r.eta = cmp_detail::last_true(
          lo, hi,
          [&](double s) {
            auto c = compare(s);
            return c && c->second;
          },
          event_tol);
    }
  } else {
    r.reason = reaches_axis ? LowerBreak::axis_reached : LowerBreak::trajectory_end;
    r.eta = t.length();
  }
  r.state = t.state_at(r.eta);
  for (const auto& p : r.pairs)
    if (!p.position_ok || !p.angle_ok) ++r.lemma_violations;

  // First band below y(delta) with a strict curvature gap.
  bool in_band = false;
  for (const auto& p : r.pairs) {
    const bool strict = p.kappa - p.kappa_bar > slack(p.kappa, p.kappa_bar);
    if (strict && !in_band) {
      in_band = true;
      r.strict_band_high = p.height;
      r.strict_band_low = p.height;
    } else if (strict) {
      r.strict_band_low = p.height;
    } else if (in_band) {
      break;
    }
  }
  return r;
}

/// Q = 2 x(delta) - x(h(t)) and W = x(k(t)) as graphs over height t, where
/// h and k pick the upper and lower curve points at height t.
struct QWPair {
  GraphFunction Q;
  GraphFunction W;
};

/// Tabulates Q and W on (y(eta), y(delta)) at `points` Chebyshev-spaced
/// heights. On the upper curve Q' = -cot theta, on the lower curve
/// W' = cot theta, and both graphs have upward curvature kappa.
inline QWPair build_QW(const Trajectory& t, const UpperCurveReport& upper, const LowerCurveReport& lower,
                       std::size_t points = 200) {
  const double a = std::max(0.0, lower.state.y);
  const double b = upper.state.y;
  if (!(b > a) || !(lower.eta > upper.delta)) throw std::invalid_argument("build_QW: empty height interval");
  if (points < 5) throw std::invalid_argument("build_QW: need at least 5 points");
  const double x_delta = upper.state.x;
  QWPair qw;
  for (GraphFunction* g : {&qw.Q, &qw.W}) {
    g->a = a;
    g->b = b;
    g->limit_value = x_delta;
    g->limit_theta = std::numbers::pi / 2;
  }
  for (std::size_t j = 0; j < points; ++j) {
    const double u = (static_cast<double>(j) + 0.5) / static_cast<double>(points);
    const double h = a + 0.5 * (b - a) * (1.0 - std::cos(std::numbers::pi * u));
    const CurveState up = t.state_at(upper_point_at_height(t, upper.delta, h));
    const CurveState lo = t.state_at(height_crossing(t, upper.delta, lower.eta, h));
    const double ku = t.kappa_at(up), kl = t.kappa_at(lo);
    const double qd1 = -std::cos(up.theta) / std::sin(up.theta);
    const double wd1 = std::cos(lo.theta) / std::sin(lo.theta);
    qw.Q.xs.push_back(h);
    qw.Q.value.push_back(2.0 * x_delta - up.x);
    qw.Q.d1.push_back(qd1);
    qw.Q.d2.push_back(ku * std::pow(1.0 + qd1 * qd1, 1.5));
    qw.W.xs.push_back(h);
    qw.W.value.push_back(lo.x);
    qw.W.d1.push_back(wd1);
    qw.W.d2.push_back(kl * std::pow(1.0 + wd1 * wd1, 1.5));
  }
  qw.Q.validate();
  qw.W.validate();
  return qw;
}

}  // namespace lcd
