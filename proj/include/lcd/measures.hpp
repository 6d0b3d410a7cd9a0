#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcd/density.hpp"
#include "lcd/quadrature.hpp"
#include "lcd/shooting.hpp"

namespace lcd {

/// Area of the unit k-sphere in R^(k+1); sphere_area(0) = 2 counts the two
/// points of S^0.
inline double sphere_area(int k) {
  if (k < 0) throw std::invalid_argument("sphere_area: negative dimension");
  const double h = 0.5 * static_cast<double>(k + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

struct RevolutionMeasures {
  double perimeter = 0.0;
  double volume = 0.0;
  int n = 2;
  double sigma = 0.0;
};

/// Weighted measures of the centred ball of radius R in R^n.
inline RevolutionMeasures ball_measures(double R, int n, const Density& d) {
  if (!(R > 0.0)) throw std::invalid_argument("ball_measures: radius must be positive");
  if (n < 1) throw std::invalid_argument("ball_measures: dimension must be >= 1");
  RevolutionMeasures m;
  m.n = n;
  m.sigma = sphere_area(n - 1);
  const double k = static_cast<double>(n - 1);
  m.perimeter = m.sigma * std::pow(R, k) * d.weight(R);
  m.volume = m.sigma * quad::adaptive([&](double r) { return std::pow(r, k) * d.weight(r); }, 0.0, R, 1e-13);
  return m;
}

/// Weighted area of the hypersurface swept by revolving the half curve about
/// the e1 axis: sigma_{n-2} * int y^(n-2) e^g ds. For n = 2, sigma_0 = 2
/// accounts for the mirror half.
inline double trajectory_perimeter(const Trajectory& t, int n, const Density& d) {
  if (n < 2) throw std::invalid_argument("trajectory_perimeter: dimension must be >= 2");
  if (t.samples.size() < 2) throw std::invalid_argument("trajectory_perimeter: trajectory has no steps");
  const double tol = t.config.closure_y_tol;
  for (const auto& smp : t.samples)
    if (smp.state.y < -tol) throw std::domain_error("trajectory_perimeter: curve dips below the axis");
  const double k = static_cast<double>(n - 2);
  auto integrand = [&](double s) {
    const CurveState st = t.state_at(s);
    return std::pow(std::max(st.y, 0.0), k) * d.weight(st.radius());
  };
  const quad::GaussRule& rule = quad::rule(10);
  double total = 0.0;
  double prev = 0.0;
  auto add = [&](double a, double b) {
    if (b > a) total += quad::fixed(integrand, a, b, rule);
  };
  for (std::size_t i = 1; i < t.samples.size(); ++i) {
    const double s = t.samples[i].state.s;
    add(prev, s);
    prev = s;
  }
  add(prev, t.length());
  return sphere_area(n - 2) * total;
}

struct VolumeResult {
  double volume = 0.0;
  int strips = 0;  // per y band at the final level
  double last_relative_change = 0.0;
};

namespace measures_detail {

/// Sample-polyline self-intersection test (adjacent segments excluded).
inline bool polyline_self_intersects(const std::vector<Vec2>& p) {
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); };
  const std::size_t m = p.size();
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double ax0 = std::min(p[i].x, p[i + 1].x), ax1 = std::max(p[i].x, p[i + 1].x);
    const double ay0 = std::min(p[i].y, p[i + 1].y), ay1 = std::max(p[i].y, p[i + 1].y);
    for (std::size_t j = i + 2; j + 1 < m; ++j) {
      if (i == 0 && j + 2 == m && p[0].x == p[m - 1].x && p[0].y == p[m - 1].y) continue;
      if (std::max(p[j].x, p[j + 1].x) < ax0 || std::min(p[j].x, p[j + 1].x) > ax1 ||
          std::max(p[j].y, p[j + 1].y) < ay0 || std::min(p[j].y, p[j + 1].y) > ay1)
        continue;
      const double d1 = orient(p[i], p[i + 1], p[j]);
      const double d2 = orient(p[i], p[i + 1], p[j + 1]);
      const double d3 = orient(p[j], p[j + 1], p[i]);
      const double d4 = orient(p[j], p[j + 1], p[i + 1]);
      if (((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)))
        return true;
    }
  }
  return false;
}

/// A piece of the curve on which y is monotone.
struct MonotonePiece {
  double s0 = 0.0, s1 = 0.0;
  double y0 = 0.0, y1 = 0.0;
};

/// s in the piece with y(s) = h.
inline double crossing(const Trajectory& t, const MonotonePiece& p, double h) {
  return height_crossing(t, p.s0, p.s1, h);
}

}  // namespace measures_detail

/// Weighted volume of the solid swept by the half region between the curve
/// and the axis. Heights are split into bands between horizontal-tangent
/// levels; in each band the curve crossings are exact roots on the dense
/// trajectory and y = h_i + (h_{i+1} - h_i)(1 - cos(pi u))/2 removes the
/// square-root behaviour at band ends. Strips per band double until the
/// relative change is below rel_change.
inline VolumeResult trajectory_volume_detailed(const Trajectory& t, int n, const Density& d,
                                               double rel_change = 1e-10, int max_strips = 1024) {
  using namespace measures_detail;
  if (n < 2) throw std::invalid_argument("trajectory_volume: dimension must be >= 2");
  const double ytol = std::max(t.config.closure_y_tol, 1e-10 * t.config.R0);
  if (!(t.termination == Termination::axis_crossing || t.termination == Termination::arrival_matched) ||
      std::abs(t.end_state.y) > ytol)
    throw std::invalid_argument("trajectory_volume: curve does not return to the axis");
  std::vector<Vec2> poly;
  for (const auto& smp : t.samples) {
    if (smp.state.y < -ytol) throw std::domain_error("trajectory_volume: curve dips below the axis");
    poly.push_back(smp.state.position());
  }
  poly.push_back(t.end_state.position());
  if (polyline_self_intersects(poly)) throw std::domain_error("trajectory_volume: curve is self-intersecting");

  // Monotone pieces split at horizontal tangents.
  std::vector<double> cuts{0.0};
  for (const auto& e : t.events)
    if ((e.kind == EventKind::horizontal_left || e.kind == EventKind::horizontal_right) && e.s > 0.0 &&
        e.s < t.length())
      cuts.push_back(e.s);
  cuts.push_back(t.length());
  std::vector<MonotonePiece> pieces;
  std::vector<double> levels{0.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    MonotonePiece p{cuts[i], cuts[i + 1], std::max(0.0, t.state_at(cuts[i]).y),
                    std::max(0.0, t.state_at(cuts[i + 1]).y)};
    if (i == 0) p.y0 = 0.0;
    if (i + 2 == cuts.size()) p.y1 = 0.0;
    pieces.push_back(p);
    levels.push_back(p.y1);
    levels.push_back(p.y0);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [&](double a, double b) { return std::abs(a - b) <= 1e-14 * t.config.R0; }),
               levels.end());

  const double k = static_cast<double>(n - 2);
  const quad::GaussRule& rule = quad::rule(10);
  auto row = [&](double h) {
    std::vector<double> xs;
    for (const auto& p : pieces) {
      const double lo = std::min(p.y0, p.y1), hi = std::max(p.y0, p.y1);
      if (h > lo && h < hi) xs.push_back(t.state_at(crossing(t, p, h)).x);
    }
    std::sort(xs.begin(), xs.end());
    if (xs.size() % 2 != 0) throw std::domain_error("trajectory_volume: odd crossing count");
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < xs.size(); j += 2)
      acc += quad::adaptive([&](double x) { return d.weight(std::hypot(x, h)); }, xs[j], xs[j + 1], 1e-13);
    return std::pow(h, k) * acc;
  };
  auto total_for = [&](int strips) {
    double total = 0.0;
    for (std::size_t b = 0; b + 1 < levels.size(); ++b) {
      const double h0 = levels[b], dh = levels[b + 1] - levels[b];
      auto f = [&](double u) {
        const double h = h0 + 0.5 * dh * (1.0 - std::cos(std::numbers::pi * u));
        return row(h) * 0.5 * dh * std::numbers::pi * std::sin(std::numbers::pi * u);
      };
      for (int i = 0; i < strips; ++i)
        total += quad::fixed(f, static_cast<double>(i) / strips, static_cast<double>(i + 1) / strips, rule);
    }
    return total;
  };

  VolumeResult r;
  int strips = 1;
  double prev = total_for(strips);
  while (true) {
    const double next = total_for(2 * strips);
    strips *= 2;
    r.last_relative_change = std::abs(next - prev) / std::max(std::abs(next), 1e-300);
    prev = next;
    if (r.last_relative_change < rel_change || strips >= max_strips) break;
  }
  r.volume = sphere_area(n - 2) * prev;
  r.strips = strips;
  return r;
}

inline double trajectory_volume(const Trajectory& t, int n, const Density& d) {
  return trajectory_volume_detailed(t, n, d).volume;
}

struct ProfilePoint {
  double volume = 0.0;
  double perimeter = 0.0;
  double radius = 0.0;
};

/// Radius of the centred ball with weighted volume V, by bisection.
inline double ball_radius_for_volume(double V, int n, const Density& d) {
  if (!(V > 0.0)) throw std::invalid_argument("ball_radius_for_volume: volume must be positive");
  double lo = 0.0, hi = 1.0;
  while (ball_measures(hi, n, d).volume < V) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw std::domain_error("ball_radius_for_volume: volume out of range");
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (ball_measures(mid, n, d).volume < V) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Isoperimetric profile from centred balls at the given volumes.
inline std::vector<ProfilePoint> profile(const Density& d, int n, const std::vector<double>& V_grid) {
  if (V_grid.empty()) throw std::invalid_argument("profile: empty volume grid");
  for (std::size_t i = 0; i < V_grid.size(); ++i) {
    if (!(V_grid[i] > 0.0)) throw std::invalid_argument("profile: volumes must be positive");
    if (i > 0 && !(V_grid[i] > V_grid[i - 1])) throw std::invalid_argument("profile: volumes must increase");
  }
  std::vector<ProfilePoint> out(V_grid.size());
  parallel_for(V_grid.size(), [&](std::size_t i) {
    const double R = ball_radius_for_volume(V_grid[i], n, d);
    out[i] = {V_grid[i], ball_measures(R, n, d).perimeter, R};
  });
  return out;
}

}  // namespace lcd
