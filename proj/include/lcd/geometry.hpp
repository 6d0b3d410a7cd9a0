#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "lcd/density.hpp"

namespace lcd {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
  friend double norm(Vec2 a) { return std::hypot(a.x, a.y); }
};

/// Clockwise rotation by a quarter turn.
inline Vec2 perp_cw(Vec2 v) { return {v.y, -v.x}; }

/// A point of an arclength-parametrized generating curve in the (e1, e2)
/// half-plane. theta is the unwrapped tangent angle; the curve runs
/// counterclockwise so the outward normal is the tangent rotated clockwise.
struct CurveState {
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  Vec2 tangent() const { return {std::cos(theta), std::sin(theta)}; }
  Vec2 outward_normal() const { return {std::sin(theta), -std::cos(theta)}; }
  double radius() const { return std::hypot(x, y); }
};

/// Circle through the state point, tangent to the curve, centred on the
/// e1 axis. radius is +inf for the vertical-line case.
struct CanonicalCircleInfo {
  double center_x = 0.0;
  double radius = std::numeric_limits<double>::infinity();
  double lambda = 0.0;
};

struct CurvatureBundle {
  double kappa = 0.0;
  double lambda = 0.0;
  double H0 = 0.0;
  double H1 = 0.0;
  double Hf = 0.0;
  Vec2 N;
};

namespace geom {

/// |cos(theta)| below this counts as a vertical tangent.
inline constexpr double vertical_eps = 1e-9;

inline bool is_vertical(double theta) { return std::abs(std::cos(theta)) <= vertical_eps; }

/// Exactly on the e1 axis. Points with y < 0 belong to the mirror half and
/// use the same formulas.
inline bool on_axis(const CurveState& st) { return st.y == 0.0; }

/// lambda = -cos(theta)/y off the axis. On the axis (vertical tangent) the
/// canonical circle is the limit circle, whose curvature equals the curve's
/// own curvature there, so it must be supplied by the caller.
inline double signed_lambda(const CurveState& st, std::optional<double> axis_kappa) {
  if (!on_axis(st)) return -std::cos(st.theta) / st.y;
  if (!is_vertical(st.theta))
    throw std::domain_error("canonical circle undefined on the axis with a non-vertical tangent");
  if (!axis_kappa)
    throw std::invalid_argument("canonical circle on the axis needs the curve curvature");
  return *axis_kappa;
}

}  // namespace geom

inline CanonicalCircleInfo canonical_circle(const CurveState& st,
                                            std::optional<double> axis_kappa = std::nullopt) {
  const double lambda = geom::signed_lambda(st, axis_kappa);
  CanonicalCircleInfo c;
  c.lambda = lambda;
  if (lambda == 0.0 || (!geom::on_axis(st) && geom::is_vertical(st.theta))) {
    // Oriented vertical line; its "center" is where it meets the axis.
    c.center_x = st.x;
    c.radius = std::numeric_limits<double>::infinity();
    c.lambda = 0.0;
    return c;
  }
  c.center_x = st.x - std::sin(st.theta) / lambda;
  c.radius = 1.0 / std::abs(lambda);
  return c;
}

/// H0 = kappa + (n-2) lambda, H1 = g'(rho) (N . n), Hf = H0 + H1.
inline CurvatureBundle curvature_bundle(const CurveState& st, double kappa, int n, const Density& d) {
  if (n < 2) throw std::invalid_argument("curvature_bundle: dimension must be >= 2");
  const double rho = st.radius();
  if (!(rho > 0.0)) throw std::domain_error("curvature_bundle: state at the origin");
  CurvatureBundle b;
  b.kappa = kappa;
  b.lambda = geom::signed_lambda(st, kappa);
  b.N = {st.x / rho, st.y / rho};
  b.H0 = kappa + static_cast<double>(n - 2) * b.lambda;
  b.H1 = d.dg(rho) * ((st.x * std::sin(st.theta) - st.y * std::cos(st.theta)) / rho);
  b.Hf = b.H0 + b.H1;
  return b;
}

/// Curvature that makes Hf equal c at the state; the right-hand side of the
/// tangent-angle equation theta' = kappa.
inline double kappa_from_Hf(const CurveState& st, double c, int n, const Density& d) {
  if (n < 2) throw std::invalid_argument("kappa_from_Hf: dimension must be >= 2");
  const double rho = st.radius();
  if (!(rho > 0.0)) throw std::domain_error("kappa_from_Hf: state at the origin");
  const double H1 = d.dg(rho) * ((st.x * std::sin(st.theta) - st.y * std::cos(st.theta)) / rho);
  if (geom::on_axis(st)) {
    if (!geom::is_vertical(st.theta))
      throw std::domain_error("kappa_from_Hf: non-vertical tangent on the axis");
    // lambda = kappa on the axis, so c = (n-1) kappa + H1.
    return (c - H1) / static_cast<double>(n - 1);
  }
  return c - static_cast<double>(n - 2) * (-std::cos(st.theta) / st.y) - H1;
}

/// gamma' . N; non-positive along curves whose distance to the origin never
/// increases.
inline double tangent_restriction(const CurveState& st) {
  const double rho = st.radius();
  if (!(rho > 0.0)) throw std::domain_error("tangent_restriction: state at the origin");
  return (st.x * std::cos(st.theta) + st.y * std::sin(st.theta)) / rho;
}

/// e1-coordinate of the canonical-circle centre, F = x + y tan(theta).
inline double center_F(const CurveState& st) {
  if (geom::is_vertical(st.theta)) throw std::domain_error("F undefined at a vertical tangent");
  return st.x + st.y * std::tan(st.theta);
}

/// dF/ds = y (kappa - lambda) / cos^2(theta).
inline double center_F_prime(const CurveState& st, double kappa) {
  if (geom::is_vertical(st.theta)) throw std::domain_error("F' undefined at a vertical tangent");
  const double c = std::cos(st.theta);
  return (c + st.y * kappa) / (c * c);
}

/// A graph y = p(x1) sampled on a uniform grid.
struct SampledGraph {
  double x0 = 0.0;
  double h = 0.0;
  std::vector<double> values;
};

/// Which side of the graph the region bounded by the generating curve lies on.
enum class InwardNormal { downward, upward };

namespace detail {

/// Fornberg's recursion: weights for derivatives 0..m at z from nodes xs.
inline std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> xs, int m) {
  const std::size_t n = xs.size();
  std::vector<std::vector<double>> c(static_cast<std::size_t>(m + 1), std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = xs[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

}  // namespace detail

/// Inward unaveraged mean curvature of the hypersurface obtained by revolving
/// the graph y = p(x1) about the e1 axis, from the divergence of the unit
/// normal. Derivatives of p come from a 7-point local interpolant.
inline double mean_curvature_via_graph(const SampledGraph& p, double at, int n,
                                       InwardNormal side = InwardNormal::downward) {
  constexpr std::size_t stencil = 7;
  if (n < 2) throw std::invalid_argument("mean_curvature_via_graph: dimension must be >= 2");
  if (p.values.size() < stencil || !(p.h > 0.0))
    throw std::invalid_argument("mean_curvature_via_graph: insufficient samples");
  const double pos = (at - p.x0) / p.h;
  const double last = static_cast<double>(p.values.size() - 1);
  if (pos < 0.0 || pos > last) throw std::out_of_range("mean_curvature_via_graph: point outside samples");
  const auto centre = static_cast<long>(std::lround(pos));
  long first = centre - static_cast<long>(stencil / 2);
  first = std::max(0L, std::min(first, static_cast<long>(p.values.size() - stencil)));
  std::vector<double> xs(stencil);
  for (std::size_t i = 0; i < stencil; ++i) xs[i] = p.x0 + p.h * static_cast<double>(first + static_cast<long>(i));
  const auto w = detail::fornberg_weights(at, xs, 2);
  double v = 0.0, d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < stencil; ++i) {
    const double pi = p.values[static_cast<std::size_t>(first) + i];
    v += w[0][i] * pi;
    d1 += w[1][i] * pi;
    d2 += w[2][i] * pi;
  }
  if (!(v > 0.0)) throw std::domain_error("mean_curvature_via_graph: graph must be positive");
  const double q = 1.0 + d1 * d1;
  const double div = d2 / std::pow(q, 1.5) - static_cast<double>(n - 2) / (v * std::sqrt(q));
  return side == InwardNormal::downward ? -div : div;
}

}  // namespace lcd
