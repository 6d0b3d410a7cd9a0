#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lcd::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes by Newton iteration on P_n from the Chebyshev-like initial guess.
inline GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Cached rules for the orders used throughout the library.
inline const GaussRule& rule(std::size_t n) {
  static const GaussRule r5 = gauss_legendre(5);
  static const GaussRule r8 = gauss_legendre(8);
  static const GaussRule r10 = gauss_legendre(10);
  static const GaussRule r20 = gauss_legendre(20);
  switch (n) {
    case 5: return r5;
    case 8: return r8;
    case 10: return r10;
    case 20: return r20;
    default: throw std::invalid_argument("quad::rule: unsupported order");
  }
}

template <class F>
double fixed(F&& f, double a, double b, const GaussRule& r) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * f(mid + half * r.nodes[i]);
  return acc * half;
}

namespace detail {
template <class F>
double adaptive_step(F& f, double a, double b, double whole, double rel_tol, double abs_floor,
                     int depth) {
  const double m = 0.5 * (a + b);
  const GaussRule& r = rule(10);
  const double left = fixed(f, a, m, r);
  const double right = fixed(f, m, b, r);
  const double sum = left + right;
  if (depth <= 0 || std::abs(sum - whole) <= std::max(rel_tol * std::abs(sum), abs_floor)) return sum;
  return adaptive_step(f, a, m, left, rel_tol, 0.5 * abs_floor, depth - 1) +
         adaptive_step(f, m, b, right, rel_tol, 0.5 * abs_floor, depth - 1);
}
}  // namespace detail

/// Adaptive bisection with a 10-point Gauss-Legendre panel, stopping when a
/// panel and its two halves agree to rel_tol.
template <class F>
double adaptive(F&& f, double a, double b, double rel_tol = 1e-12, int max_depth = 40) {
  if (a == b) return 0.0;
  const double whole = fixed(f, a, b, rule(10));
  return detail::adaptive_step(f, a, b, whole, rel_tol, 1e-300, max_depth);
}

}  // namespace lcd::quad
