#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lcd {

/// Radial density f(x) = exp(g(|x|)) with g smooth, even and convex.
///
/// Derivatives of g are analytic per kind. Finite differences are only
/// used by the test suites to cross-check them.
class Density {
public:
  enum class Kind { constant, quadratic, cosh, plateau, custom };

  /// f = exp(c0)
  static Density constant(double c0 = 0.0) {
    Density d(Kind::constant);
    d.c0_ = c0;
    return d;
  }

  /// g(r) = a r^2
  static Density quadratic(double a) {
    require_nonnegative(a, "quadratic coefficient");
    Density d(Kind::quadratic);
    d.a_ = a;
    return d;
  }

  /// g(r) = a cosh(r) - a
  static Density cosh(double a) {
    require_nonnegative(a, "cosh coefficient");
    Density d(Kind::cosh);
    d.a_ = a;
    return d;
  }

  /// g(r) = a max(0, r - R_p)^3; g is flat on the ball of radius R_p.
  static Density plateau(double plateau_radius, double a) {
    require_nonnegative(plateau_radius, "plateau radius");
    require_nonnegative(a, "plateau coefficient");
    Density d(Kind::plateau);
    d.plateau_radius_ = plateau_radius;
    d.a_ = a;
    return d;
  }

  /// g(r) = sum_k coeffs[k] r^k. Odd powers must vanish so g is even.
  static Density custom(std::vector<double> coeffs) {
    for (std::size_t k = 1; k < coeffs.size(); k += 2) {
      if (coeffs[k] != 0.0) {
        throw std::invalid_argument("custom density: odd power r^" +
                                    std::to_string(k) + " has nonzero coefficient");
      }
    }
    Density d(Kind::custom);
    d.coeffs_ = std::move(coeffs);
    return d;
  }

  Kind kind() const noexcept { return kind_; }
  double coefficient() const noexcept { return a_; }
  double offset() const noexcept { return c0_; }
  double hinge_radius() const noexcept { return plateau_radius_; }
  const std::vector<double>& polynomial() const noexcept { return coeffs_; }

  /// g^(order)(r) for order in 0..3.
  double eval(double r, int order = 0) const {
    if (!(r >= 0.0)) throw std::domain_error("density: negative radius");
    if (order < 0 || order > 3) throw std::invalid_argument("density: order must be 0..3");
    switch (kind_) {
      case Kind::constant:
        return order == 0 ? c0_ : 0.0;
      case Kind::quadratic:
        switch (order) {
          case 0: return a_ * r * r;
          case 1: return 2.0 * a_ * r;
          case 2: return 2.0 * a_;
          default: return 0.0;
        }
      case Kind::cosh:
        switch (order) {
          case 0: return a_ * (std::cosh(r) - 1.0);
          case 1: return a_ * std::sinh(r);
          case 2: return a_ * std::cosh(r);
          default: return a_ * std::sinh(r);
        }
      case Kind::plateau: {
        const double t = r - plateau_radius_;
        if (t <= 0.0) return 0.0;
        switch (order) {
          case 0: return a_ * t * t * t;
          case 1: return 3.0 * a_ * t * t;
          case 2: return 6.0 * a_ * t;
          default: return 6.0 * a_;
        }
      }
      case Kind::custom:
        return eval_polynomial(r, order);
    }
    return 0.0;
  }

  double g(double r) const { return eval(r, 0); }
  double dg(double r) const { return eval(r, 1); }
  double d2g(double r) const { return eval(r, 2); }
  double d3g(double r) const { return eval(r, 3); }

  /// f(r) = exp(g(r))
  double weight(double r) const { return std::exp(eval(r, 0)); }

  /// True when g is constant everywhere.
  bool is_flat() const noexcept {
    switch (kind_) {
      case Kind::constant: return true;
      case Kind::quadratic:
      case Kind::cosh:
      case Kind::plateau: return a_ == 0.0;
      case Kind::custom:
        for (std::size_t k = 1; k < coeffs_.size(); ++k)
          if (coeffs_[k] != 0.0) return false;
        return true;
    }
    return true;
  }

  /// R(f) = sup{|x| : f(x) = f(0)}; +infinity when f is constant.
  ///
  /// For custom polynomials this assumes convexity (which validate_convexity
  /// checks), so any nonconstant one has R(f) = 0.
  double plateau_radius() const noexcept {
    if (is_flat()) return std::numeric_limits<double>::infinity();
    return kind_ == Kind::plateau ? plateau_radius_ : 0.0;
  }

private:
  explicit Density(Kind k) : kind_(k) {}

  static void require_nonnegative(double v, const char* what) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string("density: ") + what + " must be >= 0");
  }

  double eval_polynomial(double r, int order) const {
    // Horner on the order-th derivative coefficients.
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > static_cast<std::size_t>(order);) {
      double falling = 1.0;
      for (int j = 0; j < order; ++j) falling *= static_cast<double>(k - j);
      acc = acc * r + coeffs_[k] * falling;
    }
    return acc;
  }

  Kind kind_;
  double c0_ = 0.0;
  double a_ = 0.0;
  double plateau_radius_ = 0.0;
  std::vector<double> coeffs_;
};

struct ConvexityReport {
  bool passed = true;
  double min_second_derivative = std::numeric_limits<double>::infinity();
  std::vector<double> violating_radii;
};

/// Samples g'' on a uniform grid of [0, r_max] and reports points where it
/// drops below -tol.
inline ConvexityReport validate_convexity(const Density& d, double r_max, std::size_t samples,
                                          double tol = 1e-12) {
  if (samples < 2) throw std::invalid_argument("validate_convexity: need at least 2 samples");
  if (!(r_max >= 0.0)) throw std::invalid_argument("validate_convexity: r_max must be >= 0");
  ConvexityReport rep;
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = r_max * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double g2 = d.eval(r, 2);
    rep.min_second_derivative = std::min(rep.min_second_derivative, g2);
    if (g2 < -tol) {
      rep.passed = false;
      rep.violating_radii.push_back(r);
    }
  }
  return rep;
}

inline const char* to_string(Density::Kind k) {
  switch (k) {
    case Density::Kind::constant: return "constant";
    case Density::Kind::quadratic: return "quadratic";
    case Density::Kind::cosh: return "cosh";
    case Density::Kind::plateau: return "plateau";
    case Density::Kind::custom: return "custom";
  }
  return "unknown";
}

}  // namespace lcd
