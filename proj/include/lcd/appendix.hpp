#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcd/density.hpp"
#include "lcd/geometry.hpp"
#include "lcd/shooting.hpp"

namespace lcd {

/// Circle of radius r centred at (a, b), arclength parametrized
/// counterclockwise: alpha(x) = (a + r cos(x/r), b + r sin(x/r)).
struct CircleParam {
  double a = 0.0;
  double b = 0.0;
  double r = 1.0;

  void validate() const {
    if (!(r > 0.0)) throw std::invalid_argument("CircleParam: radius must be positive");
    if (!(b >= 0.0)) throw std::invalid_argument("CircleParam: centre height must be >= 0");
  }
  Vec2 point(double x) const { return {a + r * std::cos(x / r), b + r * std::sin(x / r)}; }
  Vec2 tangent(double x) const { return {-std::sin(x / r), std::cos(x / r)}; }
  /// Outward normal of the counterclockwise circle.
  Vec2 normal(double x) const { return {std::cos(x / r), std::sin(x / r)}; }
  CurveState state(double x) const {
    const Vec2 p = point(x);
    return {x, p.x, p.y, x / r + std::numbers::pi / 2};
  }
};

namespace appendix_detail {

inline double norm_at(const CircleParam& cp, double x) {
  const double rho = norm(cp.point(x));
  if (!(rho > 1e-12 * (std::abs(cp.a) + cp.b + cp.r)))
    throw std::domain_error("appendix: circle passes through the origin");
  return rho;
}

}  // namespace appendix_detail

/// H1 = g'(|alpha|) (N . n) along the circle.
inline double h1_on_circle(const CircleParam& cp, double x, const Density& d) {
  cp.validate();
  const double rho = appendix_detail::norm_at(cp, x);
  const Vec2 N = (1.0 / rho) * cp.point(x);
  return d.dg(rho) * dot(N, cp.normal(x));
}

/// dH1/dx assembled term by term: the g'' transport term plus
/// g' (N' . n + N . n') with N' and n' from their component formulas.
inline double h1_prime_terms(const CircleParam& cp, double x, const Density& d) {
  cp.validate();
  const double s = std::sin(x / cp.r), c = std::cos(x / cp.r);
  const Vec2 al = cp.point(x);
  const double rho = appendix_detail::norm_at(cp, x);
  const Vec2 N = (1.0 / rho) * al;
  const Vec2 n = cp.normal(x);
  const Vec2 dal = cp.tangent(x);
  const Vec2 dN = (1.0 / rho) * dal + ((cp.a * s - cp.b * c) / (rho * rho * rho)) * al;
  const Vec2 dn = (1.0 / cp.r) * Vec2{-s, c};
  return d.d2g(rho) * dot(dal, N) * dot(N, n) + d.dg(rho) * (dot(dN, n) + dot(N, dn));
}

/// N' . n + N . n' in factored form:
/// (a r cos + b r sin + a^2 + b^2)(-a sin + b cos) / (r |alpha|^3).
inline double normal_rotation_factored(const CircleParam& cp, double x) {
  const double s = std::sin(x / cp.r), c = std::cos(x / cp.r);
  const double rho = appendix_detail::norm_at(cp, x);
  const double a = cp.a, b = cp.b, r = cp.r;
  return (a * r * c + b * r * s + a * a + b * b) * (-a * s + b * c) / (r * rho * rho * rho);
}

/// The same factor with the coefficient 3 on the b r sin term, as it is
/// printed in the source derivation. It only agrees with the others when
/// b sin(x/r) = 0.
inline double normal_rotation_as_printed(const CircleParam& cp, double x) {
  const double s = std::sin(x / cp.r), c = std::cos(x / cp.r);
  const double rho = appendix_detail::norm_at(cp, x);
  const double a = cp.a, b = cp.b, r = cp.r;
  return (a * r * c + 3.0 * b * r * s + a * a + b * b) * (-a * s + b * c) / (r * rho * rho * rho);
}

/// dH1/dx from the factored normal-rotation term.
inline double h1_prime_analytic(const CircleParam& cp, double x, const Density& d) {
  cp.validate();
  const double s = std::sin(x / cp.r), c = std::cos(x / cp.r);
  const double rho = appendix_detail::norm_at(cp, x);
  const Vec2 N = (1.0 / rho) * cp.point(x);
  const double transport = d.d2g(rho) * ((-cp.a * s + cp.b * c) / rho) * dot(N, cp.normal(x));
  return transport + d.dg(rho) * normal_rotation_factored(cp, x);
}

/// Hypotheses of the sign claim for dH1/dx at x.
struct H1PrimeHypotheses {
  bool weak = false;    // a, b >= 0, x in [0, pi r / 2], a sin >= b cos
  bool strict = false;  // additionally alpha(x) outside B_R(f) and a sin > b cos
};

inline H1PrimeHypotheses h1_prime_hypotheses(const CircleParam& cp, double x, const Density& d) {
  H1PrimeHypotheses h;
  const double s = std::sin(x / cp.r), c = std::cos(x / cp.r);
  const bool range = cp.a >= 0.0 && cp.b >= 0.0 && x >= 0.0 && x <= std::numbers::pi * cp.r / 2;
  h.weak = range && cp.a * s >= cp.b * c;
  h.strict = range && cp.a * s > cp.b * c && norm(cp.point(x)) > d.plateau_radius();
  return h;
}

struct H1SecondReport {
  bool applicable = false;  // b = 0, a > 0 and (a + r, 0) outside B_R(f)
  double transport_uncancelled = 0.0;  // g'' (N.n)(alpha''.alpha + alpha'.alpha') / |alpha|
  double transport_final = 0.0;        // g'' (-a/r) / (a + r)
  double rotation_term = 0.0;          // g' (-(a^2 + a^3/r) / (r (a+r)^3))
  double value = 0.0;                  // transport_final + rotation_term
  bool forms_agree = false;
  bool negative = false;
};

/// d^2 H1 / dx^2 at x = 0 for a circle centred on the axis.
inline H1SecondReport h1_second_at_zero(const CircleParam& cp, const Density& d) {
  cp.validate();
  if (cp.b != 0.0) throw std::invalid_argument("h1_second_at_zero: circle must be centred on the axis");
  if (!(cp.a > 0.0)) throw std::invalid_argument("h1_second_at_zero: centre must have a > 0");
  H1SecondReport r;
  const double a = cp.a, rr = cp.r;
  const Vec2 al = cp.point(0.0), dal = cp.tangent(0.0);
  const Vec2 ddal{-1.0 / rr, 0.0};
  const double rho = norm(al);
  const double Nn = dot((1.0 / rho) * al, cp.normal(0.0));
  r.transport_uncancelled = d.d2g(rho) * Nn * (dot(ddal, al) + dot(dal, dal)) / rho;
  r.transport_final = d.d2g(a + rr) * (-a / rr) / (a + rr);
  r.rotation_term = d.dg(a + rr) * (-(a * a + a * a * a / rr) / (rr * std::pow(a + rr, 3)));
  r.value = r.transport_final + r.rotation_term;
  r.forms_agree = std::abs(r.transport_uncancelled - r.transport_final) <=
                  1e-12 * std::max(1.0, std::abs(r.transport_final));
  r.applicable = a + rr > d.plateau_radius();
  r.negative = r.value < 0.0;
  return r;
}

struct LambdaF {
  double lambda = 0.0;
  double F = 0.0;
  double lambda_prime = 0.0;
  double F_prime = 0.0;
};

/// Canonical-circle curvature and centre along the circle, with their
/// derivatives, for x in (0, pi r).
inline LambdaF lambda_F_on_circle(const CircleParam& cp, double x) {
  cp.validate();
  if (!(x > 0.0 && x < std::numbers::pi * cp.r))
    throw std::out_of_range("lambda_F_on_circle: x must lie in (0, pi r)");
  const double s = std::sin(x / cp.r), c = std::cos(x / cp.r);
  const double a = cp.a, b = cp.b, r = cp.r;
  LambdaF o;
  o.lambda = s / (r * s + b);
  o.F = a - b * c / s;
  o.lambda_prime = b * c / (r * (r * s + b) * (r * s + b));
  o.F_prime = (b / r) * (1.0 / (s * s));
  return o;
}

struct RemarkReport {
  std::size_t checked = 0;
  std::size_t skipped = 0;             // kappa <= 0
  std::size_t restriction_holds = 0;   // samples with gamma'.N <= tol
  std::size_t inequality_holds = 0;    // samples with b cos - a sin <= tol
  std::size_t inconsistent = 0;        // restriction holds but inequality fails
  double max_value = -std::numeric_limits<double>::infinity();  // max b cos - a sin
  double max_identity_residual = 0.0;  // |(b cos - a sin) - |gamma| gamma'.N|
  bool consistent = true;
};

namespace appendix_detail {

/// Osculating circle at a curve point with kappa > 0 and the value
/// b cos(x/r) - a sin(x/r) at the tangency parameter.
inline double remark_value(const CurveState& st, double kappa) {
  const Vec2 n = st.outward_normal();
  const Vec2 centre = st.position() - (1.0 / kappa) * n;
  // alpha(x) = centre + r (cos(x/r), sin(x/r)) meets the point where
  // (cos, sin) equals the outward normal.
  return centre.y * n.x - centre.x * n.y;
}

}  // namespace appendix_detail

/// At each sample with kappa > 0, the osculating circle's b cos - a sin is
/// non-positive whenever the tangent restriction gamma'.N <= 0 holds.
inline RemarkReport admissibility_remark_check(const Trajectory& t, double tol = 1e-9) {
  RemarkReport r;
  for (const auto& smp : t.samples) {
    const double kappa = smp.bundle.kappa;
    if (!(kappa > 0.0) || !(smp.state.radius() > 0.0)) {
      ++r.skipped;
      continue;
    }
    ++r.checked;
    const double v = appendix_detail::remark_value(smp.state, kappa);
    const double tr = tangent_restriction(smp.state);
    const double scale = std::max(1.0, smp.state.radius() + 1.0 / kappa);
    r.max_value = std::max(r.max_value, v);
    r.max_identity_residual = std::max(r.max_identity_residual, std::abs(v - smp.state.radius() * tr));
    const bool restriction = tr <= tol;
    const bool inequality = v <= tol * scale;
    if (restriction) ++r.restriction_holds;
    if (inequality) ++r.inequality_holds;
    if (restriction && !inequality) ++r.inconsistent;
  }
  r.consistent = r.inconsistent == 0;
  return r;
}

/// Same check on a single state, for constructed cases.
inline double remark_value(const CurveState& st, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("remark_value: curvature must be positive");
  return appendix_detail::remark_value(st, kappa);
}

/// Central differences: first derivative step 1e-5, second 1e-4.
template <class Fn>
double fd_first(Fn&& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <class Fn>
double fd_second(Fn&& f, double x, double h = 1e-4) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// |a - b| / max(|a|, |b|, floor).
inline double relative_error(double a, double b, double floor = 1e-3) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

struct LemmaCheck {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // worst residual, or for sign claims the largest signed excess
  bool passed = true;
};

struct AppendixReport {
  std::vector<LemmaCheck> checks;
  double printed_form_worst = 0.0;  // discrepancy of the printed coefficient
  bool passed = true;
};

/// Full sweep: closed forms against finite differences on fixed grids, and
/// every sign claim over `random_configs` random hypothesis-satisfying
/// configurations.
inline AppendixReport verify_appendix(const Density& d, std::uint64_t seed = 1, int random_configs = 1000,
                                      double fd_tol = 1e-6) {
  AppendixReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double pi = std::numbers::pi;
  auto add = [&](LemmaCheck c) {
    if (c.cases == 0 || !std::isfinite(c.worst)) c.worst = 0.0;
    c.passed = c.failures == 0;
    rep.passed = rep.passed && c.passed;
    rep.checks.push_back(std::move(c));
  };

  // dH1/dx forms against a central difference on a 50-point grid.
  {
    LemmaCheck terms{"h1_prime_terms_vs_fd"}, factored{"h1_prime_factored_vs_fd"};
    for (int i = 0; i < 50; ++i) {
      const CircleParam cp{0.2 + 2.0 * ((i * 7) % 50) / 50.0, 1.5 * ((i * 11) % 50) / 50.0,
                           0.3 + 1.7 * ((i * 13) % 50) / 50.0};
      const double x = (0.05 + 0.9 * ((i * 17) % 50) / 50.0) * pi * cp.r / 2;
      const double fd = fd_first([&](double u) { return h1_on_circle(cp, u, d); }, x);
      const double scale = std::max(1.0, std::abs(h1_on_circle(cp, x, d)));
      for (auto* c : {&terms, &factored}) {
        const double an = c == &terms ? h1_prime_terms(cp, x, d) : h1_prime_analytic(cp, x, d);
        const double e = std::abs(an - fd) / std::max(std::abs(fd), scale);
        ++c->cases;
        c->worst = std::max(c->worst, e);
        if (!(e <= fd_tol)) ++c->failures;
      }
      rep.printed_form_worst = std::max(rep.printed_form_worst, std::abs(normal_rotation_as_printed(cp, x) -
                                                                         normal_rotation_factored(cp, x)));
    }
    add(terms);
    add(factored);
  }

  // Sign claims for dH1/dx.
  {
    LemmaCheck weak{"h1_prime_nonpositive"}, strict{"h1_prime_negative"};
    weak.worst = strict.worst = -std::numeric_limits<double>::infinity();
    int drawn = 0;
    while (static_cast<int>(weak.cases) < random_configs && ++drawn < 100 * random_configs) {
      const CircleParam cp{3.0 * U(rng), 3.0 * U(rng), 0.1 + 2.9 * U(rng)};
      const double x = U(rng) * pi * cp.r / 2;
      if (norm(cp.point(x)) < 1e-9) continue;
      const auto h = h1_prime_hypotheses(cp, x, d);
      if (!h.weak) continue;
      const double v = h1_prime_analytic(cp, x, d);
      ++weak.cases;
      weak.worst = std::max(weak.worst, v);
      if (v > 1e-12) ++weak.failures;
      const double s = std::sin(x / cp.r), c = std::cos(x / cp.r);
      if (h.strict && cp.a * s - cp.b * c > 1e-6 && d.dg(norm(cp.point(x))) > 1e-6) {
        ++strict.cases;
        strict.worst = std::max(strict.worst, v);
        if (!(v < -1e-12)) ++strict.failures;
      }
    }
    if (weak.cases < static_cast<std::size_t>(random_configs)) ++weak.failures;
    add(weak);
    add(strict);
  }

  // Second derivative at 0: cancellation, finite difference and sign.
  {
    LemmaCheck forms{"h1_second_forms_agree"}, fd{"h1_second_vs_fd"}, sign{"h1_second_negative"};
    sign.worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
      const CircleParam cp{0.1 + 4.9 * U(rng), 0.0, 0.1 + 4.9 * U(rng)};
      const auto r = h1_second_at_zero(cp, d);
      ++forms.cases;
      if (!r.forms_agree) ++forms.failures;
      forms.worst = std::max(forms.worst, std::abs(r.transport_uncancelled - r.transport_final));
      const double num = fd_second([&](double u) { return h1_on_circle(cp, u, d); }, 0.0);
      const double e = std::abs(num - r.value) / std::max(1.0, std::abs(r.value));
      ++fd.cases;
      fd.worst = std::max(fd.worst, e);
      if (!(e <= 1e-5)) ++fd.failures;
      if (!r.applicable) continue;
      ++sign.cases;
      sign.worst = std::max(sign.worst, r.value);
      if (!r.negative) ++sign.failures;
    }
    add(forms);
    add(fd);
    add(sign);
  }

  // Canonical-circle closed forms against canonical_circle and its
  // finite differences.
  {
    LemmaCheck closed{"lambda_F_vs_canonical_circle"}, deriv{"lambda_F_prime_vs_fd"};
    for (int i = 0; i < 50; ++i) {
      const CircleParam cp{-2.0 + 4.0 * ((i * 7) % 50) / 50.0, 2.0 * ((i * 11) % 50) / 50.0,
                           0.3 + 1.7 * ((i * 13) % 50) / 50.0};
      const double lo = 0.1, hi = pi * cp.r - 0.1;
      const double x = lo + (hi - lo) * ((i * 17) % 50 + 0.5) / 50.0;
      const LambdaF o = lambda_F_on_circle(cp, x);
      auto lam = [&](double u) { return canonical_circle(cp.state(u)).lambda; };
      auto F = [&](double u) {
        const CurveState st = cp.state(u);
        return geom::is_vertical(st.theta) ? st.x : center_F(st);
      };
      const double e0 = std::max(relative_error(o.lambda, lam(x)), relative_error(o.F, F(x)));
      ++closed.cases;
      closed.worst = std::max(closed.worst, e0);
      if (!(e0 <= fd_tol)) ++closed.failures;
      const double lscale = std::max(std::abs(o.lambda), 1.0 / cp.r);
      const double fscale = std::max(1.0, std::abs(o.F));
      const double e1 = std::max(std::abs(o.lambda_prime - fd_first(lam, x)) / std::max(std::abs(o.lambda_prime), lscale),
                                 std::abs(o.F_prime - fd_first(F, x)) / std::max(std::abs(o.F_prime), fscale));
      ++deriv.cases;
      deriv.worst = std::max(deriv.worst, e1);
      if (!(e1 <= fd_tol)) ++deriv.failures;
    }
    add(closed);
    add(deriv);
  }

  // Sign claims for lambda' and F'.
  {
    LemmaCheck lam{"lambda_prime_nonpositive"}, F{"F_prime_nonnegative"};
    lam.worst = F.worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < random_configs; ++i) {
      const CircleParam cp{-3.0 + 6.0 * U(rng), 3.0 * U(rng), 0.1 + 2.9 * U(rng)};
      const double x1 = pi * cp.r * (0.5 + 0.5 * U(rng) * (1.0 - 1e-9));
      const double x2 = pi * cp.r * 0.5 * std::max(1e-9, U(rng));
      const double lp = lambda_F_on_circle(cp, x1).lambda_prime;
      const double fp = lambda_F_on_circle(cp, x2).F_prime;
      ++lam.cases;
      ++F.cases;
      lam.worst = std::max(lam.worst, lp);
      F.worst = std::max(F.worst, -fp);
      if (lp > 0.0) ++lam.failures;
      if (fp < 0.0) ++F.failures;
    }
    add(lam);
    add(F);
  }
  return rep;
}

}  // namespace lcd
