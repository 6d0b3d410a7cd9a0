#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <utility>

namespace lcd::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct StepResult {
  Vec<N> y;    // fifth-order solution
  Vec<N> err;  // difference to the embedded fourth-order solution
};

/// One Dormand-Prince 5(4) step of length h from (t, y).
template <std::size_t N, class Rhs>
StepResult<N> dormand_prince_step(const Rhs& f, double t, const Vec<N>& y, double h) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  // b - b* of the embedded pair (the 7th stage is FSAL with b7* = 1/40).
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto axpy = [&](std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [coef, k] : terms)
      for (std::size_t i = 0; i < N; ++i) out[i] += h * coef * (*k)[i];
    return out;
  };

  const Vec<N> k1 = f(t, y);
  const Vec<N> k2 = f(t + c2 * h, axpy({{a21, &k1}}));
  const Vec<N> k3 = f(t + c3 * h, axpy({{a31, &k1}, {a32, &k2}}));
  const Vec<N> k4 = f(t + c4 * h, axpy({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
  const Vec<N> k5 = f(t + c5 * h, axpy({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
  const Vec<N> k6 = f(t + h, axpy({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
  StepResult<N> r;
  r.y = axpy({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const Vec<N> k7 = f(t + h, r.y);
  for (std::size_t i = 0; i < N; ++i)
    r.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  return r;
}

struct StepControl {
  double tolerance = 1e-10;  // per-step error, scaled by max(1, |y_i|)
  double h_min = 1e-14;
  double h_max = 0.1;
  double safety = 0.9;
  double max_growth = 5.0;
  double max_shrink = 0.2;
};

template <std::size_t N>
double error_norm(const StepResult<N>& r, const Vec<N>& y0, double tol) {
  double e = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(r.y[i]) || !std::isfinite(r.err[i])) return std::numeric_limits<double>::infinity();
    const double scale = tol * std::max({1.0, std::abs(y0[i]), std::abs(r.y[i])});
    e = std::max(e, std::abs(r.err[i]) / scale);
  }
  return e;
}

template <std::size_t N>
struct AcceptedStep {
  bool ok = false;  // false on step-size underflow
  double h_taken = 0.0;
  double h_next = 0.0;
  Vec<N> y;
};

/// Retries from (t, y) with shrinking h until the local error is within
/// tolerance. A non-finite stage result counts as a rejected step.
template <std::size_t N, class Rhs>
AcceptedStep<N> adaptive_step(const Rhs& f, double t, const Vec<N>& y, double h, const StepControl& ctl,
                              double h_cap) {
  AcceptedStep<N> out;
  h = std::min({h, ctl.h_max, h_cap});
  while (true) {
    if (h < ctl.h_min) return out;
    const StepResult<N> r = dormand_prince_step<N>(f, t, y, h);
    double e = error_norm(r, y, ctl.tolerance);
    if (!std::isfinite(e)) e = 1e10;
    if (e <= 1.0) {
      out.ok = true;
      out.h_taken = h;
      out.y = r.y;
      const double grow = e > 0.0 ? ctl.safety * std::pow(e, -0.2) : ctl.max_growth;
      out.h_next = std::min(ctl.h_max, h * std::clamp(grow, 1.0, ctl.max_growth));
      return out;
    }
    h *= std::clamp(ctl.safety * std::pow(e, -0.25), ctl.max_shrink, 0.9);
  }
}

}  // namespace lcd::ode
