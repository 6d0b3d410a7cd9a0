#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lcd/density.hpp"
#include "lcd/geometry.hpp"
#include "lcd/parallel.hpp"
#include "lcd/rk.hpp"

namespace lcd {

/// Parameters of one shot from the axis point (R0, 0) with vertical tangent.
/// Length-like controls default to multiples of R0 (see make).
struct ShootingConfig {
  int n = 2;
  Density density = Density::constant();
  double R0 = 1.0;
  double c = 1.0;

  double tolerance = 1e-10;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  double max_step = 0.1;
  double S_max = 50.0;
  double departure_step = 1e-4;
  double escape_factor = 100.0;
  double kappa_max = 1e6;
  double event_tol = 1e-12;
  std::size_t max_steps = 200000;

  /// Arrival matching: on each descent through the band height the curve is
  /// compared against a smooth cap shot back from a trial axis point.
  bool match_arrival = true;
  double band_factor = 0.1;  // band height = min(band_factor R0, y_max / 2)
  double closure_y_tol = 1e-8;
  double closure_angle_tol = 1e-6;

  static ShootingConfig make(int n, Density d, double R0, double c) {
    ShootingConfig cfg;
    cfg.n = n;
    cfg.density = std::move(d);
    cfg.R0 = R0;
    cfg.c = c;
    cfg.initial_step = 1e-3 * R0;
    cfg.min_step = 1e-14 * R0;
    cfg.max_step = 0.1 * R0;
    cfg.S_max = 50.0 * R0;
    cfg.departure_step = 1e-4 * R0;
    return cfg;
  }

  void validate() const {
    if (n < 2) throw std::invalid_argument("shooting: dimension must be >= 2");
    if (!(R0 > 0.0) || !std::isfinite(R0)) throw std::invalid_argument("shooting: R0 must be positive");
    if (!std::isfinite(c)) throw std::invalid_argument("shooting: c must be finite");
    if (!(S_max > 0.0)) throw std::invalid_argument("shooting: S_max must be positive");
    if (!(tolerance > 0.0) || !(min_step > 0.0) || !(max_step >= min_step) || !(initial_step > 0.0) ||
        !(event_tol > 0.0))
      throw std::invalid_argument("shooting: step controls must be positive");
    if (!(departure_step > 0.0) || !(departure_step < S_max))
      throw std::invalid_argument("shooting: departure step must lie in (0, S_max)");
    if (max_steps == 0) throw std::invalid_argument("shooting: max_steps must be positive");
    if (!(escape_factor > 1.0) || !(kappa_max > 0.0))
      throw std::invalid_argument("shooting: escape factor and curvature cap must be positive");
    if (!(band_factor > 0.0) || !(closure_y_tol > 0.0) || !(closure_angle_tol > 0.0))
      throw std::invalid_argument("shooting: closure controls must be positive");
  }
};

/// c for which the centred circle of radius R solves Hf = c.
inline double ball_curvature(const Density& d, int n, double R) {
  return d.dg(R) + static_cast<double>(n - 1) / R;
}

struct Departure {
  CurveState state;     // at s = departure_step
  double kappa0 = 0.0;  // curvature at the axis point
  bool pole_mean_convex = true;
};

namespace shoot_detail {

/// Curvature at an axis point (pole, 0) with tangent (0, 1): lambda = kappa
/// there, so c = (n-1) kappa + H1.
inline double pole_kappa(const ShootingConfig& cfg, double pole) {
  const double H1 = cfg.density.dg(std::abs(pole)) * (pole > 0.0 ? 1.0 : -1.0);
  return (cfg.c - H1) / static_cast<double>(cfg.n - 1);
}

/// Third-order series from the axis point; x - pole and theta - pi/2 are
/// even and odd in s respectively.
inline CurveState series_state(double pole, double k0, double h) {
  CurveState st;
  st.s = h;
  st.theta = std::numbers::pi / 2 + k0 * h;
  st.x = pole - k0 * h * h / 2.0;
  st.y = h - k0 * k0 * h * h * h / 6.0;
  return st;
}

}  // namespace shoot_detail

inline Departure depart_axis(const ShootingConfig& cfg) {
  cfg.validate();
  Departure d;
  d.kappa0 = shoot_detail::pole_kappa(cfg, cfg.R0);
  d.pole_mean_convex = d.kappa0 > 0.0;
  d.state = shoot_detail::series_state(cfg.R0, d.kappa0, cfg.departure_step);
  return d;
}

enum class EventKind {
  axis_crossing,
  vertical_up,       // tangent (0, 1)
  horizontal_left,   // tangent (-1, 0)
  vertical_down,     // tangent (0, -1)
  horizontal_right,  // tangent (1, 0)
  plateau_boundary,  // |gamma| = R(f)
};

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::axis_crossing: return "axis_crossing";
    case EventKind::vertical_up: return "vertical_up";
    case EventKind::horizontal_left: return "horizontal_left";
    case EventKind::vertical_down: return "vertical_down";
    case EventKind::horizontal_right: return "horizontal_right";
    case EventKind::plateau_boundary: return "plateau_boundary";
  }
  return "unknown";
}

struct Event {
  EventKind kind = EventKind::axis_crossing;
  double s = 0.0;
  CurveState state;
  double kappa = 0.0;
  int direction = 0;  // sign of the event function's change
};

enum class Termination {
  axis_crossing,     // integrated through y = 0
  arrival_matched,   // joined a smooth cap at an axis point
  height_reached,    // internal: cap shots stop at the band height
  budget_exhausted,
  escaped,
  curvature_blowup,
  step_underflow,
};

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::axis_crossing: return "axis_crossing";
    case Termination::arrival_matched: return "arrival_matched";
    case Termination::height_reached: return "height_reached";
    case Termination::budget_exhausted: return "budget_exhausted";
    case Termination::escaped: return "escaped";
    case Termination::curvature_blowup: return "curvature_blowup";
    case Termination::step_underflow: return "step_underflow";
  }
  return "unknown";
}

struct TrajectorySample {
  CurveState state;
  CurvatureBundle bundle;
};

/// Join between the integrated curve and the cap shot back from the arrival
/// axis point.
struct ArrivalMatch {
  double pole_x = 0.0;
  double band_height = 0.0;
  double junction_s = 0.0;
  double position_residual = 0.0;
  double angle_defect = 0.0;
  double theta_shift = 0.0;  // unwrapped theta = theta_shift - cap angle
};

namespace shoot_detail {

using State3 = ode::Vec<3>;

inline double rhs_kappa(const ShootingConfig& cfg, double x, double y, double theta) {
  const double rho = std::hypot(x, y);
  if (!(rho > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const CurveState st{0.0, x, y, theta};
  if (y == 0.0 && !geom::is_vertical(theta)) return std::numeric_limits<double>::infinity();
  return kappa_from_Hf(st, cfg.c, cfg.n, cfg.density);
}

inline auto make_rhs(const ShootingConfig& cfg) {
  return [&cfg](double, const State3& u) -> State3 {
    return {std::cos(u[2]), std::sin(u[2]), rhs_kappa(cfg, u[0], u[1], u[2])};
  };
}

inline CurveState to_state(double s, const State3& u) { return {s, u[0], u[1], u[2]}; }
inline State3 to_vec(const CurveState& st) { return {st.x, st.y, st.theta}; }

}  // namespace shoot_detail

/// Half generating curve on [0, beta], integrated from the axis point.
class Trajectory {
public:
  ShootingConfig config;
  double pole = 0.0;  // x of the starting axis point
  Departure departure;
  std::vector<TrajectorySample> samples;  // increasing s; samples[0] is the axis point
  std::vector<Event> events;
  Termination termination = Termination::budget_exhausted;
  CurveState end_state;
  std::optional<ArrivalMatch> arrival;
  std::shared_ptr<const Trajectory> cap;  // set with arrival

  double length() const { return end_state.s; }

  /// State at arclength s in [0, length()], from one Dormand-Prince step off
  /// the preceding sample, the departure series, or the arrival cap.
  CurveState state_at(double s) const {
    if (!(s >= 0.0) || s > end_state.s) throw std::out_of_range("Trajectory::state_at: outside [0, length]");
    if (arrival && s > arrival->junction_s) {
      CurveState b = cap->state_at(std::max(0.0, end_state.s - s));
      return {s, -b.x, b.y, arrival->theta_shift - b.theta};
    }
    if (s <= config.departure_step) {
      if (s == 0.0) return samples.front().state;
      return shoot_detail::series_state(pole, departure.kappa0, s);
    }
    auto it = std::upper_bound(samples.begin(), samples.end(), s,
                               [](double v, const TrajectorySample& smp) { return v < smp.state.s; });
    const TrajectorySample& base = *(it - 1);
    if (base.state.s == s) return base.state;
    const auto rhs = shoot_detail::make_rhs(config);
    const auto r = ode::dormand_prince_step<3>(rhs, base.state.s, shoot_detail::to_vec(base.state), s - base.state.s);
    return shoot_detail::to_state(s, r.y);
  }

  /// Curvature from the Hf = c condition (the closing axis point included).
  double kappa_at(const CurveState& st) const {
    if (st.y == 0.0 && !samples.empty()) {
      if (st.s == 0.0) return departure.kappa0;
      if (st.s == end_state.s && arrival) return samples.back().bundle.kappa;
    }
    return shoot_detail::rhs_kappa(config, st.x, st.y, st.theta);
  }

  CurvatureBundle bundle_at(const CurveState& st) const {
    return curvature_bundle(st, kappa_at(st), config.n, config.density);
  }

  std::vector<const Event*> events_of(EventKind k) const {
    std::vector<const Event*> out;
    for (const auto& e : events)
      if (e.kind == k) out.push_back(&e);
    return out;
  }
};

namespace shoot_detail {

/// Bisection for the root of event(state) inside a step of length h from base.
template <class Rhs, class EventFn>
std::pair<double, State3> refine_event(const Rhs& rhs, double s0, const State3& base, double h, double e0,
                                       EventFn&& event, double tol) {
  double lo = 0.0, hi = h;
  State3 at_hi = ode::dormand_prince_step<3>(rhs, s0, base, h).y;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const State3 u = ode::dormand_prince_step<3>(rhs, s0, base, mid).y;
    const double e = event(u);
    if ((e > 0.0) == (e0 > 0.0) && e != 0.0) {
      lo = mid;
    } else {
      hi = mid;
      at_hi = u;
    }
  }
  return {s0 + hi, at_hi};
}

inline EventKind tangent_kind(long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return EventKind::horizontal_right;
    case 1: return EventKind::vertical_up;
    case 2: return EventKind::horizontal_left;
    default: return EventKind::vertical_down;
  }
}

Trajectory integrate(const ShootingConfig& cfg, double pole, double stop_height);

/// Joins the descending state `at` (y = band) to a smooth cap shot from a
/// trial axis point x_e, reflected in x and reversed. x_e is found by a
/// secant iteration on the x mismatch at the band height.
inline std::optional<std::pair<ArrivalMatch, Trajectory>> match_arrival(const ShootingConfig& cfg,
                                                                        const CurveState& at, double band) {
  auto cap_x = [&](double xe) -> std::optional<std::pair<double, Trajectory>> {
    if (!std::isfinite(xe) || std::abs(xe) < 1e-6 * cfg.R0) return std::nullopt;
    Trajectory cap = integrate(cfg, -xe, band);
    if (cap.termination != Termination::height_reached) return std::nullopt;
    return std::pair{at.x + cap.end_state.x, std::move(cap)};
  };
  const double sin_t = std::sin(at.theta);
  if (!(sin_t < 0.0)) return std::nullopt;
  double x0 = at.x - at.y * std::cos(at.theta) / sin_t;
  double x1 = x0 + 1e-3 * cfg.R0;
  auto f0 = cap_x(x0);
  auto f1 = cap_x(x1);
  if (!f0 || !f1) return std::nullopt;
  for (int it = 0; it < 40; ++it) {
    if (std::abs(f1->first) < 1e-14 * cfg.R0) break;
    const double denom = f1->first - f0->first;
    if (denom == 0.0) break;
    const double x2 = x1 - f1->first * (x1 - x0) / denom;
    auto f2 = cap_x(x2);
    if (!f2) return std::nullopt;
    x0 = x1;
    f0 = std::move(f1);
    x1 = x2;
    f1 = std::move(f2);
  }
  Trajectory& cap = f1->second;
  const double two_pi = 2.0 * std::numbers::pi;
  ArrivalMatch m;
  m.pole_x = x1;
  m.band_height = band;
  m.junction_s = at.s;
  m.position_residual = std::hypot(f1->first, at.y - cap.end_state.y);
  const double raw = at.theta + cap.end_state.theta;
  m.theta_shift = two_pi * std::round(raw / two_pi);
  m.angle_defect = raw - m.theta_shift;
  return std::pair{m, std::move(cap)};
}

/// Appends the reflected, reversed cap after the junction.
inline void attach_cap(Trajectory& t, ArrivalMatch m, Trajectory cap) {
  const double total = m.junction_s + cap.end_state.s;
  auto mapped = [&](const CurveState& b) {
    return CurveState{total - b.s, -b.x, b.y, m.theta_shift - b.theta};
  };
  for (auto it = cap.events.rbegin(); it != cap.events.rend(); ++it) {
    Event e = *it;
    e.state = mapped(it->state);
    e.s = e.state.s;
    if (e.kind == EventKind::plateau_boundary) {
      e.direction = -e.direction;
    } else {
      const long k = std::lround(e.state.theta / (std::numbers::pi / 2));
      e.kind = tangent_kind(k);
    }
    t.events.push_back(e);
  }
  for (auto it = cap.samples.rbegin(); it != cap.samples.rend(); ++it) {
    const CurveState st = mapped(it->state);
    if (st.s <= m.junction_s) continue;
    // The mirrored values are identical; recomputing lambda from the
    // shifted angle would lose digits near the axis.
    CurvatureBundle b = it->bundle;
    const double rho = st.radius();
    b.N = {st.x / rho, st.y / rho};
    t.samples.push_back({st, b});
  }
  t.end_state = t.samples.back().state;
  t.events.push_back({EventKind::axis_crossing, t.end_state.s, t.end_state, t.samples.back().bundle.kappa, -1});
  t.termination = Termination::arrival_matched;
  t.arrival = m;
  t.cap = std::make_shared<const Trajectory>(std::move(cap));
}

/// Core integrator. stop_height > 0 ends the run when y first rises
/// through it (used for caps); otherwise arrival matching is attempted on
/// each descent through the band.
inline Trajectory integrate(const ShootingConfig& cfg, double pole, double stop_height) {
  Trajectory t;
  t.config = cfg;
  t.pole = pole;
  t.departure.kappa0 = pole_kappa(cfg, pole);
  t.departure.pole_mean_convex = t.departure.kappa0 > 0.0;
  t.departure.state = series_state(pole, t.departure.kappa0, cfg.departure_step);
  const ShootingConfig& conf = t.config;
  const auto rhs = make_rhs(conf);
  const bool cap_mode = stop_height > 0.0;

  const CurveState axis{0.0, pole, 0.0, std::numbers::pi / 2};
  t.samples.push_back({axis, curvature_bundle(axis, t.departure.kappa0, cfg.n, cfg.density)});
  {
    const CurveState& d = t.departure.state;
    t.samples.push_back({d, curvature_bundle(d, t.kappa_at(d), cfg.n, cfg.density)});
  }

  ode::StepControl ctl;
  ctl.tolerance = cfg.tolerance;
  ctl.h_min = cfg.min_step;
  ctl.h_max = cfg.max_step;

  const double quarter = std::numbers::pi / 2;
  const double plateau = cfg.density.plateau_radius();
  const bool track_plateau = std::isfinite(plateau) && plateau > 0.0;
  double h = std::min(cfg.initial_step, cap_mode ? 0.25 * stop_height : cfg.initial_step);
  double y_max = t.departure.state.y;

  while (true) {
    const CurveState cur = t.samples.back().state;
    if (cur.s >= cfg.S_max) {
      t.termination = Termination::budget_exhausted;
      t.end_state = cur;
      break;
    }
    if (t.samples.size() > cfg.max_steps) {
      t.termination = Termination::step_underflow;
      t.end_state = cur;
      break;
    }
    const State3 u0 = to_vec(cur);
    const auto step = ode::adaptive_step<3>(rhs, cur.s, u0, h, ctl, cfg.S_max - cur.s);
    if (!step.ok) {
      t.termination = Termination::step_underflow;
      t.end_state = cur;
      break;
    }
    h = step.h_next;
    const double s1 = cur.s + step.h_taken;
    const CurveState next = to_state(s1, step.y);

    // Terminal candidates within this step; the earliest wins.
    std::optional<std::pair<double, CurveState>> stop;
    Termination stop_kind = Termination::axis_crossing;
    auto propose = [&](Termination kind, double e0, auto&& fn) {
      auto [s_hit, u_hit] = refine_event(rhs, cur.s, u0, step.h_taken, e0, fn, cfg.event_tol);
      if (!stop || s_hit < stop->first) {
        stop = std::pair{s_hit, to_state(s_hit, u_hit)};
        stop_kind = kind;
      }
    };
    if (cur.y > 0.0 && next.y <= 0.0)
      propose(Termination::axis_crossing, cur.y, [](const State3& u) { return u[1]; });
    if (cap_mode && cur.y < stop_height && next.y >= stop_height)
      propose(Termination::height_reached, cur.y - stop_height,
              [stop_height](const State3& u) { return u[1] - stop_height; });
    std::optional<std::pair<double, CurveState>> band_hit;
    double band = 0.0;
    if (!cap_mode && cfg.match_arrival) {
      band = std::min(cfg.band_factor * cfg.R0, 0.5 * y_max);
      if (cur.y > band && next.y <= band) {
        auto [s_hit, u_hit] = refine_event(rhs, cur.s, u0, step.h_taken, cur.y - band,
                                           [band](const State3& u) { return u[1] - band; }, cfg.event_tol);
        if (!stop || s_hit < stop->first) band_hit = std::pair{s_hit, to_state(s_hit, u_hit)};
      }
    }
    const double cutoff = band_hit ? band_hit->first : (stop ? stop->first : s1);

    std::vector<Event> found;
    const long k_from = static_cast<long>(std::floor(cur.theta / quarter));
    const long k_to = static_cast<long>(std::floor(next.theta / quarter));
    const long dir = k_to > k_from ? 1 : -1;
    for (long k = k_from; k != k_to; k += dir) {
      const long boundary = dir > 0 ? k + 1 : k;
      const double level = static_cast<double>(boundary) * quarter;
      auto [s_ev, u_ev] = refine_event(rhs, cur.s, u0, step.h_taken, cur.theta - level,
                                       [level](const State3& u) { return u[2] - level; }, cfg.event_tol);
      if (s_ev > cutoff) continue;
      const CurveState st = to_state(s_ev, u_ev);
      found.push_back({tangent_kind(boundary), s_ev, st, t.kappa_at(st), static_cast<int>(dir)});
    }
    if (track_plateau) {
      const double e0 = cur.radius() - plateau;
      const double e1 = next.radius() - plateau;
      if ((e0 > 0.0) != (e1 > 0.0)) {
        auto [s_ev, u_ev] = refine_event(rhs, cur.s, u0, step.h_taken, e0,
                                         [plateau](const State3& u) { return std::hypot(u[0], u[1]) - plateau; },
                                         cfg.event_tol);
        if (s_ev <= cutoff) {
          const CurveState st = to_state(s_ev, u_ev);
          found.push_back({EventKind::plateau_boundary, s_ev, st, t.kappa_at(st), e1 > 0.0 ? 1 : -1});
        }
      }
    }
    std::sort(found.begin(), found.end(), [](const Event& a, const Event& b) { return a.s < b.s; });

    if (band_hit) {
      const CurveState& at = band_hit->second;
      auto matched = match_arrival(conf, at, band);
      if (matched && matched->first.position_residual < cfg.closure_y_tol &&
          std::abs(matched->first.angle_defect) < cfg.closure_angle_tol) {
        t.events.insert(t.events.end(), found.begin(), found.end());
        t.samples.push_back({at, curvature_bundle(at, t.kappa_at(at), cfg.n, cfg.density)});
        attach_cap(t, matched->first, std::move(matched->second));
        return t;
      }
    }
    if (stop) {
      for (const auto& e : found)
        if (e.s <= stop->first) t.events.push_back(e);
      const CurveState& st = stop->second;
      if (stop_kind == Termination::axis_crossing)
        t.events.push_back({EventKind::axis_crossing, st.s, st, std::numeric_limits<double>::quiet_NaN(), -1});
      t.termination = stop_kind;
      t.end_state = st;
      if (stop_kind == Termination::height_reached)
        t.samples.push_back({st, curvature_bundle(st, t.kappa_at(st), cfg.n, cfg.density)});
      break;
    }
    t.events.insert(t.events.end(), found.begin(), found.end());

    const double kappa = t.kappa_at(next);
    if (!std::isfinite(kappa) || std::abs(kappa) > cfg.kappa_max) {
      t.termination = Termination::curvature_blowup;
      t.end_state = next;
      break;
    }
    t.samples.push_back({next, curvature_bundle(next, kappa, cfg.n, cfg.density)});
    y_max = std::max(y_max, next.y);
    if (next.radius() > cfg.escape_factor * cfg.R0) {
      t.termination = Termination::escaped;
      t.end_state = next;
      break;
    }
  }
  return t;
}

}  // namespace shoot_detail

/// Adaptive Dormand-Prince integration of (x, y, theta)' = (cos, sin, kappa)
/// with kappa chosen so that Hf = c, from (R0, 0) until the curve returns to
/// the axis or a guard trips.
///
/// For n >= 3 a curve that reaches the axis transversally does so through
/// a mode growing like y^(2-n), so integrating into the axis cannot resolve
/// a perpendicular arrival. Instead, each descent through a band of height
/// min(0.1 R0, y_max / 2) is joined to the smooth cap shot from the axis
/// (which decays in that mode); a join within the closure tolerances ends
/// the curve at the cap's axis point.
inline Trajectory shoot(const ShootingConfig& cfg) {
  cfg.validate();
  return shoot_detail::integrate(cfg, cfg.R0, 0.0);
}

/// Arclength in [s0, s1] where y = h, for a piece on which y is monotone.
/// Safeguarded Newton on the dense trajectory (y' = sin theta).
inline double height_crossing(const Trajectory& t, double s0, double s1, double h) {
  double lo = s0, hi = s1;
  const double y0 = t.state_at(s0).y, y1 = t.state_at(s1).y;
  const bool rising = y1 > y0;
  double s = y1 != y0 ? lo + (hi - lo) * (h - y0) / (y1 - y0) : 0.5 * (lo + hi);
  s = std::clamp(s, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const CurveState st = t.state_at(s);
    const double f = st.y - h;
    if (f == 0.0) return s;
    if ((f < 0.0) == rising) lo = s; else hi = s;
    const double slope = std::sin(st.theta);
    double next = slope != 0.0 ? s - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) < 1e-15 * std::max(1.0, std::abs(s)) || hi - lo < 1e-15) return next;
    s = next;
  }
  return s;
}

enum class ClosureOutcome { closed_smooth, axis_nonperpendicular, budget_exhausted, escaped, curvature_blowup };

inline const char* to_string(ClosureOutcome o) {
  switch (o) {
    case ClosureOutcome::closed_smooth: return "closed_smooth";
    case ClosureOutcome::axis_nonperpendicular: return "axis_nonperpendicular";
    case ClosureOutcome::budget_exhausted: return "budget_exhausted";
    case ClosureOutcome::escaped: return "escaped";
    case ClosureOutcome::curvature_blowup: return "curvature_blowup";
  }
  return "unknown";
}

struct ClosureCriteria {
  double y_tol = 1e-8;
  double angle_tol = 1e-6;
  /// Guard terminations this close to the axis (relative to R0) count as
  /// axis arrivals.
  double axis_band = 1e-6;
};

struct ClosureReport {
  ClosureOutcome outcome = ClosureOutcome::budget_exhausted;
  CurveState end_state;
  double y_residual = 0.0;
  double angle_defect = 0.0;  // wrap(theta_end + pi/2) into (-pi, pi]
  std::optional<Vec2> limit_tangent;
  bool limit_tangent_consistent = true;  // nu_1 <= 0
  std::string note;
  std::vector<Event> events;
};

inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - std::numbers::pi;
}

/// Maps the termination of a trajectory onto a closure outcome. A matched
/// arrival reports the join residuals; a direct axis crossing reports the
/// end state.
inline ClosureReport classify_closure(const Trajectory& t, const ClosureCriteria& crit = {}) {
  ClosureReport r;
  r.end_state = t.end_state;
  r.events = t.events;
  if (t.arrival) {
    r.y_residual = t.arrival->position_residual;
    r.angle_defect = t.arrival->angle_defect;
  } else {
    r.y_residual = std::abs(t.end_state.y);
    r.angle_defect = wrap_angle(t.end_state.theta + std::numbers::pi / 2);
  }
  const bool near_axis = r.y_residual < crit.axis_band * t.config.R0;
  const bool arrived = t.termination == Termination::axis_crossing ||
                       t.termination == Termination::arrival_matched ||
                       ((t.termination == Termination::curvature_blowup ||
                         t.termination == Termination::step_underflow) &&
                        near_axis);
  if (arrived) {
    if (r.y_residual < crit.y_tol && std::abs(r.angle_defect) < crit.angle_tol) {
      r.outcome = ClosureOutcome::closed_smooth;
      return r;
    }
    r.outcome = ClosureOutcome::axis_nonperpendicular;
    const Vec2 nu = t.end_state.tangent();
    r.limit_tangent = nu;
    r.limit_tangent_consistent = nu.x <= 0.0;
    if (!r.limit_tangent_consistent)
      r.note = "inconsistent: limit tangent has nu_1 > 0, which would make the axis point a regular half-space point";
    return r;
  }
  switch (t.termination) {
    case Termination::budget_exhausted: r.outcome = ClosureOutcome::budget_exhausted; break;
    case Termination::escaped:
      r.outcome = ClosureOutcome::escaped;
      r.note = "inconclusive: left the escape radius";
      break;
    default: r.outcome = ClosureOutcome::curvature_blowup; break;
  }
  return r;
}

struct ScanCell {
  double R0 = 0.0;
  double c = 0.0;
  ClosureReport report;
  std::string error;  // set when the cell could not be run
};

/// One shoot + classify per (R0, c) pair, results in input order. Step
/// controls of `base` are rescaled to each R0.
inline std::vector<ScanCell> scan_closures(const ShootingConfig& base,
                                           const std::vector<std::pair<double, double>>& cells,
                                           const ClosureCriteria& crit = {}) {
  if (cells.empty()) throw std::invalid_argument("scan_closures: empty grid");
  std::vector<ScanCell> out(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    ScanCell& cell = out[i];
    cell.R0 = cells[i].first;
    cell.c = cells[i].second;
    try {
      ShootingConfig cfg = ShootingConfig::make(base.n, base.density, cell.R0, cell.c);
      cfg.tolerance = base.tolerance;
      cfg.match_arrival = base.match_arrival;
      cfg.closure_y_tol = crit.y_tol;
      cfg.closure_angle_tol = crit.angle_tol;
      cell.report = classify_closure(shoot(cfg), crit);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });
  return out;
}

/// Full product grid R0_grid x c_grid, R0-major.
inline std::vector<ScanCell> scan_closures(const ShootingConfig& base, const std::vector<double>& R0_grid,
                                           const std::vector<double>& c_grid, const ClosureCriteria& crit = {}) {
  if (R0_grid.empty() || c_grid.empty()) throw std::invalid_argument("scan_closures: empty grid");
  std::vector<std::pair<double, double>> cells;
  for (double R0 : R0_grid)
    for (double c : c_grid) cells.emplace_back(R0, c);
  return scan_closures(base, cells, crit);
}

}  // namespace lcd
