#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "lcd/density.hpp"
#include "lcd/geometry.hpp"
#include "lcd/parallel.hpp"

namespace lcd {

/// Occupancy fractions on a polar grid. Angles are measured from the
/// positive e1 axis: for n = 2 they cover [-pi, pi] (the whole plane), for
/// n = 3 the polar angle covers [0, pi] and cells are bands of the
/// axially symmetric set obtained by revolving about e1.
struct GridSet {
  int n = 2;
  std::vector<double> r_edges;
  std::vector<double> a_edges;
  std::vector<double> occupancy;  // row-major, radial index first

  std::size_t radial_cells() const { return r_edges.size() - 1; }
  std::size_t angular_cells() const { return a_edges.size() - 1; }
  double& at(std::size_t i, std::size_t j) { return occupancy[i * angular_cells() + j]; }
  double at(std::size_t i, std::size_t j) const { return occupancy[i * angular_cells() + j]; }
  double r_mid(std::size_t i) const { return 0.5 * (r_edges[i] + r_edges[i + 1]); }
  double a_mid(std::size_t j) const { return 0.5 * (a_edges[j] + a_edges[j + 1]); }

  /// Uniform grid on [0, r_max] with empty occupancy.
  static GridSet polar(int n, double r_max, std::size_t nr, std::size_t na) {
    if (n != 2 && n != 3) throw std::invalid_argument("GridSet: dimension must be 2 or 3");
    if (!(r_max > 0.0) || nr < 1 || na < 2) throw std::invalid_argument("GridSet: bad grid size");
    if (n == 2 && na % 2 != 0) throw std::invalid_argument("GridSet: n = 2 needs an even angular count");
    GridSet g;
    g.n = n;
    for (std::size_t i = 0; i <= nr; ++i) g.r_edges.push_back(r_max * static_cast<double>(i) / static_cast<double>(nr));
    const double lo = n == 2 ? -std::numbers::pi : 0.0;
    for (std::size_t j = 0; j <= na; ++j)
      g.a_edges.push_back(lo + (std::numbers::pi - lo) * static_cast<double>(j) / static_cast<double>(na));
    g.occupancy.assign(nr * na, 0.0);
    return g;
  }

  void validate() const {
    if (n != 2 && n != 3) throw std::invalid_argument("GridSet: dimension must be 2 or 3");
    if (r_edges.size() < 2 || a_edges.size() < 3) throw std::invalid_argument("GridSet: too few edges");
    if (r_edges.front() < 0.0) throw std::invalid_argument("GridSet: radii must be >= 0");
    for (std::size_t i = 1; i < r_edges.size(); ++i)
      if (!(r_edges[i] > r_edges[i - 1])) throw std::invalid_argument("GridSet: radial edges must increase");
    for (std::size_t j = 1; j < a_edges.size(); ++j)
      if (!(a_edges[j] > a_edges[j - 1])) throw std::invalid_argument("GridSet: angular edges must increase");
    const double lo = n == 2 ? -std::numbers::pi : 0.0;
    if (std::abs(a_edges.front() - lo) > 1e-12 || std::abs(a_edges.back() - std::numbers::pi) > 1e-12)
      throw std::invalid_argument("GridSet: angular edges must span the full range");
    if (n == 2) {
      const std::size_t m = a_edges.size() - 1;
      for (std::size_t j = 0; j <= m; ++j)
        if (std::abs(a_edges[j] + a_edges[m - j]) > 1e-12)
          throw std::invalid_argument("GridSet: n = 2 angular edges must be symmetric about 0");
    }
    if (occupancy.size() != radial_cells() * angular_cells())
      throw std::invalid_argument("GridSet: occupancy size does not match the grid");
    for (double v : occupancy)
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("GridSet: occupancy must lie in [0, 1]");
  }
};

/// Unweighted (n-1)-measure of angular cell j on the sphere of radius r:
/// arc length for n = 2, spherical band area for n = 3.
inline double band_measure(const GridSet& g, std::size_t j, double r) {
  if (g.n == 2) return r * (g.a_edges[j + 1] - g.a_edges[j]);
  return 2.0 * std::numbers::pi * r * r * (std::cos(g.a_edges[j]) - std::cos(g.a_edges[j + 1]));
}

/// Exact unweighted n-volume of cell (i, j).
inline double cell_volume(const GridSet& g, std::size_t i, std::size_t j) {
  const double r0 = g.r_edges[i], r1 = g.r_edges[i + 1];
  if (g.n == 2) return 0.5 * (r1 * r1 - r0 * r0) * (g.a_edges[j + 1] - g.a_edges[j]);
  return 2.0 * std::numbers::pi * (r1 * r1 * r1 - r0 * r0 * r0) / 3.0 *
         (std::cos(g.a_edges[j]) - std::cos(g.a_edges[j + 1]));
}

/// Weighted (n-1)-measure of the set on shell i, evaluated on the sphere
/// through the shell midpoint with weight e^g(r_mid).
inline double shell_measure(const GridSet& g, std::size_t i, const Density& d) {
  if (i >= g.radial_cells()) throw std::out_of_range("shell_measure: radial index out of range");
  const double r = g.r_mid(i);
  double m = 0.0;
  for (std::size_t j = 0; j < g.angular_cells(); ++j) m += g.at(i, j) * band_measure(g, j, r);
  return d.weight(r) * m;
}

/// Weighted volume, with the weight constant per shell at its midpoint.
inline double weighted_volume(const GridSet& g, const Density& d) {
  double v = 0.0;
  for (std::size_t i = 0; i < g.radial_cells(); ++i) {
    double shell = 0.0;
    for (std::size_t j = 0; j < g.angular_cells(); ++j) shell += g.at(i, j) * cell_volume(g, i, j);
    v += d.weight(g.r_mid(i)) * shell;
  }
  return v;
}

namespace sym_detail {

/// Angular cells grouped in order of distance from the positive e1 axis;
/// mirror pairs form one group for n = 2.
inline std::vector<std::vector<std::size_t>> fill_order(const GridSet& g) {
  std::vector<std::vector<std::size_t>> groups;
  const std::size_t m = g.angular_cells();
  if (g.n == 3) {
    for (std::size_t j = 0; j < m; ++j) groups.push_back({j});
  } else {
    for (std::size_t k = 0; k < m / 2; ++k) groups.push_back({m / 2 + k, m / 2 - 1 - k});
  }
  return groups;
}

/// True when the shell is already a cap: full groups, then at most one
/// partial group with equal fractions, then empty groups.
inline bool is_cap(const GridSet& g, std::size_t i, const std::vector<std::vector<std::size_t>>& groups) {
  int phase = 0;  // 0 full, 1 after partial, 2 empty
  for (const auto& grp : groups) {
    const double v = g.at(i, grp.front());
    for (std::size_t j : grp)
      if (g.at(i, j) != v) return false;
    if (phase == 0) {
      if (v == 1.0) continue;
      phase = v == 0.0 ? 2 : 1;
    } else if (v != 0.0) {
      return false;
    }
  }
  return true;
}

}  // namespace sym_detail

/// Replaces each shell by the cap about the positive e1 axis with the same
/// unweighted shell measure, filling cells outward from angle 0.
inline GridSet symmetrize(const GridSet& in) {
  in.validate();
  GridSet out = in;
  const auto groups = sym_detail::fill_order(in);
  parallel_for(in.radial_cells(), [&](std::size_t i) {
    if (sym_detail::is_cap(in, i, groups)) return;
    // The shell radius is a common factor, so measure at r = 1.
    double target = 0.0;
    for (std::size_t j = 0; j < in.angular_cells(); ++j) target += in.at(i, j) * band_measure(in, j, 1.0);
    for (const auto& grp : groups) {
      double cap = 0.0;
      for (std::size_t j : grp) cap += band_measure(in, j, 1.0);
      double frac;
      if (target >= cap) {
        frac = 1.0;
        target -= cap;
      } else {
        frac = std::max(0.0, target / cap);
        target = 0.0;
      }
      for (std::size_t j : grp) out.at(i, j) = frac;
    }
  });
  return out;
}

/// A planar region given by a membership test. For n = 3 grids the plane is
/// the meridian half-plane (x along e1, y the distance from the axis).
class Shape {
public:
  virtual ~Shape() = default;
  virtual bool contains(Vec2 p) const = 0;
};

class Disc : public Shape {
public:
  Disc(Vec2 c, double r) : c_(c), r_(r) {
    if (!(r > 0.0)) throw std::invalid_argument("disc: radius must be positive");
  }
  bool contains(Vec2 p) const override { return norm(p - c_) <= r_; }

private:
  Vec2 c_;
  double r_;
};

/// {r0 <= |p| <= r1, a0 <= angle(p) <= a1}, angle in (-pi, pi].
class AnnulusSector : public Shape {
public:
  AnnulusSector(double r0, double r1, double a0, double a1) : r0_(r0), r1_(r1), a0_(a0), a1_(a1) {
    if (!(r0 >= 0.0 && r1 > r0)) throw std::invalid_argument("annulus sector: need 0 <= r0 < r1");
    if (!(a1 > a0)) throw std::invalid_argument("annulus sector: need a0 < a1");
  }
  bool contains(Vec2 p) const override {
    const double r = norm(p);
    if (r < r0_ || r > r1_) return false;
    const double a = std::atan2(p.y, p.x);
    return a >= a0_ && a <= a1_;
  }

private:
  double r0_, r1_, a0_, a1_;
};

class Box : public Shape {
public:
  Box(Vec2 lo, Vec2 hi) : lo_(lo), hi_(hi) {
    if (!(hi.x > lo.x && hi.y > lo.y)) throw std::invalid_argument("box: empty");
  }
  bool contains(Vec2 p) const override { return p.x >= lo_.x && p.x <= hi_.x && p.y >= lo_.y && p.y <= hi_.y; }

private:
  Vec2 lo_, hi_;
};

class Union : public Shape {
public:
  explicit Union(std::vector<std::shared_ptr<const Shape>> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw std::invalid_argument("union: no parts");
  }
  bool contains(Vec2 p) const override {
    for (const auto& s : parts_)
      if (s->contains(p)) return true;
    return false;
  }

private:
  std::vector<std::shared_ptr<const Shape>> parts_;
};

/// Occupancy fractions by s x s supersampling of every cell, each
/// subsample weighted by its exact sub-cell volume.
inline GridSet rasterize(const Shape& shape, GridSet g, int supersample = 4) {
  if (supersample < 1) throw std::invalid_argument("rasterize: supersample must be >= 1");
  g.occupancy.assign(g.radial_cells() * g.angular_cells(), 0.0);
  g.validate();
  const auto s = static_cast<std::size_t>(supersample);
  parallel_for(g.radial_cells(), [&](std::size_t i) {
    for (std::size_t j = 0; j < g.angular_cells(); ++j) {
      double in = 0.0, total = 0.0;
      for (std::size_t p = 0; p < s; ++p) {
        const double r0 = g.r_edges[i] + (g.r_edges[i + 1] - g.r_edges[i]) * static_cast<double>(p) / s;
        const double r1 = g.r_edges[i] + (g.r_edges[i + 1] - g.r_edges[i]) * static_cast<double>(p + 1) / s;
        for (std::size_t q = 0; q < s; ++q) {
          const double a0 = g.a_edges[j] + (g.a_edges[j + 1] - g.a_edges[j]) * static_cast<double>(q) / s;
          const double a1 = g.a_edges[j] + (g.a_edges[j + 1] - g.a_edges[j]) * static_cast<double>(q + 1) / s;
          const double w = g.n == 2 ? 0.5 * (r1 * r1 - r0 * r0) * (a1 - a0)
                                    : (r1 * r1 * r1 - r0 * r0 * r0) * (std::cos(a0) - std::cos(a1));
          const double r = 0.5 * (r0 + r1), a = 0.5 * (a0 + a1);
          total += w;
          if (shape.contains({r * std::cos(a), r * std::sin(a)})) in += w;
        }
      }
      g.at(i, j) = total > 0.0 ? std::clamp(in / total, 0.0, 1.0) : 0.0;
    }
  });
  return g;
}

/// Weighted perimeter of the 0.5 level set of the occupancy, traced by
/// marching squares on the lattice of cell centres and mapped to the
/// plane. n = 2 integrates f ds around the whole boundary; n = 3 integrates
/// 2 pi y f ds along the meridian curve. Outside the outer radius counts as
/// empty; the angular direction wraps (n = 2) or reflects across the axis
/// (n = 3). A few [1 2 1] smoothing passes before tracing remove the
/// staircase bias of cap-stacked shells; with none, edges are placed by the
/// sharp-interface rule for area fractions. Features below the cell size are
/// not resolved.
inline double grid_perimeter(const GridSet& g, const Density& d, int smoothing = 2) {
  g.validate();
  if (smoothing < 0) throw std::invalid_argument("grid_perimeter: smoothing must be >= 0");
  const std::size_t nr = g.radial_cells(), na = g.angular_cells();
  auto wrap = [&](long j) {
    const long m = static_cast<long>(na);
    if (g.n == 2) return (j % m + m) % m;
    if (j < 0) return -1 - j;
    if (j >= m) return 2 * m - 1 - j;
    return j;
  };
  // Optional [1 2 1] / 4 passes in both lattice directions.
  std::vector<double> u = g.occupancy, tmp(u.size());
  for (int pass = 0; pass < smoothing; ++pass) {
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < na; ++j) {
        const long jl = wrap(static_cast<long>(j) - 1), jr = wrap(static_cast<long>(j) + 1);
        tmp[i * na + j] = 0.25 * (u[i * na + static_cast<std::size_t>(jl)] + 2.0 * u[i * na + j] + u[i * na + static_cast<std::size_t>(jr)]);
      }
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < na; ++j) {
        const double in = i > 0 ? tmp[(i - 1) * na + j] : tmp[i * na + j];
        const double out = i + 1 < nr ? tmp[(i + 1) * na + j] : 0.0;
        u[i * na + j] = 0.25 * (in + 2.0 * tmp[i * na + j] + out);
      }
  }
  // Lattice with one padded empty row outside and angular wrap / reflection.
  auto value = [&](long i, long j) -> double {
    if (i >= static_cast<long>(nr)) return 0.0;
    return u[static_cast<std::size_t>(i) * na + static_cast<std::size_t>(wrap(j))];
  };
  const double dr_out = g.r_edges[nr] - g.r_edges[nr - 1];
  auto radius = [&](long i) { return i < static_cast<long>(nr) ? g.r_mid(static_cast<std::size_t>(i)) : g.r_edges[nr] + 0.5 * dr_out; };
  auto angle = [&](long j) {
    const long m = static_cast<long>(na);
    if (j >= 0 && j < m) return g.a_mid(static_cast<std::size_t>(j));
    if (g.n == 2) {
      const double span = 2.0 * std::numbers::pi;
      return j < 0 ? g.a_mid(static_cast<std::size_t>(j + m)) - span : g.a_mid(static_cast<std::size_t>(j - m)) + span;
    }
    // Reflection across the axis: angle -a or 2 pi - a.
    return j < 0 ? -g.a_mid(static_cast<std::size_t>(-1 - j)) : 2.0 * std::numbers::pi - g.a_mid(static_cast<std::size_t>(2 * m - 1 - j));
  };
  auto point = [&](long i0, double fi, long j0, double fj) {
    // Linear position in (r, angle) lattice coordinates.
    const double r = radius(i0) + fi * (radius(i0 + 1) - radius(i0));
    const double a = angle(j0) + fj * (angle(j0 + 1) - angle(j0));
    return Vec2{r * std::cos(a), r * std::sin(a)};
  };
  auto seg_weight = [&](Vec2 p, Vec2 q) {
    const Vec2 m = 0.5 * (p + q);
    const double f = d.weight(norm(m));
    return g.n == 2 ? f * norm(q - p) : 2.0 * std::numbers::pi * std::abs(m.y) * f * norm(q - p);
  };

  // n = 2 wraps fully; n = 3 covers angle cells [0, na) plus the reflected
  // squares at both ends, counted with half weight since they straddle the axis.
  const long j_lo = g.n == 2 ? 0 : -1;
  const long j_hi = static_cast<long>(na);
  std::vector<double> per_row(nr, 0.0);
  parallel_for(nr, [&](std::size_t iu) {
    const long i = static_cast<long>(iu);
    double acc = 0.0;
    for (long j = j_lo; j < j_hi; ++j) {
      const double v00 = value(i, j), v10 = value(i + 1, j), v11 = value(i + 1, j + 1), v01 = value(i, j + 1);
      const int code = (v00 > 0.5) | ((v10 > 0.5) << 1) | ((v11 > 0.5) << 2) | ((v01 > 0.5) << 3);
      if (code == 0 || code == 15) continue;
      // Area fractions across a sharp edge: with the filled side first, the
      // edge sits (a + b - 1) cells past the shared face.
      auto lerp = [&](double a, double b) {
        if (smoothing > 0) return a == b ? 0.5 : std::clamp((0.5 - a) / (b - a), 0.0, 1.0);
        const double t = a > b ? 0.5 + (a + b - 1.0) : 0.5 - (a + b - 1.0);
        return std::clamp(t, 0.0, 1.0);
      };
      // Edge crossings: bottom (j fixed, i..i+1), right (i+1, j..j+1), top (j+1), left (i).
      const Vec2 e0 = point(i, lerp(v00, v10), j, 0.0);
      const Vec2 e1 = point(i, 1.0, j, lerp(v10, v11));
      const Vec2 e2 = point(i, lerp(v01, v11), j, 1.0);
      const Vec2 e3 = point(i, 0.0, j, lerp(v00, v01));
      double len = 0.0;
      switch (code) {
        case 1: case 14: len = seg_weight(e3, e0); break;
        case 2: case 13: len = seg_weight(e0, e1); break;
        case 3: case 12: len = seg_weight(e3, e1); break;
        case 4: case 11: len = seg_weight(e1, e2); break;
        case 6: case 9: len = seg_weight(e0, e2); break;
        case 7: case 8: len = seg_weight(e3, e2); break;
        case 5: case 10: {
          const bool centre = 0.25 * (v00 + v10 + v11 + v01) > 0.5;
          if ((code == 5) == centre) len = seg_weight(e3, e2) + seg_weight(e0, e1);
          else len = seg_weight(e3, e0) + seg_weight(e1, e2);
          break;
        }
        default: break;
      }
      if (g.n == 3 && (j < 0 || j + 1 >= static_cast<long>(na))) len *= 0.5;
      acc += len;
    }
    per_row[iu] = acc;
  });
  double total = 0.0;
  for (double v : per_row) total += v;
  return total;
}

struct NamedShape {
  std::string name;
  std::shared_ptr<const Shape> shape;
};

/// Fixed test corpus inside the disc of radius 2. For n = 3 each planar
/// shape is read in the meridian half-plane and revolved.
inline std::vector<NamedShape> symmetrization_corpus() {
  auto disc = [](double x, double y, double r) { return std::make_shared<const Disc>(Vec2{x, y}, r); };
  auto join = [](std::vector<std::shared_ptr<const Shape>> p) { return std::make_shared<const Union>(std::move(p)); };
  return {
      {"centred_disc", disc(0.0, 0.0, 1.0)},
      {"off_axis_disc", disc(1.0, 0.5, 0.6)},
      {"rear_disc", disc(-0.8, 0.3, 0.5)},
      {"disc_around_origin", disc(0.3, -0.2, 0.8)},
      {"annulus_sector", std::make_shared<const AnnulusSector>(0.8, 1.6, 0.3, 1.8)},
      {"annulus", std::make_shared<const AnnulusSector>(1.0, 1.5, -std::numbers::pi, std::numbers::pi)},
      {"box", std::make_shared<const Box>(Vec2{0.3, -0.4}, Vec2{1.3, 0.9})},
      {"two_discs", join({disc(0.8, 0.2, 0.5), disc(-0.6, -0.7, 0.4)})},
      {"overlapping_discs", join({disc(0.5, 0.5, 0.6), disc(0.2, -0.4, 0.5)})},
      {"sector_and_disc",
       join({std::make_shared<const AnnulusSector>(0.5, 1.2, -2.5, -1.0), disc(-0.9, 0.6, 0.35)})},
  };
}

}  // namespace lcd
