#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "lcd/density.hpp"
#include "lcd/geometry.hpp"
#include "lcd/shooting.hpp"
#include "lcd/symmetrization.hpp"

namespace lcd {

inline constexpr const char* version = "1.0.0";

/// Malformed user input: a density spec, a range or a file.
class SpecError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace io_detail {

inline double parse_number(std::string_view s, const std::string& what) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw SpecError(what + ": '" + std::string(s) + "' is not a finite number");
  return v;
}

inline std::vector<double> split_numbers(std::string_view s, char sep, const std::string& what) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(parse_number(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start), what));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double param(const nlohmann::json& p, const char* key, const std::string& kind) {
  if (!p.contains(key)) throw SpecError("density " + kind + ": missing parameter '" + key + "'");
  if (!p[key].is_number()) throw SpecError("density " + kind + ": parameter '" + std::string(key) + "' must be a number");
  return p[key].get<double>();
}

/// Rethrows argument errors from the density constructors as spec errors.
template <class Fn>
Density build(Fn&& fn) {
  try {
    return fn();
  } catch (const SpecError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
}

}  // namespace io_detail

/// Shortest round-trip decimal form; identical on every run.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// {"kind": ..., "params": {...}}.
inline Density density_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw SpecError("density spec must be an object with a string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  const nlohmann::json p = j.contains("params") ? j["params"] : nlohmann::json::object();
  if (!p.is_object()) throw SpecError("density " + kind + ": 'params' must be an object");
  using io_detail::param;
  return io_detail::build([&] {
    if (kind == "constant") return Density::constant(p.contains("c0") ? param(p, "c0", kind) : 0.0);
    if (kind == "quadratic") return Density::quadratic(param(p, "a", kind));
    if (kind == "cosh") return Density::cosh(param(p, "a", kind));
    if (kind == "plateau") return Density::plateau(param(p, "R_p", kind), param(p, "a", kind));
    if (kind == "custom") {
      if (!p.contains("coeffs") || !p["coeffs"].is_array()) throw SpecError("density custom: 'coeffs' must be an array");
      std::vector<double> c;
      for (const auto& v : p["coeffs"]) {
        if (!v.is_number()) throw SpecError("density custom: coefficients must be numbers");
        c.push_back(v.get<double>());
      }
      return Density::custom(std::move(c));
    }
    throw SpecError("unknown density kind '" + kind + "'");
  });
}

inline nlohmann::json density_to_json(const Density& d) {
  nlohmann::json p = nlohmann::json::object();
  switch (d.kind()) {
    case Density::Kind::constant: p["c0"] = d.offset(); break;
    case Density::Kind::quadratic:
    case Density::Kind::cosh: p["a"] = d.coefficient(); break;
    case Density::Kind::plateau:
      p["R_p"] = d.hinge_radius();
      p["a"] = d.coefficient();
      break;
    case Density::Kind::custom: p["coeffs"] = d.polynomial(); break;
  }
  return {{"kind", to_string(d.kind())}, {"params", p}};
}

/// "kind:params" shorthand (constant[:c0], quadratic:a, cosh:a,
/// plateau:R_p,a, custom:c0,c1,...) or an inline JSON object.
inline Density parse_density(const std::string& spec) {
  if (!spec.empty() && spec.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(spec);
    } catch (const nlohmann::json::parse_error& e) {
      throw SpecError(std::string("density JSON: ") + e.what());
    }
    return density_from_json(j);
  }
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const auto v = io_detail::split_numbers(rest, ',', "density " + kind);
  auto need = [&](std::size_t k) {
    if (v.size() != k)
      throw SpecError("density " + kind + ": expected " + std::to_string(k) + " parameter(s), got " + std::to_string(v.size()));
  };
  return io_detail::build([&] {
    if (kind == "constant") {
      if (v.size() > 1) need(1);
      return Density::constant(v.empty() ? 0.0 : v[0]);
    }
    if (kind == "quadratic") return need(1), Density::quadratic(v[0]);
    if (kind == "cosh") return need(1), Density::cosh(v[0]);
    if (kind == "plateau") return need(2), Density::plateau(v[0], v[1]);
    if (kind == "custom") {
      if (v.empty()) throw SpecError("density custom: no coefficients");
      return Density::custom(v);
    }
    throw SpecError("unknown density kind '" + kind + "'");
  });
}

inline std::string density_shorthand(const Density& d) {
  std::string s = to_string(d.kind());
  std::vector<double> v;
  switch (d.kind()) {
    case Density::Kind::constant: v = {d.offset()}; break;
    case Density::Kind::quadratic:
    case Density::Kind::cosh: v = {d.coefficient()}; break;
    case Density::Kind::plateau: v = {d.hinge_radius(), d.coefficient()}; break;
    case Density::Kind::custom: v = d.polynomial(); break;
  }
  for (std::size_t i = 0; i < v.size(); ++i) s += (i == 0 ? ":" : ",") + format_number(v[i]);
  return s;
}

/// "lo:hi:count" (inclusive, evenly spaced) or a comma list.
inline std::vector<double> parse_grid(const std::string& s) {
  if (s.find(':') != std::string::npos) {
    const auto v = io_detail::split_numbers(s, ':', "range");
    if (v.size() != 3) throw SpecError("range '" + s + "' must be lo:hi:count");
    if (v[2] < 1 || v[2] != std::floor(v[2])) throw SpecError("range '" + s + "': count must be a positive integer");
    const auto count = static_cast<std::size_t>(v[2]);
    if (count == 1) return {v[0]};
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = v[0] + (v[1] - v[0]) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
  }
  const auto v = io_detail::split_numbers(s, ',', "list");
  if (v.empty()) throw SpecError("empty list");
  return v;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Identifies the run that produced a file: tool version plus a hash of
/// the canonical (sorted-key) JSON of the run spec.
struct Provenance {
  std::string command;
  nlohmann::json spec = nlohmann::json::object();

  std::string spec_hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(spec.dump())));
    return buf;
  }
  nlohmann::json to_json() const {
    return {{"tool", "lcd"}, {"version", version}, {"command", command}, {"spec_hash", spec_hash()}, {"spec", spec}};
  }
  std::string csv_comment() const {
    return "# lcd " + std::string(version) + " command=" + command + " spec_hash=" + spec_hash() + "\n";
  }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline std::string to_csv(const Table& t, const Provenance& p) {
  std::string out = p.csv_comment();
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw std::logic_error("to_csv: row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += "\n";
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline void write_csv(const std::string& path, const Table& t, const Provenance& p) { write_text(path, to_csv(t, p)); }

/// Adds the provenance block and writes indented JSON.
inline void write_json(const std::string& path, nlohmann::json j, const Provenance& p) {
  j["provenance"] = p.to_json();
  write_text(path, j.dump(2) + "\n");
}

/// Columns s, x, y, theta, kappa, lambda, F, H1, Hf. F is NaN at vertical
/// tangents and lambda at the axis.
inline Table trajectory_table(const Trajectory& t) {
  Table tab{{"s", "x", "y", "theta", "kappa", "lambda", "F", "H1", "Hf"}, {}};
  tab.rows.reserve(t.samples.size());
  for (const auto& smp : t.samples) {
    const auto& st = smp.state;
    const double F = geom::is_vertical(st.theta) ? std::nan("") : center_F(st);
    tab.rows.push_back({st.s, st.x, st.y, st.theta, smp.bundle.kappa, smp.bundle.lambda, F, smp.bundle.H1, smp.bundle.Hf});
  }
  return tab;
}

inline nlohmann::json state_json(const CurveState& s) {
  return {{"s", s.s}, {"x", s.x}, {"y", s.y}, {"theta", s.theta}};
}

inline nlohmann::json closure_json(const ClosureReport& r) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : r.events)
    events.push_back({{"kind", to_string(e.kind)}, {"s", e.s}, {"state", state_json(e.state)}, {"kappa", e.kappa}, {"direction", e.direction}});
  nlohmann::json j = {{"outcome", to_string(r.outcome)},
                      {"y_residual", r.y_residual},
                      {"angle_defect", r.angle_defect},
                      {"end_state", state_json(r.end_state)},
                      {"limit_tangent_consistent", r.limit_tangent_consistent},
                      {"note", r.note},
                      {"events", events}};
  if (r.limit_tangent) j["limit_tangent"] = {r.limit_tangent->x, r.limit_tangent->y};
  return j;
}

/// One JSON header line, then the row-major occupancy as little-endian
/// IEEE doubles.
inline void write_gridset(const std::string& path, const GridSet& g, const Provenance& p) {
  g.validate();
  nlohmann::json h = {{"format", "lcd-gridset"},
                      {"n", g.n},
                      {"r_edges", g.r_edges},
                      {"a_edges", g.a_edges},
                      {"cells", {g.radial_cells(), g.angular_cells()}},
                      {"provenance", p.to_json()}};
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << h.dump() << "\n";
  for (double v : g.occupancy) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
    f.write(reinterpret_cast<const char*>(b), 8);
  }
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline GridSet read_gridset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SpecError("cannot open grid file '" + path + "'");
  std::string line;
  std::getline(f, line);
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError("grid file '" + path + "': bad header: " + e.what());
  }
  if (h.value("format", "") != "lcd-gridset") throw SpecError("grid file '" + path + "': not an lcd-gridset");
  GridSet g;
  try {
    g.n = h.at("n").get<int>();
    g.r_edges = h.at("r_edges").get<std::vector<double>>();
    g.a_edges = h.at("a_edges").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw SpecError("grid file '" + path + "': " + e.what());
  }
  if (g.r_edges.size() < 2 || g.a_edges.size() < 2) throw SpecError("grid file '" + path + "': too few edges");
  const std::size_t count = (g.r_edges.size() - 1) * (g.a_edges.size() - 1);
  g.occupancy.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned char b[8];
    if (!f.read(reinterpret_cast<char*>(b), 8)) throw SpecError("grid file '" + path + "': truncated occupancy data");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    std::memcpy(&g.occupancy[i], &bits, sizeof bits);
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw SpecError("grid file '" + path + "': " + e.what());
  }
  return g;
}

}  // namespace lcd
