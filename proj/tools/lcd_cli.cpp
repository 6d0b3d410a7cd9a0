#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "lcd/appendix.hpp"
#include "lcd/comparisons.hpp"
#include "lcd/io.hpp"
#include "lcd/measures.hpp"
#include "lcd/shooting.hpp"
#include "lcd/symmetrization.hpp"

using namespace lcd;
using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 2;
constexpr int exit_numeric = 3;

/// Thrown when a run completed but its result is a numeric failure.
struct NumericFailure : std::runtime_error {
  json diagnostic;
  NumericFailure(const std::string& what, json d) : std::runtime_error(what), diagnostic(std::move(d)) {}
};

struct Common {
  std::string density = "quadratic:1";
  int n = 2;
  std::string out = ".";
  std::uint64_t seed = 1;
};

std::string path_in(const Common& c, const std::string& name) { return (std::filesystem::path(c.out) / name).string(); }

void require_dimension(int n, int lo, int hi) {
  if (n < lo || n > hi)
    throw SpecError("--n must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(n));
}

json trajectory_summary(const Trajectory& t) {
  return {{"termination", to_string(t.termination)}, {"samples", t.samples.size()}, {"end_state", state_json(t.end_state)}};
}

/// Shape primitive: disc:x,y,r | sector:r0,r1,a0,a1 | box:x0,y0,x1,y1.
std::shared_ptr<const Shape> parse_shape(const std::string& s) {
  const std::size_t colon = s.find(':');
  if (colon == std::string::npos) throw SpecError("shape '" + s + "' must be kind:params");
  const std::string kind = s.substr(0, colon);
  std::vector<double> v;
  try {
    v = parse_grid(s.substr(colon + 1));
  } catch (const SpecError& e) {
    throw SpecError("shape '" + s + "': " + e.what());
  }
  auto need = [&](std::size_t k) {
    if (v.size() != k) throw SpecError("shape " + kind + " needs " + std::to_string(k) + " parameters");
  };
  try {
    if (kind == "disc") return need(3), std::make_shared<const Disc>(Vec2{v[0], v[1]}, v[2]);
    if (kind == "sector") return need(4), std::shared_ptr<const Shape>(std::make_shared<const AnnulusSector>(v[0], v[1], v[2], v[3]));
    if (kind == "box") return need(4), std::shared_ptr<const Shape>(std::make_shared<const Box>(Vec2{v[0], v[1]}, Vec2{v[2], v[3]}));
  } catch (const SpecError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SpecError("shape '" + s + "': " + e.what());
  }
  throw SpecError("unknown shape kind '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generating curves, measures and comparison checks for radial log-convex densities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("lcd ") + version);

  Common common;
  json spec;  // canonical record of the run, hashed into every output
  std::function<void()> action;

  auto add_common = [&](CLI::App* sub, bool with_n = true) {
    sub->add_option("--density", common.density, "kind:params (e.g. quadratic:1, plateau:2,1) or a JSON object")
        ->capture_default_str();
    if (with_n) sub->add_option("--n", common.n, "ambient dimension")->capture_default_str();
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
  };

  // shoot
  double R0 = 1.0, c = 0.0, tol = 1e-10;
  bool have_c = false;
  auto* shoot_cmd = app.add_subcommand("shoot", "integrate one generating curve and classify its closure");
  add_common(shoot_cmd);
  shoot_cmd->add_option("--R0", R0, "starting radius on the positive axis")->required();
  shoot_cmd->add_option("--c", c, "target generalized mean curvature (default: ball value)");
  shoot_cmd->add_option("--tol", tol, "integrator tolerance")->capture_default_str();
  shoot_cmd->callback([&] {
    have_c = shoot_cmd->count("--c") > 0;
    action = [&] {
      require_dimension(common.n, 2, 16);
      const Density d = parse_density(common.density);
      const double cc = have_c ? c : ball_curvature(d, common.n, R0);
      spec = {{"command", "shoot"}, {"density", density_to_json(d)}, {"n", common.n}, {"R0", R0}, {"c", cc}, {"tol", tol}};
      ShootingConfig cfg = ShootingConfig::make(common.n, d, R0, cc);
      cfg.tolerance = tol;
      const Trajectory t = shoot(cfg);
      const Provenance p{"shoot", spec};
      write_csv(path_in(common, "trajectory.csv"), trajectory_table(t), p);
      json j = closure_json(classify_closure(t));
      j["trajectory"] = trajectory_summary(t);
      write_json(path_in(common, "closure.json"), j, p);
      std::cout << "outcome " << j["outcome"].get<std::string>() << "\n";
    };
  });

  // scan
  std::string R0_grid = "0.8:1.2:5", c_grid;
  double c_offset = 0.2;
  std::size_t c_points = 5;
  auto* scan_cmd = app.add_subcommand("scan", "classify closures over a grid of (R0, c)");
  add_common(scan_cmd);
  scan_cmd->add_option("--R0", R0_grid, "R0 values: lo:hi:count or a comma list")->capture_default_str();
  scan_cmd->add_option("--c", c_grid, "c values; default is the ball value of each R0 times 1 +- offset");
  scan_cmd->add_option("--offset", c_offset, "relative half-width of the default c grid")->capture_default_str();
  scan_cmd->add_option("--points", c_points, "c values per R0 in the default grid")->capture_default_str();
  scan_cmd->callback([&] {
    action = [&] {
      require_dimension(common.n, 2, 16);
      const Density d = parse_density(common.density);
      const auto Rs = parse_grid(R0_grid);
      std::vector<std::pair<double, double>> cells;
      if (!c_grid.empty()) {
        for (double r : Rs)
          for (double v : parse_grid(c_grid)) cells.emplace_back(r, v);
      } else {
        if (c_points < 1) throw SpecError("--points must be positive");
        for (double r : Rs) {
          const double ball = ball_curvature(d, common.n, r);
          for (std::size_t k = 0; k < c_points; ++k) {
            const double u = c_points == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(c_points - 1);
            cells.emplace_back(r, ball * (1.0 + c_offset * u));
          }
        }
      }
      spec = {{"command", "scan"}, {"density", density_to_json(d)}, {"n", common.n}, {"R0", Rs}, {"c", c_grid},
              {"offset", c_offset}, {"points", c_points}};
      const auto res = scan_closures(ShootingConfig::make(common.n, d, 1.0, 1.0), cells);
      Table tab{{"R0", "c", "closed_smooth", "y_residual", "angle_defect"}, {}};
      json arr = json::array();
      std::size_t closed = 0;
      for (const auto& cell : res) {
        const bool ok = cell.error.empty() && cell.report.outcome == ClosureOutcome::closed_smooth;
        closed += ok;
        tab.rows.push_back({cell.R0, cell.c, ok ? 1.0 : 0.0, cell.report.y_residual, cell.report.angle_defect});
        json e = {{"R0", cell.R0}, {"c", cell.c}};
        if (cell.error.empty()) e["closure"] = closure_json(cell.report);
        else e["error"] = cell.error;
        arr.push_back(e);
      }
      const Provenance p{"scan", spec};
      write_csv(path_in(common, "scan.csv"), tab, p);
      write_json(path_in(common, "scan.json"), {{"cells", arr}, {"closed_smooth", closed}}, p);
      std::cout << closed << " of " << res.size() << " cells closed smoothly\n";
    };
  });

  // profile
  std::string volumes = "1:10:10";
  auto* profile_cmd = app.add_subcommand("profile", "tabulate the centred-ball isoperimetric profile");
  add_common(profile_cmd);
  profile_cmd->add_option("--volumes", volumes, "volumes: lo:hi:count or a comma list")->capture_default_str();
  profile_cmd->callback([&] {
    action = [&] {
      require_dimension(common.n, 2, 16);
      const Density d = parse_density(common.density);
      const auto Vs = parse_grid(volumes);
      for (std::size_t i = 0; i < Vs.size(); ++i) {
        if (!(Vs[i] > 0.0)) throw SpecError("volumes must be positive");
        if (i > 0 && !(Vs[i] > Vs[i - 1])) throw SpecError("volumes must increase");
      }
      spec = {{"command", "profile"}, {"density", density_to_json(d)}, {"n", common.n}, {"volumes", Vs}};
      const auto prof = profile(d, common.n, Vs);
      Table tab{{"V", "R", "J"}, {}};
      double min_diff = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < prof.size(); ++i) {
        tab.rows.push_back({prof[i].volume, prof[i].radius, prof[i].perimeter});
        if (i > 0) min_diff = std::min(min_diff, prof[i].perimeter - prof[i - 1].perimeter);
      }
      write_csv(path_in(common, "profile.csv"), tab, Provenance{"profile", spec});
      std::cout << prof.size() << " profile points";
      if (prof.size() > 1) std::cout << ", min forward difference " << format_number(min_diff);
      std::cout << "\n";
    };
  });

  // measures
  double mR0 = 1.0, mc = 0.0;
  auto* measures_cmd = app.add_subcommand("measures", "weighted perimeter and volume of a shot curve and of the ball");
  add_common(measures_cmd);
  measures_cmd->add_option("--R0", mR0, "starting radius")->required();
  measures_cmd->add_option("--c", mc, "target curvature (default: ball value)");
  measures_cmd->callback([&] {
    const bool given = measures_cmd->count("--c") > 0;
    action = [&, given] {
      require_dimension(common.n, 2, 16);
      const Density d = parse_density(common.density);
      const double cc = given ? mc : ball_curvature(d, common.n, mR0);
      spec = {{"command", "measures"}, {"density", density_to_json(d)}, {"n", common.n}, {"R0", mR0}, {"c", cc}};
      const Trajectory t = shoot(ShootingConfig::make(common.n, d, mR0, cc));
      const auto closure = classify_closure(t);
      const auto ball = ball_measures(mR0, common.n, d);
      json j = {{"closure", to_string(closure.outcome)},
                {"ball", {{"radius", mR0}, {"perimeter", ball.perimeter}, {"volume", ball.volume}, {"sigma", ball.sigma}}}};
      json tr = {{"perimeter", trajectory_perimeter(t, common.n, d)}};
      try {
        tr["volume"] = trajectory_volume(t, common.n, d);
      } catch (const std::exception& e) {
        tr["volume"] = nullptr;
        tr["volume_error"] = e.what();
      }
      j["trajectory"] = tr;
      write_json(path_in(common, "measures.json"), j, Provenance{"measures", spec});
      const double per = trajectory_perimeter(t, common.n, d);
      std::cout << to_string(closure.outcome) << ", trajectory perimeter "
                << (std::isfinite(per) ? format_number(per) : std::string("unbounded")) << ", ball perimeter "
                << format_number(ball.perimeter) << "\n";
    };
  });

  // verify-appendix
  int configs = 1000;
  auto* appendix_cmd = app.add_subcommand("verify-appendix", "check the circle formulas against finite differences");
  add_common(appendix_cmd, false);
  appendix_cmd->add_option("--seed", common.seed, "random seed")->capture_default_str();
  appendix_cmd->add_option("--configs", configs, "randomized configurations")->capture_default_str();
  appendix_cmd->callback([&] {
    action = [&] {
      const Density d = parse_density(common.density);
      if (configs < 1) throw SpecError("--configs must be positive");
      spec = {{"command", "verify-appendix"}, {"density", density_to_json(d)}, {"seed", common.seed}, {"configs", configs}};
      const auto r = verify_appendix(d, common.seed, configs);
      json checks = json::array();
      for (const auto& ch : r.checks)
        checks.push_back({{"name", ch.name}, {"cases", ch.cases}, {"failures", ch.failures}, {"worst", ch.worst}, {"passed", ch.passed}});
      const json j = {{"passed", r.passed}, {"checks", checks}, {"printed_form_worst", r.printed_form_worst}};
      write_json(path_in(common, "appendix.json"), j, Provenance{"verify-appendix", spec});
      for (const auto& ch : r.checks) std::cout << (ch.passed ? "pass " : "FAIL ") << ch.name << "\n";
      if (!r.passed) throw NumericFailure("appendix checks failed", j);
    };
  });

  // verify-comparisons
  std::string cmp_R0 = "1", cmp_c;
  int grid_points = 20;
  auto* cmp_cmd = app.add_subcommand("verify-comparisons", "run the curvature and H1 comparison checks");
  add_common(cmp_cmd);
  cmp_cmd->add_option("--R0", cmp_R0, "R0 values of shot curves for the Q/W check")->capture_default_str();
  cmp_cmd->add_option("--c", cmp_c, "c values of shot curves (default: 1.15 times the ball value)");
  cmp_cmd->add_option("--grid", grid_points, "points per axis of the (c, d, phi) grid")->capture_default_str();
  cmp_cmd->callback([&] {
    action = [&] {
      require_dimension(common.n, 2, 16);
      const Density d = parse_density(common.density);
      if (grid_points < 2) throw SpecError("--grid must be at least 2");
      const auto Rs = parse_grid(cmp_R0);
      const std::vector<double> cs = cmp_c.empty() ? std::vector<double>{} : parse_grid(cmp_c);
      spec = {{"command", "verify-comparisons"}, {"density", density_to_json(d)}, {"n", common.n}, {"R0", Rs},
              {"c", cs}, {"grid", grid_points}};
      bool ok = true;
      const auto grid = h1_comparison_grid(symmetric_pair(1.0, 0.75 * std::numbers::pi), grid_points, 0.5);
      ok = ok && grid.passed;
      json arcs = json::array();
      for (const auto& cs_ : arc_comparison_cases()) {
        const auto r = curvature_comparison_verify(cs_.f, cs_.g);
        ok = ok && r.applicable && r.passed;
        arcs.push_back({{"name", cs_.name}, {"applicable", r.applicable}, {"passed", r.passed}, {"phi", r.phi}});
      }
      json shots = json::array();
      for (double r0 : Rs) {
        const std::vector<double> cv = cs.empty() ? std::vector<double>{1.15 * ball_curvature(d, common.n, r0)} : cs;
        for (double cc : cv) {
          const Trajectory t = shoot(ShootingConfig::make(common.n, d, r0, cc));
          const auto up = analyze_upper_curve(t);
          const auto lo = analyze_lower_curve(t, up);
          json e = {{"R0", r0}, {"c", cc}, {"delta", up.delta}, {"eta", lo.eta}};
          try {
            const auto qw = build_QW(t, up, lo);
            const auto r = curvature_comparison_verify(qw.Q, qw.W);
            e["applicable"] = r.applicable;
            e["passed"] = r.passed;
            e["phi"] = r.phi;
            ok = ok && r.passed;
          } catch (const std::invalid_argument& ex) {
            e["skipped"] = ex.what();
          }
          shots.push_back(e);
        }
      }
      const json j = {{"passed", ok},
                      {"h1_grid", {{"cells", grid.cells.size()}, {"strict_cells", grid.strict_cells},
                                   {"non_strict_off_origin", grid.non_strict_off_origin},
                                   {"origin_equality", grid.origin_equality}, {"passed", grid.passed}}},
                      {"arcs", arcs},
                      {"qw", shots}};
      write_json(path_in(common, "comparisons.json"), j, Provenance{"verify-comparisons", spec});
      std::cout << (ok ? "all comparison checks passed" : "comparison checks FAILED") << "\n";
      if (!ok) throw NumericFailure("comparison checks failed", j);
    };
  });

  // symmetrize
  std::vector<std::string> shapes;
  std::string corpus_name, input_grid;
  double r_max = 2.0;
  std::size_t cells = 256;
  int supersample = 4;
  auto* sym_cmd = app.add_subcommand("symmetrize", "rasterize a set on a polar grid and symmetrize it");
  add_common(sym_cmd);
  sym_cmd->add_option("--shape", shapes, "disc:x,y,r | sector:r0,r1,a0,a1 | box:x0,y0,x1,y1; repeat for a union");
  sym_cmd->add_option("--corpus", corpus_name, "use a named shape from the built-in corpus");
  sym_cmd->add_option("--input", input_grid, "symmetrize a saved grid file instead");
  sym_cmd->add_option("--rmax", r_max, "outer radius of the grid")->capture_default_str();
  sym_cmd->add_option("--cells", cells, "radial and angular cell count")->capture_default_str();
  sym_cmd->add_option("--supersample", supersample, "subsamples per cell side")->capture_default_str();
  sym_cmd->callback([&] {
    action = [&] {
      const Density d = parse_density(common.density);
      const int sources = !shapes.empty() + !corpus_name.empty() + !input_grid.empty();
      if (sources != 1) throw SpecError("give exactly one of --shape, --corpus or --input");
      GridSet g;
      spec = {{"command", "symmetrize"}, {"density", density_to_json(d)}};
      if (!input_grid.empty()) {
        g = read_gridset(input_grid);
        spec["input_hash"] = fnv1a64(json(g.occupancy).dump());
      } else {
        require_dimension(common.n, 2, 3);
        if (cells < 2 || cells % 2) throw SpecError("--cells must be even and at least 2");
        if (!(r_max > 0.0)) throw SpecError("--rmax must be positive");
        if (supersample < 1) throw SpecError("--supersample must be positive");
        std::shared_ptr<const Shape> shape;
        if (!corpus_name.empty()) {
          for (const auto& s : symmetrization_corpus())
            if (s.name == corpus_name) shape = s.shape;
          if (!shape) throw SpecError("unknown corpus shape '" + corpus_name + "'");
          spec["corpus"] = corpus_name;
        } else {
          std::vector<std::shared_ptr<const Shape>> parts;
          for (const auto& s : shapes) parts.push_back(parse_shape(s));
          shape = parts.size() == 1 ? parts.front() : std::make_shared<const Union>(parts);
          spec["shapes"] = shapes;
        }
        spec.update({{"n", common.n}, {"rmax", r_max}, {"cells", cells}, {"supersample", supersample}});
        g = rasterize(*shape, GridSet::polar(common.n, r_max, cells, cells), supersample);
      }
      const GridSet s = symmetrize(g);
      const Provenance p{"symmetrize", spec};
      write_gridset(path_in(common, "input.grid"), g, p);
      write_gridset(path_in(common, "symmetrized.grid"), s, p);
      const double va = weighted_volume(g, d), vs = weighted_volume(s, d);
      const double pa = grid_perimeter(g, d), ps = grid_perimeter(s, d);
      const json j = {{"n", g.n},
                      {"cells", {g.radial_cells(), g.angular_cells()}},
                      {"volume", {{"input", va}, {"symmetrized", vs}, {"relative_change", va > 0 ? (vs - va) / va : 0.0}}},
                      {"perimeter", {{"input", pa}, {"symmetrized", ps}, {"ratio", pa > 0 ? ps / pa : 0.0}}},
                      {"idempotent", symmetrize(s).occupancy == s.occupancy}};
      write_json(path_in(common, "symmetrize.json"), j, p);
      std::cout << "perimeter ratio " << format_number(pa > 0 ? ps / pa : 0.0) << "\n";
    };
  });

  // analyze-curve
  double aR0 = 1.0, ac = 0.0;
  std::size_t qw_points = 200;
  auto* curve_cmd = app.add_subcommand("analyze-curve", "split a shot curve into upper and lower parts and compare them");
  add_common(curve_cmd);
  curve_cmd->add_option("--R0", aR0, "starting radius")->required();
  curve_cmd->add_option("--c", ac, "target curvature")->required();
  curve_cmd->add_option("--points", qw_points, "heights in the Q/W table")->capture_default_str();
  curve_cmd->callback([&] {
    action = [&] {
      require_dimension(common.n, 2, 16);
      const Density d = parse_density(common.density);
      if (qw_points < 5) throw SpecError("--points must be at least 5");
      spec = {{"command", "analyze-curve"}, {"density", density_to_json(d)}, {"n", common.n}, {"R0", aR0}, {"c", ac},
              {"points", qw_points}};
      const Trajectory t = shoot(ShootingConfig::make(common.n, d, aR0, ac));
      const auto up = analyze_upper_curve(t);
      const auto lo = analyze_lower_curve(t, up);
      const Provenance p{"analyze-curve", spec};
      json j = {{"closure", to_string(classify_closure(t).outcome)},
                {"upper", {{"delta", up.delta}, {"reason", to_string(up.reason)}, {"state", state_json(up.state)},
                           {"samples_checked", up.samples_checked}, {"violations", up.violations_before_delta},
                           {"max_F", up.max_F}, {"x_delta_positive", up.x_delta_positive},
                           {"x_delta_dominates_F", up.x_delta_dominates_F}}},
                {"lower", {{"eta", lo.eta}, {"reason", to_string(lo.reason)}, {"state", state_json(lo.state)},
                           {"pairs", lo.pairs.size()}, {"violations", lo.lemma_violations},
                           {"strict_band", {lo.strict_band_low, lo.strict_band_high}},
                           {"max_position_slack", lo.max_position_slack}, {"min_angle_slack", lo.min_angle_slack}}}};
      try {
        const auto qw = build_QW(t, up, lo, qw_points);
        const auto r = curvature_comparison_verify(qw.Q, qw.W);
        j["qw"] = {{"applicable", r.applicable}, {"passed", r.passed}, {"phi", r.phi},
                   {"max_value_excess", r.max_value_excess}, {"hypothesis_failures", r.hypothesis_failures}};
        Table tab{{"t", "Q", "W", "theta_Q", "theta_W", "kappa_Q", "kappa_W"}, {}};
        for (std::size_t i = 0; i < qw.Q.size(); ++i)
          tab.rows.push_back({qw.Q.xs[i], qw.Q.value[i], qw.W.value[i], qw.Q.theta(i), qw.W.theta(i), qw.Q.kappa(i), qw.W.kappa(i)});
        write_csv(path_in(common, "qw.csv"), tab, p);
      } catch (const std::invalid_argument& e) {
        j["qw"] = {{"skipped", e.what()}};
      }
      write_json(path_in(common, "curve.json"), j, p);
      std::cout << "upper ends at s = " << format_number(up.delta) << " (" << to_string(up.reason) << "), lower at s = "
                << format_number(lo.eta) << " (" << to_string(lo.reason) << ")\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_invalid;
  }

  try {
    std::filesystem::create_directories(common.out);
    action();
    return exit_ok;
  } catch (const SpecError& e) {
    std::cerr << "invalid spec: " << e.what() << "\n";
    return exit_invalid;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    try {
      write_json(path_in(common, "error.json"), {{"error", e.what()}, {"diagnostic", e.diagnostic}}, Provenance{"error", spec});
    } catch (const std::exception&) {
    }
    return exit_numeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    try {
      write_json(path_in(common, "error.json"), {{"error", e.what()}}, Provenance{"error", spec});
    } catch (const std::exception&) {
    }
    return exit_numeric;
  }
}
