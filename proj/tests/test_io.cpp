#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lcd/io.hpp"

using namespace lcd;

TEST(DensitySpec, Shorthand) {
  EXPECT_EQ(parse_density("constant").kind(), Density::Kind::constant);
  EXPECT_EQ(parse_density("constant:0.5").offset(), 0.5);
  const auto q = parse_density("quadratic:1");
  EXPECT_EQ(q.kind(), Density::Kind::quadratic);
  EXPECT_EQ(q.coefficient(), 1.0);
  EXPECT_EQ(parse_density("cosh:0.25").coefficient(), 0.25);
  const auto p = parse_density("plateau:2,1");
  EXPECT_EQ(p.hinge_radius(), 2.0);
  EXPECT_EQ(p.coefficient(), 1.0);
  EXPECT_EQ(parse_density("custom:0,0,1,0,0.5").polynomial(), (std::vector<double>{0, 0, 1, 0, 0.5}));
}

TEST(DensitySpec, Json) {
  const auto d = parse_density(R"({"kind":"plateau","params":{"R_p":2,"a":1}})");
  EXPECT_EQ(d.kind(), Density::Kind::plateau);
  EXPECT_EQ(d.hinge_radius(), 2.0);
  EXPECT_EQ(parse_density(R"({"kind":"constant"})").offset(), 0.0);
  for (const auto& s : {"quadratic:1", "cosh:0.5", "plateau:2,1", "constant:0.25", "custom:0,0,1"}) {
    const auto a = parse_density(s);
    const auto b = density_from_json(density_to_json(a));
    EXPECT_EQ(density_shorthand(a), density_shorthand(b)) << s;
    EXPECT_EQ(density_shorthand(parse_density(density_shorthand(a))), density_shorthand(a)) << s;
  }
  EXPECT_EQ(density_shorthand(parse_density("plateau:2,1")), "plateau:2,1");
}

TEST(DensitySpec, Errors) {
  for (const auto& s : {"", "quartic:1", "quadratic", "quadratic:x", "quadratic:1,2", "quadratic:-1", "plateau:2",
                        "custom", "custom:0,1", "constant:1,2", "quadratic:nan", "{bad json", R"({"kind":1})",
                        R"({"kind":"cosh","params":{}})", R"({"kind":"cosh","params":{"a":"1"}})",
                        R"({"kind":"custom","params":{"coeffs":3}})"})
    EXPECT_THROW(parse_density(s), SpecError) << s;
}

TEST(Grid, RangesAndLists) {
  EXPECT_EQ(parse_grid("1:10:10"), (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
  EXPECT_EQ(parse_grid("0.5,1,2"), (std::vector<double>{0.5, 1, 2}));
  EXPECT_EQ(parse_grid("3:7:1"), (std::vector<double>{3}));
  for (const auto& s : {"1:2", "1:2:0", "1:2:2.5", "a,b", "", "1,,2"}) EXPECT_THROW(parse_grid(s), SpecError) << s;
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-2.0), "-2");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  for (double v : {1.0 / 3.0, 5.3981415691, 1e-300, 6.02214076e23}) EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Provenance, Fnv1aVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Provenance, HashIsCanonical) {
  Provenance a{"shoot", nlohmann::json::parse(R"({"n":3,"c":4})")};
  Provenance b{"shoot", nlohmann::json::parse(R"({"c":4,"n":3})")};
  Provenance c{"shoot", nlohmann::json::parse(R"({"c":4.5,"n":3})")};
  EXPECT_EQ(a.spec_hash(), b.spec_hash());
  EXPECT_NE(a.spec_hash(), c.spec_hash());
  EXPECT_EQ(a.spec_hash().size(), 16u);
  EXPECT_EQ(a.csv_comment(), "# lcd " + std::string(version) + " command=shoot spec_hash=" + a.spec_hash() + "\n");
  EXPECT_EQ(a.to_json()["spec_hash"], a.spec_hash());
}

TEST(Csv, Layout) {
  Provenance p{"profile", {{"n", 2}}};
  const Table t{{"V", "R"}, {{1.0, 0.5}, {2.0, 0.25}}};
  const std::string csv = to_csv(t, p);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# lcd ", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "V,R");
  std::getline(in, line);
  EXPECT_EQ(line, "1,0.5");
  EXPECT_THROW(to_csv(Table{{"a"}, {{1.0, 2.0}}}, p), std::logic_error);
}

TEST(Trajectory, TableColumns) {
  const auto d = Density::quadratic(1.0);
  const auto t = shoot(ShootingConfig::make(3, d, 1.0, 4.0));
  const Table tab = trajectory_table(t);
  ASSERT_EQ(tab.columns.size(), 9u);
  ASSERT_EQ(tab.rows.size(), t.samples.size());
  for (const auto& row : tab.rows) {
    EXPECT_NEAR(row[8], 4.0, 1e-6);  // Hf equals c along the ball
    if (!std::isnan(row[6])) {
      EXPECT_NEAR(row[6], 0.0, 1e-6);  // F at the centre
    }
  }
  const auto j = closure_json(classify_closure(t));
  EXPECT_EQ(j["outcome"], "closed_smooth");
}

TEST(GridFile, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "lcd_test_io";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "g.bin").string();
  const auto g = rasterize(Disc({0.7, 0.3}, 0.5), GridSet::polar(3, 2.0, 16, 12));
  write_gridset(path, g, Provenance{"symmetrize", {{"n", 3}}});
  const auto r = read_gridset(path);
  EXPECT_EQ(r.n, 3);
  EXPECT_EQ(r.r_edges, g.r_edges);
  EXPECT_EQ(r.a_edges, g.a_edges);
  EXPECT_EQ(r.occupancy, g.occupancy);
  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << R"({"format":"lcd-gridset","n":2,"r_edges":[0,1],"a_edges":[-3.141592653589793,0,3.141592653589793]})" << "\n";
    f << "short";
  }
  EXPECT_THROW(read_gridset(path), SpecError);
  EXPECT_THROW(read_gridset((dir / "missing.bin").string()), SpecError);
  std::filesystem::remove_all(dir);
}
