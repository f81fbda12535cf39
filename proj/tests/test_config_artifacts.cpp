#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"

#include "adia/artifacts.hpp"
#include "adia/config.hpp"
#include "test_util.hpp"

using namespace adia;
namespace fs = std::filesystem;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / "adia_test_artifacts";
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};
}  // namespace

TEST_CASE("config parsing: sections, comments, numbers, lists") {
  Config cfg = Config::parse_string(
      "# a comment\n"
      "[chart]\n"
      "id = conformal-1d\n"
      "amplitude = 0.15  ; trailing comment\n"
      "\n"
      "[sweep]\n"
      "eps_ladder = 0.2, 0.1, 0.05\n");
  CHECK(cfg.require("chart", "id") == "conformal-1d");
  CHECK(cfg.require_num("chart", "amplitude") == doctest::Approx(0.15));
  CHECK(cfg.get_num("chart", "missing", 7.0) == 7.0);
  auto ladder = cfg.get_num_list("sweep", "eps_ladder");
  REQUIRE(ladder.size() == 3);
  CHECK(ladder[1] == 0.1);
}

TEST_CASE("config parse errors carry line and column") {
  try {
    Config::parse_string("[chart]\nid conformal\n");
    FAIL("expected ConfigParseError");
  } catch (const ConfigParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(Config::parse_string("[oops\n"), ConfigParseError);
  CHECK_THROWS_AS(Config::parse_string("[a]\nx = 1\nx = 2\n"), ConfigParseError);
}

TEST_CASE("catalog construction rejects unknown ids") {
  CHECK_THROWS_AS(make_chart("nope", {}), ConfigValueError);
  CHECK_THROWS_AS(make_morse("nope", {}), ConfigValueError);
  CHECK_THROWS_AS(make_aform("nope", {}), ConfigValueError);
  CHECK(catalog_entries().size() >= 6);
}

TEST_CASE("strip csv round trip is exact") {
  TempDir tmp;
  MetricChart chart = chart_flat(1);
  MorseData f = morse_cosine_1d(0.3, 1, 0.0);
  StripField u = floer_oracle(chart, f, Vec2(0.123456789, 0.0), 1.5, 12, 6);
  std::string path = tmp / "strip.csv";
  write_strip_csv(path, u, 1);
  auto [v, dim] = read_strip_csv(path);
  CHECK(dim == 1);
  CHECK(v.Ns == u.Ns);
  CHECK(v.Nt == u.Nt);
  CHECK(v.r == u.r);
  CHECK((v.q[0] - u.q[0]).abs().maxCoeff() == 0.0);  // shortest repr round-trips
  CHECK((v.p[0] - u.p[0]).abs().maxCoeff() == 0.0);

  // determinism: writing twice gives identical bytes
  std::string again = tmp / "strip2.csv";
  write_strip_csv(again, u, 1);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("two-dimensional strip csv round trip") {
  TempDir tmp;
  MetricChart chart = chart_diag_perturbed_2d(0.1);
  MorseData f = morse_cosine_2d(0.3, 1, 0.0, 0.2, 1, 0.1);
  StripField u = floer_oracle(chart, f, Vec2(0.2, 0.7), 1.0, 10, 6);
  std::string path = tmp / "strip2d.csv";
  write_strip_csv(path, u, 2);
  auto [v, dim] = read_strip_csv(path);
  CHECK(dim == 2);
  for (int c = 0; c < 2; ++c) {
    CHECK((v.q[c] - u.q[c]).abs().maxCoeff() == 0.0);
    CHECK((v.p[c] - u.p[c]).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("truncated strip csv is rejected") {
  TempDir tmp;
  std::string path = tmp / "bad.csv";
  {
    std::ofstream out(path);
    out << "s,t,q1,p1\n0,0,1\n";  // short row
  }
  CHECK_THROWS_AS(read_strip_csv(path), ArtifactError);
  std::string missing = tmp / "missing.csv";
  CHECK_THROWS_AS(read_strip_csv(missing), ArtifactError);
}

TEST_CASE("fnv1a64 known values") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("manifest references artifacts with content hashes") {
  TempDir tmp;
  {
    std::ofstream out(tmp / "data.csv");
    out << "x\n1\n";
  }
  write_manifest(tmp.dir.string(), "solve", "cfg.cfg", "eps = 0.1\n", 42, 0.5, {"data.csv"});
  auto j = nlohmann::json::parse(slurp(tmp / "manifest.json"));
  CHECK(j["command"] == "solve");
  CHECK(j["seed"] == 42);
  CHECK(j["artifacts"].size() == 1);
  CHECK(j["artifacts"][0]["name"] == "data.csv");
  CHECK(j["artifacts"][0]["fnv1a64"] == fnv1a64_hex("x\n1\n"));
  CHECK(j["tool_version"] == tool_version());
}

TEST_CASE("svg plot emits fixed-viewbox polylines") {
  TempDir tmp;
  PlotSeries s{"gamma", {0.0, 1.0, 2.0}, {1.0, 0.5, 0.25}};
  std::string path = tmp / "plot.svg";
  write_svg_plot(path, "test", {s});
  std::string body = slurp(path);
  CHECK(body.find("viewBox=\"0 0 800 500\"") != std::string::npos);
  CHECK(body.find("<polyline") != std::string::npos);
  // determinism
  std::string again = tmp / "plot2.svg";
  write_svg_plot(again, "test", {s});
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("gamma and table writers are deterministic") {
  TempDir tmp;
  GammaProfile prof;
  prof.s = {-1.0, 0.0, 1.0};
  prof.gamma = {0.1, 0.2, 0.1};
  prof.dgamma = {0.0, 0.0, 0.0};
  prof.ddgamma = {0.0, 0.0, 0.0};
  prof.dirichlet = {0.01, 0.02, 0.01};
  prof.delta = 1.0;
  prof.R = 0.5;
  write_gamma_csv(tmp / "g1.csv", prof);
  write_gamma_csv(tmp / "g2.csv", prof);
  CHECK(slurp(tmp / "g1.csv") == slurp(tmp / "g2.csv"));

  ConvergenceTable table;
  SweepRow row;
  row.eps = 0.1;
  row.converged = true;
  row.sup_dist = 0.01;
  table.rows.push_back(row);
  write_table_csv(tmp / "t1.csv", table);
  write_table_json(tmp / "t1.json", table);
  std::string csv = slurp(tmp / "t1.csv");
  CHECK(csv.find("eps,r,ns,nt") == 0);
  CHECK(csv.find("runtime") == std::string::npos);  // wall time lives in the manifest only
  auto j = nlohmann::json::parse(slurp(tmp / "t1.json"));
  CHECK(j["rows"].size() == 1);
}
