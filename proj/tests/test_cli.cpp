#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wstab/errors.hpp"
#include "wstab/scenario.hpp"

using namespace wstab;
namespace fs = std::filesystem;

namespace {

struct Proc {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Proc wstab_cli(const std::string& args) {
  const char* bin = std::getenv("WSTAB_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "WSTAB_BIN is not set");
  const std::string cmd = std::string(bin) + " " + args + " 2>&1";
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), f)) > 0) p.out.append(buf.data(), n);
  const int status = pclose(f);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "wstab_cli_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "scenario.json";
  std::ofstream(p) << text;
  return p;
}

const char* kHemisphere = R"({
  "name": "hemi",
  "resolution": 8,
  "ambient": {"density": {"name": "radial-log", "k": -2}, "boundary": {"name": "half-space"}},
  "surface": {"builtin": "hemisphere"},
  "tasks": ["stationarity", "spectrum"]
})";

}  // namespace

TEST_CASE("list names the builtins") {
  const Proc p = wstab_cli("list");
  CHECK(p.code == 0);
  for (const char* n : {"paper-ex-3.9-threshold", "paper-Mr-k-minus-2", "paper-product-cylinder",
                        "paper-product-torus", "paper-ex-3.8-gaussian-hemisphere",
                        "paper-ex-3.8-cone-log-convex"})
    CHECK_MESSAGE(p.out.find(n) != std::string::npos, n);
  CHECK(builtin_scenarios().size() >= 8);
}

TEST_CASE("config errors exit 4 and name the key") {
  const fs::path d = scratch("config");
  SUBCASE("unknown key") {
    const fs::path f = write_config(
        d, R"({"name": "typo", "surface": {"builtin": "hemisphere", "radius_typo": 1},
               "ambient": {"boundary": {"name": "half-space"}}})");
    const Proc p = wstab_cli("run " + f.string() + " --out " + (d / "o").string());
    CHECK(p.code == 4);
    CHECK(p.out.find("radius_typo") != std::string::npos);
  }
  SUBCASE("malformed JSON") {
    const fs::path f = write_config(d, "{\"resolution\": 8,");
    CHECK(wstab_cli("run " + f.string()).code == 4);
  }
  SUBCASE("wrong type") {
    const fs::path f = write_config(d, R"({"name": "t", "resolution": "high", "surface": {"builtin": "sphere"}})");
    const Proc p = wstab_cli("run " + f.string());
    CHECK(p.code == 4);
    CHECK(p.out.find("resolution") != std::string::npos);
  }
  SUBCASE("unknown builtin") { CHECK(wstab_cli("builtin no-such-scenario").code == 4); }
  SUBCASE("missing subcommand") { CHECK(wstab_cli("").code == 4); }
}

TEST_CASE("builtin run writes the report files") {
  const fs::path d = scratch("product");
  const Proc p = wstab_cli("builtin paper-product-cylinder --out " + d.string());
  CHECK_MESSAGE(p.code == 0, p.out);
  for (const char* f : {"report.json", "metadata.json", "samples.csv", "spectrum.csv", "mesh.off",
                        "mesh.off.boundary", "geometry.csv", "eigenfunctions.csv", "plot.gp"})
    CHECK_MESSAGE(fs::exists(d / f), f);
  std::ifstream in(d / "report.json");
  const Json rep = Json::parse(in);
  CHECK(rep["summary"]["failed"].get<int>() == 0);
  CHECK(rep.contains("checks"));
  std::ifstream sp(d / "spectrum.csv");
  std::string header;
  std::getline(sp, header);
  CHECK(header == "constrained,index,eigenvalue,residual");
}

TEST_CASE("a failing expectation exits 2") {
  const fs::path d = scratch("fail");
  const fs::path f = write_config(d, R"({
    "name": "unstable",
    "resolution": 8,
    "ambient": {"boundary": {"name": "half-space"}},
    "surface": {"builtin": "hemisphere"},
    "tasks": ["stationarity", "spectrum"],
    "expect": {"strongly_stable": true}
  })");
  CHECK(wstab_cli("run " + f.string() + " --out " + (d / "o").string()).code == 2);
}

TEST_CASE("sweep over k") {
  const fs::path d = scratch("sweep");
  const fs::path f = write_config(d, kHemisphere);
  const Proc p = wstab_cli("sweep " + f.string() + " --param k --range -3:-1:0.25 --out " +
                           (d / "o").string());
  CHECK(p.code == 0);
  std::istringstream is(p.out);
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("ambient.density.k,exit_code,lambda_min,lambda_2,constrained_min", 0) == 0);
  int rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 9);
  CHECK(fs::exists(d / "o" / "sweep.csv"));
}

TEST_CASE("sweep argument errors exit 4") {
  const fs::path d = scratch("sweep_err");
  const fs::path f = write_config(d, kHemisphere);
  CHECK(wstab_cli("sweep " + f.string() + " --param k --range 1:0:0.5").code == 4);
  CHECK(wstab_cli("sweep " + f.string() + " --param k --range ''").code == 4);
  CHECK(wstab_cli("sweep " + f.string() + " --param surface.builtin --range 1,2").code == 4);
  CHECK(wstab_cli("sweep " + f.string() + " --param nope --range 1,2").code == 4);
  CHECK(wstab_cli("sweep " + f.string() + " --param resolution --range 8.5").code == 4);
}

TEST_CASE("export-mesh") {
  const fs::path d = scratch("export");
  const Proc p = wstab_cli("export-mesh paper-product-torus --resolution 6 --out " + d.string());
  CHECK_MESSAGE(p.code == 0, p.out);
  CHECK(fs::exists(d / "mesh.off"));
  CHECK(fs::exists(d / "geometry.csv"));
  std::ifstream in(d / "mesh.off");
  std::string magic;
  in >> magic;
  CHECK(magic == "OFF");
}

TEST_CASE("range parsing") {
  const std::vector<double> r = parse_range("-3:-1:0.25");
  REQUIRE(r.size() == 9);
  CHECK(r.front() == -3.0);
  CHECK(r.back() == doctest::Approx(-1.0));
  CHECK(parse_range("1, 2.5,4") == std::vector<double>{1.0, 2.5, 4.0});
  CHECK_THROWS_AS(parse_range(""), ConfigError);
  CHECK_THROWS_AS(parse_range("1:2:0"), ConfigError);
  CHECK_THROWS_AS(parse_range("1:x:2"), ConfigError);
}

TEST_CASE("knob resolution") {
  const Scenario s = builtin_scenario("paper-ex-3.9-threshold");
  CHECK(resolve_knob(s, "k") == "ambient.density.k");
  CHECK(resolve_knob(s, "resolution") == "resolution");
  const Scenario t = with_knob(s, "k", -1.5);
  CHECK(t.config["ambient"]["density"]["k"].get<double>() == -1.5);
  CHECK_THROWS_AS(resolve_knob(s, "missing"), ConfigError);
}

TEST_CASE("Richardson order") {
  // q_h = 1 + h^2 at h = 1, 1/2, 1/4.
  CHECK(richardson_order(2.0, 1.25, 1.0625, 2.0) == doctest::Approx(2.0));
  CHECK(richardson_order(2.0, 1.5, 1.25, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("chart surfaces from expressions") {
  const Json cfg = Json::parse(R"cfg({
    "name": "chart-cylinder", "resolution": 8,
    "ambient": {"boundary": {"name": "slab"}},
    "surface": {"chart": {"params": {"r": 0.8}, "patches": [{
      "x": "r*cos(u)", "y": "r*sin(u)", "z": "v", "u": [0, 6.283185307179586], "v": [-1, 1],
      "periodic_u": true, "cells_u": 3, "boundary_sides": ["v_lo", "v_hi"]}]}},
    "tasks": ["stationarity", "topology"],
    "expect": {"stationary": true, "strongly_stationary": false}
  })cfg");
  const RunResult r = run_scenario(parse_scenario(cfg));
  CHECK(r.exit_code == ExitOk);
  // Round cylinder of radius r: H_f = 2H = -1/r.
  CHECK(r.report["stationarity"]["H_f_mean"].get<double>() == doctest::Approx(-1.25));
  CHECK(r.report["mesh"]["chi"].get<int>() == 0);

  Json bad = cfg;
  bad["surface"]["chart"]["patches"][0]["z"] = "v + 0.5";  // boundary sides leave dM
  CHECK(run_scenario(parse_scenario(bad)).exit_code == ExitConfig);
  bad["surface"]["chart"]["patches"][0]["z"] = "v + w";
  CHECK_THROWS_AS(parse_scenario(bad), ConfigError);
}
