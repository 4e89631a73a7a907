// wstab: scenario runner for weighted free-boundary stability checks.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "wstab/errors.hpp"
#include "wstab/scenario.hpp"
#include "wstab/stability.hpp"

using namespace wstab;

namespace {

// A path to an existing file is a config; anything else names a builtin.
Scenario resolve(const std::string& what) {
  if (std::filesystem::exists(what)) return load_scenario(what);
  return builtin_scenario(what);
}

void print_summary(const RunResult& r) {
  const Json& rep = r.report;
  std::cout << rep["name"].get<std::string>() << ": ";
  if (rep.contains("error"))
    std::cout << rep["error"]["kind"].get<std::string>() << ": "
              << rep["error"]["message"].get<std::string>() << "\n";
  const Json& s = rep["summary"];
  std::cout << s["asserted"].get<int>() - s["failed"].get<int>() << "/" << s["asserted"].get<int>()
            << " asserted checks pass, exit " << r.exit_code << "\n";
  for (const Json& c : rep["checks"])
    if (c["asserted"].get<bool>() && !c["pass"].get<bool>()) {
      std::cout << "  FAIL " << c["name"].get<std::string>();
      if (c.contains("note")) std::cout << " (" << c["note"].get<std::string>() << ")";
      std::cout << "\n";
    }
}

int run_one(const Scenario& s, const std::string& out) {
  RunOptions opt;
  opt.out_dir = out;
  const RunResult r = run_scenario(s, opt);
  print_summary(r);
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wstab: weighted free-boundary stability scenarios"};
  app.require_subcommand(1);
  std::string out = "wstab-out";

  std::string file;
  auto* run = app.add_subcommand("run", "run a scenario config file");
  run->add_option("file", file, "scenario JSON file")->required();
  run->add_option("--out", out, "output directory");

  std::string name;
  auto* builtin = app.add_subcommand("builtin", "run a builtin scenario");
  builtin->add_option("name", name, "builtin scenario name (see list)")->required();
  builtin->add_option("--out", out, "output directory");

  auto* list = app.add_subcommand("list", "list builtin scenarios");

  std::string target, param, range;
  auto* sw = app.add_subcommand("sweep", "run a scenario across a parameter range");
  sw->add_option("scenario", target, "scenario file or builtin name")->required();
  sw->add_option("--param", param, "knob name or dotted config path")->required();
  sw->add_option("--range", range, "a:b:step or a comma-separated list")->required();
  sw->add_option("--out", out, "output directory");

  int resolution = 0;
  auto* ex = app.add_subcommand("export-mesh", "write mesh.off and geometry.csv of a scenario");
  ex->add_option("scenario", target, "scenario file or builtin name")->required();
  ex->add_option("--resolution", resolution, "override the scenario resolution");
  ex->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ExitConfig;
  }

  try {
    if (*list) {
      std::cout << list_builtins();
      return ExitOk;
    }
    if (*run) return run_one(load_scenario(file), out);
    if (*builtin) return run_one(builtin_scenario(name), out);
    if (*sw) {
      const Scenario s = resolve(target);
      RunOptions opt;
      opt.out_dir = out;
      const SweepResult r = sweep(s, param, parse_range(range), opt);
      std::cout << r.csv();
      int code = ExitOk;
      for (int c : r.exit_codes)
        if (c == ExitConfig || c == ExitNumerical) code = c;
      return code;
    }
    if (*ex) {
      Scenario s = resolve(target);
      if (resolution > 0) s = with_knob(s, "resolution", resolution);
      Json cfg = s.config;
      cfg["tasks"] = Json::array();
      RunOptions opt;
      opt.out_dir = out;
      const RunResult r = run_scenario(parse_scenario(cfg), opt);
      if (r.exit_code == ExitOk)
        std::cout << "wrote " << out << "/mesh.off, " << out << "/mesh.off.boundary, " << out
                  << "/geometry.csv\n";
      else
        print_summary(r);
      return r.exit_code;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ExitConfig;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return ExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitNumerical;
  }
  return ExitOk;
}
