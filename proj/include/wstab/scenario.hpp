// Scenarios: a validated config tree, the task runner, the builtin registry
// and parameter sweeps. See docs/config.md for the schema.
#pragma once

#include <string>
#include <vector>

#include "wstab/registry.hpp"

namespace wstab {

enum ExitCode { ExitOk = 0, ExitCheckFailed = 2, ExitNumerical = 3, ExitConfig = 4 };

const std::vector<std::string>& task_names();

struct Scenario {
  std::string name;
  Json config;  // normalized: every default filled in
};

// Strict validation; throws ConfigError naming the offending key path.
Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::string& path);

struct RunOptions {
  std::string out_dir;  // empty: no files
  bool write_mesh = true;
};

struct RunResult {
  Json report;    // deterministic content only
  Json metadata;  // timings and environment
  int exit_code = ExitOk;
};
// Never throws for scenario-level failures; they become exit codes and an
// "error" entry in the report.
RunResult run_scenario(const Scenario& s, const RunOptions& opt = {});

struct BuiltinScenario {
  std::string name;
  std::string description;
  Json config;
};
const std::vector<BuiltinScenario>& builtin_scenarios();
Scenario builtin_scenario(const std::string& name);  // ConfigError if unknown
std::string list_builtins();

// "a:b:step" inclusive of b up to rounding; ConfigError on a malformed or empty range.
std::vector<double> parse_range(const std::string& text);
// Short knob names ("k", "resolution", ...) or dotted paths into the config.
std::string resolve_knob(const Scenario& s, const std::string& knob);
Scenario with_knob(const Scenario& s, const std::string& knob, double value);

struct SweepResult {
  std::string param;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<int> exit_codes;
  std::string csv() const;
};
// One run per value, in order. Resolution sweeps gain Richardson order columns.
SweepResult sweep(const Scenario& s, const std::string& knob, const std::vector<double>& values,
                  const RunOptions& opt = {});

// Estimated order log(|q1 - q0| / |q2 - q1|) / log(r), r the refinement ratio.
double richardson_order(double q0, double q1, double q2, double ratio);

}  // namespace wstab
