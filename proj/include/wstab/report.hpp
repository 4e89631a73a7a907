// JSON conversion of results, check records and the plain-text writers used
// by the scenario runner.
#pragma once

#include <string>
#include <vector>

#include "wstab/registry.hpp"
#include "wstab/stability.hpp"
#include "wstab/theorems.hpp"

namespace wstab {

// One entry of the report's "checks" array. Only asserted checks decide the
// exit code.
struct CheckRecord {
  std::string name;
  std::vector<Hypothesis> hypotheses;
  bool asserted = true;
  double lhs = 0.0, rhs = 0.0, slack = 0.0;
  bool pass = false;
  std::string note;
};

// |lhs - rhs| <= tol, slack = tol - |lhs - rhs|.
CheckRecord closeness_check(std::string name, double lhs, double rhs, double tol);
// lhs <= rhs, slack = rhs - lhs.
CheckRecord upper_check(std::string name, double lhs, double rhs);

Json to_json(const CheckRecord& c);
Json to_json(const Hypothesis& h);
Json to_json(const SpectralResult& s);
Json to_json(const ChainReport& c);
Json to_json(const RigidityFlags& r);
Json to_json(const AreaBoundReport& a);
Json to_json(const FoliationReport& f);
Json to_json(const FdEstimate& e);

std::string format_number(double x);  // %.17g, "nan"/"inf" spelled out
// Pretty-printed with two-space indent and a trailing newline.
void write_json(const std::string& path, const Json& j);
void write_text(const std::string& path, const std::string& text);
// gnuplot script for whichever of spectrum.csv, samples.csv, sweep.csv exist.
std::string gnuplot_script(bool spectrum, bool samples, bool sweep, const std::string& sweep_param);

}  // namespace wstab
