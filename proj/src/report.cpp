#include "wstab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "wstab/errors.hpp"

namespace wstab {

namespace {
// JSON has no NaN or infinity; they become null.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}
}  // namespace

CheckRecord closeness_check(std::string name, double lhs, double rhs, double tol) {
  CheckRecord c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = tol - std::abs(lhs - rhs);
  c.pass = c.slack >= 0.0;
  return c;
}

CheckRecord upper_check(std::string name, double lhs, double rhs) {
  CheckRecord c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = rhs - lhs;
  c.pass = c.slack >= 0.0;
  return c;
}

Json to_json(const Hypothesis& h) {
  return {{"name", h.name}, {"sampled_min", num(h.sampled_min)}, {"holds", h.holds}};
}

Json to_json(const CheckRecord& c) {
  Json hyps = Json::array();
  for (const Hypothesis& h : c.hypotheses) hyps.push_back(to_json(h));
  Json j = {{"name", c.name},        {"hypotheses", hyps},  {"asserted", c.asserted},
            {"lhs", num(c.lhs)},     {"rhs", num(c.rhs)},   {"slack", num(c.slack)},
            {"pass", c.pass}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json to_json(const SpectralResult& s) {
  return {{"eigenvalues", nums(s.eigenvalues)},
          {"lambda_min", num(s.lambda_min())},
          {"residuals", nums(s.solver_residuals)},
          {"residual_max", num(s.residual_max())},
          {"solver", s.solver},
          {"dof", s.dof}};
}

Json to_json(const ChainReport& c) {
  Json hyps = Json::array();
  for (const Hypothesis& h : c.hypotheses) hyps.push_back(to_json(h));
  return {{"I_f_u", num(c.I_f_u)},
          {"I_f_u_fem", num(c.I_f_u_fem)},
          {"bound1", num(c.bound1)},
          {"bound2", num(c.bound2)},
          {"term_scalar", num(c.term_scalar)},
          {"term_sigma", num(c.term_sigma)},
          {"term_grad_psi", num(c.term_grad_psi)},
          {"term_boundary_mean_curvature", num(c.term_boundary_mc)},
          {"chi", c.chi},
          {"genus", c.genus},
          {"boundary_components", c.boundary_components},
          {"hypotheses", hyps},
          {"hypotheses_hold", c.hypotheses_hold},
          {"stationary", c.stationary},
          {"asserted", c.asserted},
          {"first_inequality", c.first_inequality},
          {"second_inequality", c.second_inequality},
          {"equality_throughout", c.equality_throughout},
          {"tol", num(c.tol)},
          {"pass", c.pass}};
}

Json to_json(const RigidityFlags& r) {
  return {{"totally_geodesic", r.totally_geodesic},
          {"density_const_on_surface", r.density_const_on_surface},
          {"ricci_normal_zero", r.ricci_normal_zero},
          {"II_NN_zero", r.II_NN_zero},
          {"boundary_geodesic", r.boundary_geodesic},
          {"gauss_flat", r.gauss_flat},
          {"all", r.all()},
          {"max_sigma", num(r.max_sigma)},
          {"max_grad_psi", num(r.max_grad_psi)},
          {"max_ricci", num(r.max_ricci)},
          {"max_II_NN", num(r.max_II_NN)},
          {"max_h", num(r.max_h)},
          {"max_K", num(r.max_K)},
          {"tol", num(r.tol)}};
}

Json to_json(const AreaBoundReport& a) {
  return {{"S0", num(a.S0)},         {"area_f", num(a.area)},
          {"bound", num(a.bound)},   {"slack", num(a.slack)},
          {"chi", a.chi},            {"hypothesis", to_json(a.hypothesis)},
          {"theorem", a.theorem},    {"status", to_string(a.status)},
          {"note", a.note}};
}

Json to_json(const FoliationReport& f) {
  Json slices = Json::array();
  for (const FoliationSlice& s : f.slices)
    slices.push_back({{"s", num(s.s)},
                      {"H_f", num(s.H_f)},
                      {"dH_f", num(s.dH_f)},
                      {"area_f", num(s.area)},
                      {"lhs", num(s.lhs)},
                      {"rhs", num(s.rhs)},
                      {"rel_residual", num(s.rel_residual)},
                      {"min_ricci_f", num(s.min_ricci)},
                      {"min_II_NN", num(s.min_II)},
                      {"monotonicity_asserted", s.monotonicity_asserted},
                      {"monotone", s.monotone}});
  return {{"slices", slices}, {"max_rel_residual", num(f.max_rel_residual)}, {"pass", f.pass}};
}

Json to_json(const FdEstimate& e) {
  return {{"value", num(e.value)},
          {"error_estimate", num(e.error_estimate)},
          {"s", nums(e.s_samples)},
          {"values", nums(e.f_samples)}};
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string gnuplot_script(bool spectrum, bool samples, bool sweep, const std::string& sweep_param) {
  std::string s =
      "# gnuplot script; run from the output directory: gnuplot -p plot.gp\n"
      "set datafile separator ','\n"
      "set key autotitle columnhead\n"
      "set grid\n";
  if (spectrum)
    s += "set title 'Robin-Jacobi spectrum'\n"
         "set xlabel 'index'\nset ylabel 'eigenvalue'\n"
         "plot 'spectrum.csv' using 2:($1 == 0 ? $3 : 1/0) with linespoints title "
         "'unconstrained', \\\n"
         "     'spectrum.csv' using 2:($1 == 1 ? $3 : 1/0) with linespoints title "
         "'volume-constrained'\n"
         "pause -1\n";
  if (samples)
    s += "set title 'functional samples'\n"
         "set xlabel 's'\nset ylabel 'value'\n"
         "plot 'samples.csv' using 3:4 with points\n"
         "pause -1\n";
  if (sweep)
    s += "set title 'parameter sweep'\n"
         "set xlabel '" + sweep_param + "'\nset ylabel 'lambda_min'\n"
         "plot 'sweep.csv' using 1:3 with linespoints\n"
         "pause -1\n";
  return s;
}

}  // namespace wstab
