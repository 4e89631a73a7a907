#include "wstab/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "wstab/errors.hpp"
#include "wstab/parallel.hpp"
#include "wstab/report.hpp"
#include "wstab/stability.hpp"
#include "wstab/theorems.hpp"

namespace wstab {

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> t = {
      "stationarity", "first-variation", "second-variation", "spectrum", "identities",
      "topology",     "area-bounds",     "rigidity",         "foliation"};
  return t;
}

namespace {

struct Expectations {
  std::optional<bool> stationary, strongly_stationary, strongly_stable, volume_constrained_stable,
      rigidity;
  std::optional<std::string> topology;
  std::optional<double> crossing, crossing_tol;
};

struct Plan {
  std::string name;
  int resolution = 16;
  unsigned seed = 12345;
  AmbientSpace space;
  ImmersionPtr immersion;
  std::set<std::string> tasks;
  std::vector<VariationField> fields;
  int spectrum_count = 6;
  int dense_limit = EigenOptions{}.dense_limit;
  std::optional<double> S0;
  std::optional<VariationField> foliation_field;
  std::vector<double> foliation_s;
  double tol_H = -1.0, tol_angle = 1e-6, tol_verdict = -1.0, tol_rigidity = 1e-6;
  Expectations expect;
  std::string sweep_param;
  std::vector<double> sweep_values;
};

Plan build_plan(const Json& in, Json& normalized) {
  Plan p;
  ConfigNode root(in, normalized, "");
  p.name = root.string("name");
  if (p.name.empty()) root.fail("name", "must not be empty");
  root.string("description", "");
  const int seed = root.integer("seed", 12345);
  if (seed < 0) root.fail("seed", "must be non-negative");
  p.seed = static_cast<unsigned>(seed);
  p.resolution = root.integer("resolution", 16);
  if (p.resolution < 4) root.fail("resolution", "must be at least 4");
  if (p.resolution > 512) root.fail("resolution", "must be at most 512");

  p.space = parse_ambient(root.child("ambient"));
  p.immersion = std::make_shared<const Immersion>(parse_surface(root.child("surface")));

  const std::vector<std::string> tasks =
      root.strings("tasks", std::vector<std::string>{"stationarity"});
  for (const std::string& t : tasks) {
    if (std::find(task_names().begin(), task_names().end(), t) == task_names().end()) {
      std::string known;
      for (const auto& n : task_names()) known += (known.empty() ? "" : ", ") + n;
      root.fail("tasks", "unknown task '" + t + "' (known: " + known + ")");
    }
    p.tasks.insert(t);
  }

  {
    ConfigNode v = root.child("variation");
    for (ConfigNode& f : v.children("fields")) p.fields.push_back(parse_field(f));
    v.finish();
    if ((p.tasks.count("first-variation") || p.tasks.count("second-variation")) &&
        p.fields.empty())
      v.fail("fields", "the variation tasks need at least one field");
  }
  {
    ConfigNode s = root.child("spectrum");
    p.spectrum_count = s.integer("count", 6);
    if (p.spectrum_count < 1) s.fail("count", "must be at least 1");
    p.dense_limit = s.integer("dense_limit", p.dense_limit);
    if (p.dense_limit < 0) s.fail("dense_limit", "must be non-negative");
    s.finish();
  }
  {
    ConfigNode a = root.child("area_bounds");
    if (a.has("S0") || p.tasks.count("area-bounds")) {
      p.S0 = a.number("S0");
      if (*p.S0 == 0.0) a.fail("S0", "must be non-zero (the bounds degenerate at 0)");
    }
    a.finish();
  }
  {
    ConfigNode f = root.child("foliation");
    if (f.has("field") || p.tasks.count("foliation")) {
      p.foliation_field = parse_field(f.child("field"));
      p.foliation_s = f.numbers("s_values", std::vector<double>{-0.2, -0.1, 0.0, 0.1, 0.2});
      if (p.foliation_s.empty()) f.fail("s_values", "must not be empty");
    }
    f.finish();
  }
  {
    ConfigNode t = root.child("tolerances");
    const double h = t.number("H", 0.0);
    if (h < 0.0) t.fail("H", "must be non-negative (0 selects the automatic value)");
    p.tol_H = h > 0.0 ? h : -1.0;
    p.tol_angle = t.number("angle", 1e-6);
    if (!(p.tol_angle > 0.0)) t.fail("angle", "must be positive");
    const double v = t.number("verdict", 0.0);
    if (v < 0.0) t.fail("verdict", "must be non-negative (0 selects the automatic value)");
    p.tol_verdict = v > 0.0 ? v : -1.0;
    p.tol_rigidity = t.number("rigidity", 1e-6);
    if (!(p.tol_rigidity > 0.0)) t.fail("rigidity", "must be positive");
    t.finish();
  }
  {
    ConfigNode e = root.child("expect");
    auto opt_bool = [&](const char* key, std::optional<bool>& out) {
      if (e.has(key)) out = e.boolean(key);
    };
    opt_bool("stationary", p.expect.stationary);
    opt_bool("strongly_stationary", p.expect.strongly_stationary);
    opt_bool("strongly_stable", p.expect.strongly_stable);
    opt_bool("volume_constrained_stable", p.expect.volume_constrained_stable);
    opt_bool("rigidity", p.expect.rigidity);
    if (e.has("topology")) {
      const std::string t = e.string("topology");
      static const std::set<std::string> ok = {"SphereOrTorus", "DiskOrCylinder", "NotApplicable"};
      if (!ok.count(t)) e.fail("topology", "expected SphereOrTorus, DiskOrCylinder or NotApplicable");
      p.expect.topology = t;
    }
    if (e.has("crossing")) {
      ConfigNode c = e.child("crossing");
      p.expect.crossing = c.number("value");
      p.expect.crossing_tol = c.number("tol", 2e-2);
      c.finish();
    }
    e.finish();
  }
  {
    ConfigNode s = root.child("sweep");
    if (s.has("param") || s.has("range")) {
      p.sweep_param = s.string("param");
      const std::string range = s.string("range");
      try {
        p.sweep_values = parse_range(range);
      } catch (const ConfigError& err) {
        s.fail("range", err.what());
      }
    }
    s.finish();
  }
  root.finish();
  return p;
}

// --------------------------------------------------------------- knob paths

struct PathStep {
  std::string key;
  int index = -1;
};

std::vector<PathStep> split_path(const std::string& path) {
  std::vector<PathStep> out;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    PathStep st;
    const auto lb = part.find('[');
    if (lb != std::string::npos) {
      const auto rb = part.find(']', lb);
      if (rb == std::string::npos) throw ConfigError("malformed knob path '" + path + "'");
      st.key = part.substr(0, lb);
      st.index = std::atoi(part.substr(lb + 1, rb - lb - 1).c_str());
    } else {
      st.key = part;
    }
    out.push_back(st);
  }
  return out;
}

Json* locate(Json& root, const std::string& path) {
  Json* cur = &root;
  for (const PathStep& st : split_path(path)) {
    if (!cur->is_object() || !cur->contains(st.key)) return nullptr;
    cur = &(*cur)[st.key];
    if (st.index >= 0) {
      if (!cur->is_array() || st.index >= static_cast<int>(cur->size())) return nullptr;
      cur = &(*cur)[st.index];
    }
  }
  return cur;
}

void collect_leaves(const Json& j, const std::string& prefix,
                    std::vector<std::pair<std::string, const Json*>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      collect_leaves(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      collect_leaves(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, &j);
  }
}

// ------------------------------------------------------------------ running

struct Runner {
  Runner(const Plan& p, Json& r) : plan(p), report(r) {}

  const Plan& plan;
  Json& report;
  std::vector<CheckRecord> checks;
  std::vector<std::string> sample_rows;  // task,field,s,value
  std::vector<std::string> spectrum_rows;

  SurfaceMesh mesh;
  ExtrinsicData data;
  std::optional<IndexFormAssembly> assembly;
  std::optional<StationarityVerdict> stationarity;
  std::optional<SpectralResult> spectrum;
  std::optional<ConstrainedVerdict> constrained;
  std::optional<ChainReport> chain;
  std::optional<RigidityFlags> rigidity;
  bool strongly_stable = false;

  bool wants(const char* t) const { return plan.tasks.count(t) > 0; }

  void add(CheckRecord c) { checks.push_back(std::move(c)); }

  CheckRecord expectation(std::string name, bool actual, std::optional<bool> expected) {
    CheckRecord c;
    c.name = std::move(name);
    c.asserted = expected.has_value();
    c.lhs = actual ? 1.0 : 0.0;
    c.rhs = expected.value_or(actual) ? 1.0 : 0.0;
    c.pass = !expected || *expected == actual;
    c.note = c.asserted ? "expected " + std::string(*expected ? "true" : "false") : "reported only";
    return c;
  }

  const IndexFormAssembly& fem() {
    if (!assembly) assembly = assemble(plan.space, mesh);
    return *assembly;
  }

  void geometry() {
    validate_immersion(plan.space, *plan.immersion);
    mesh = mesh_from_immersion(plan.space, plan.immersion, plan.resolution);
    data = extrinsic_geometry(plan.space, mesh);
    const GaussBonnet gb = gauss_bonnet(mesh, data);
    report["mesh"] = {{"vertices", mesh.vertex_count()},
                      {"edges", mesh.edge_count},
                      {"triangles", static_cast<int>(mesh.triangles.size())},
                      {"boundary_edges", static_cast<int>(mesh.boundary_edges.size())},
                      {"chi", mesh.euler_characteristic()},
                      {"genus", mesh.genus},
                      {"boundary_components", mesh.boundary_components},
                      {"resolution", mesh.resolution},
                      {"min_angle_deg", mesh.min_angle_deg}};
    report["geometry"] = {
        {"area", integrate(data, [](const InteriorSample&) { return 1.0; })},
        {"area_f", integrate(data, [](const InteriorSample& s) { return s.f; })},
        {"boundary_length_f", integrate_boundary(data, [](const BoundarySample& s) { return s.f; })},
        {"gauss_bonnet",
         {{"total_curvature", gb.total_curvature},
          {"boundary_curvature", gb.boundary_curvature},
          {"two_pi_chi", gb.two_pi_chi},
          {"rel_error", gb.rel_error}}},
        {"orientation_sign", plan.immersion->orientation_sign}};
  }

  void run_stationarity() {
    stationarity = stationarity_verdict(plan.space, mesh, data, plan.tol_H, plan.tol_angle);
    const StationarityVerdict& v = *stationarity;
    report["stationarity"] = {{"strong", v.strong},
                              {"volume_constrained", v.volume_constrained},
                              {"H_f_mean", v.H_f_mean},
                              {"H_f_spread", v.H_f_spread},
                              {"max_contact", v.max_contact},
                              {"tol_H", v.tol_H},
                              {"tol_angle", v.tol_angle}};
    if (!mesh.boundary_edges.empty()) {
      const std::vector<double> angles = contact_angle(plan.space, mesh, data);
      double lo = angles.front(), hi = angles.front();
      for (double a : angles) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      report["stationarity"]["contact_angle_min"] = lo;
      report["stationarity"]["contact_angle_max"] = hi;
    }
    if (wants("stationarity")) {
      add(expectation("stationarity.volume-constrained", v.volume_constrained,
                      plan.expect.stationary));
      add(expectation("stationarity.strong", v.strong, plan.expect.strongly_stationary));
    }
  }

  void run_first_variation() {
    Json list = Json::array();
    for (const VariationField& X : plan.fields) {
      require_admissible(plan.space, data, X);
      const DeformedFamily fam = make_family(plan.space, mesh, X);
      const FdEstimate fd = first_variation_fd(plan.space, fam);
      const double formula = first_variation_formula(plan.space, mesh, data, X);
      const FdEstimate vfd = volume_variation_fd(plan.space, fam);
      const double vformula = volume_first_variation(plan.space, mesh, data, X);
      const DivergenceResidual div = divergence_theorem_residual(plan.space, mesh, data, X);
      const double div_scale = std::max({1.0, std::abs(div.divergence_term),
                                         std::abs(div.mean_curvature_term),
                                         std::abs(div.boundary_term)});
      add(closeness_check("first-variation." + X.name + ".area", fd.value, formula,
                          std::max(1e-6, 1e-4 * std::abs(formula))));
      add(closeness_check("first-variation." + X.name + ".volume", vfd.value, vformula,
                          std::max(1e-6, 1e-4 * std::abs(vformula))));
      add(upper_check("first-variation." + X.name + ".divergence", div.residual,
                      1e-4 * div_scale));
      for (std::size_t i = 0; i < fd.s_samples.size(); ++i)
        sample_rows.push_back("area," + X.name + "," + format_number(fd.s_samples[i]) + "," +
                              format_number(fd.f_samples[i]));
      for (std::size_t i = 0; i < vfd.s_samples.size(); ++i)
        sample_rows.push_back("volume," + X.name + "," + format_number(vfd.s_samples[i]) + "," +
                              format_number(vfd.f_samples[i]));
      list.push_back({{"field", X.name},
                      {"admissibility_residual", admissibility_residual(plan.space, data, X)},
                      {"area_fd", to_json(fd)},
                      {"area_formula", formula},
                      {"volume_fd", to_json(vfd)},
                      {"volume_formula", vformula},
                      {"divergence",
                       {{"divergence_term", div.divergence_term},
                        {"mean_curvature_term", div.mean_curvature_term},
                        {"boundary_term", div.boundary_term},
                        {"residual", div.residual}}}});
    }
    report["first_variation"] = list;
  }

  void run_second_variation() {
    Json list = Json::array();
    for (const VariationField& X : plan.fields) {
      require_admissible(plan.space, data, X);
      const DeformedFamily fam = make_family(plan.space, mesh, X);
      const double index = index_form_of_field(plan.space, mesh, data, X);
      Json entry = {{"field", X.name}, {"index_form", index}};
      try {
        const FdEstimate fd = second_variation_fd(plan.space, fam);
        add(closeness_check("second-variation." + X.name, fd.value, index,
                            std::max(1e-6, 1e-3 * std::abs(index))));
        entry["fd"] = to_json(fd);
        for (std::size_t i = 0; i < fd.s_samples.size(); ++i)
          sample_rows.push_back("second," + X.name + "," + format_number(fd.s_samples[i]) + "," +
                                format_number(fd.f_samples[i]));
        const JacobiFdCheck jc = jacobi_fd_check(plan.space, fam, fem());
        CheckRecord c = upper_check("jacobi-fd." + X.name, jc.max_relative_residual, 1e-3);
        // Pointwise comparison against the mass-inverted P1 operator is only
        // resolution-independent for constant u.
        const VecX u = normal_component(mesh, X);
        const double umax = u.cwiseAbs().maxCoeff();
        c.asserted = u.maxCoeff() - u.minCoeff() <= 1e-9 * std::max(1.0, umax);
        if (!c.asserted) c.note = "non-constant normal speed; reported only";
        add(c);
        entry["jacobi_fd"] = {{"max_relative_residual", jc.max_relative_residual},
                              {"max_abs_residual", jc.max_abs_residual},
                              {"scale", jc.scale},
                              {"pass", jc.pass}};
      } catch (const PreconditionError& e) {
        CheckRecord c;
        c.name = "second-variation." + X.name;
        c.note = e.what();
        add(c);
        entry["error"] = e.what();
      }
      list.push_back(entry);
    }
    report["second_variation"] = list;
  }

  void run_spectrum() {
    EigenOptions eo;
    eo.seed = plan.seed;
    eo.dense_limit = plan.dense_limit;
    const IndexFormAssembly& a = fem();
    spectrum = robin_eigenproblem(a, std::min(plan.spectrum_count, a.dof), eo);
    const double tol = plan.tol_verdict > 0.0 ? plan.tol_verdict : default_verdict_tol(*spectrum);
    strongly_stable = strong_stability_verdict(*spectrum, tol);
    constrained = volume_constrained_verdict(a, *spectrum, tol, eo);
    const SpectralResult& s = *spectrum;
    Json j = to_json(s);
    j["surface"] = plan.immersion->name;
    j["density"] = plan.space.density.name;
    j["verdict_strong"] = strongly_stable;
    j["verdict_volume_constrained"] = constrained->stable;
    j["verdict_tol"] = tol;
    j["constrained"] = to_json(constrained->spectrum);
    j["negative_count"] = static_cast<int>(
        std::count_if(s.eigenvalues.begin(), s.eigenvalues.end(), [&](double l) { return l < -tol; }));
    j["assembly_symmetry_error"] = assembly_symmetry_error(a);
    report["spectrum"] = j;
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
      spectrum_rows.push_back("0," + std::to_string(i) + "," + format_number(s.eigenvalues[i]) +
                              "," + format_number(s.solver_residuals[i]));
    const SpectralResult& c = constrained->spectrum;
    for (std::size_t i = 0; i < c.eigenvalues.size(); ++i)
      spectrum_rows.push_back("1," + std::to_string(i) + "," + format_number(c.eigenvalues[i]) +
                              "," + format_number(c.solver_residuals[i]));
    if (wants("spectrum")) {
      add(upper_check("spectrum.residuals", std::max(s.residual_max(), c.residual_max()), 1e-8));
      add(upper_check("spectrum.constrained-above-unconstrained",
                      constrained->unconstrained_min - tol, constrained->constrained_min));
      add(expectation("spectrum.strongly-stable", strongly_stable, plan.expect.strongly_stable));
      add(expectation("spectrum.volume-constrained-stable", constrained->stable,
                      plan.expect.volume_constrained_stable));
    }
  }

  void run_identities() {
    Json j;
    if (plan.space.dim == 3) {
      const IdentityResidual g = gauss_rearrangement_residual(plan.space, mesh, data);
      add(upper_check("identity.gauss-rearrangement", g.max_residual, 1e-5));
      j["gauss_rearrangement"] = {{"max_residual", g.max_residual}, {"scale", g.scale}};
    }
    const BoundaryIdentity b = boundary_identity_residual(plan.space, mesh, data);
    j["boundary"] = {{"max_residual", b.max_residual},
                     {"max_contact", b.max_contact},
                     {"applicable", b.applicable}};
    if (b.applicable) add(upper_check("identity.boundary", b.max_residual, 1e-6));
    const GaussBonnet gb = gauss_bonnet(mesh, data);
    CheckRecord c = upper_check("identity.gauss-bonnet", gb.rel_error, 1e-3);
    c.lhs = gb.total_curvature + gb.boundary_curvature;
    c.rhs = gb.two_pi_chi;
    c.slack = 1e-3 - gb.rel_error;
    add(c);
    report["identities"] = j;
  }

  void run_topology() {
    chain = stability_topology_chain(plan.space, mesh, data, fem());
    const TopologyVerdict v = topology_verdict(*chain, strongly_stable);
    Json j = to_json(*chain);
    j["verdict"] = to_string(v);
    j["strongly_stable"] = strongly_stable;
    report["topology"] = j;
    CheckRecord c1 = upper_check("chain.first-inequality", chain->I_f_u, chain->bound1 + chain->tol);
    c1.hypotheses = chain->hypotheses;
    c1.asserted = chain->asserted;
    CheckRecord c2 =
        upper_check("chain.second-inequality", chain->bound1, chain->bound2 + chain->tol);
    c2.hypotheses = chain->hypotheses;
    c2.asserted = chain->asserted;
    if (!chain->asserted) {
      c1.note = c2.note = "hypotheses or stationarity fail; reported only";
    }
    add(c1);
    add(c2);
    CheckRecord tv;
    tv.name = "topology.verdict";
    tv.hypotheses = chain->hypotheses;
    tv.lhs = chain->chi;
    tv.rhs = 0.0;
    tv.slack = chain->chi;
    tv.pass = v != TopologyVerdict::Inconsistent &&
              (!plan.expect.topology || *plan.expect.topology == to_string(v));
    tv.note = std::string(to_string(v)) +
              (plan.expect.topology ? " (expected " + *plan.expect.topology + ")" : "");
    add(tv);
  }

  void run_area_bounds() {
    const bool stable = strongly_stable;
    const bool stationary = stationarity && stationarity->strong;
    const AreaBoundReport r = area_bound_check(plan.space, mesh, data, *plan.S0, stable, stationary);
    report["area_bounds"] = to_json(r);
    CheckRecord c;
    c.name = "area-bound." + (r.theorem.empty() ? std::string("none") : r.theorem);
    c.hypotheses = {r.hypothesis};
    c.asserted = r.status != BoundStatus::NotApplicable;
    c.lhs = r.area;
    c.rhs = r.bound;
    c.slack = r.slack;
    c.pass = r.status != BoundStatus::Fail;
    c.note = std::string(to_string(r.status)) + (r.note.empty() ? "" : ": " + r.note);
    add(c);
  }

  void run_rigidity() {
    rigidity = rigidity_flags(plan.space, mesh, data, plan.tol_rigidity);
    report["rigidity"] = to_json(*rigidity);
    add(expectation("rigidity.flags", rigidity->all(), plan.expect.rigidity));
    if (chain) {
      // Equality in the chain with chi = 0 forces every certificate.
      const bool equality = std::abs(chain->I_f_u) <= chain->tol && chain->chi == 0 &&
                            chain->asserted && strongly_stable;
      CheckRecord c;
      c.name = "rigidity.equality-propagation";
      c.asserted = equality;
      c.lhs = equality ? 1.0 : 0.0;
      c.rhs = rigidity->all() ? 1.0 : 0.0;
      c.pass = !equality || rigidity->all();
      c.note = equality ? "chain equality with chi = 0" : "no equality case; reported only";
      add(c);
    }
  }

  void run_foliation() {
    const DeformedFamily fam =
        make_family(plan.space, mesh, *plan.foliation_field, plan.foliation_s);
    const FoliationReport f = foliation_monotonicity_check(plan.space, fam);
    report["foliation"] = to_json(f);
    add(upper_check("foliation.identity", f.max_rel_residual, 1e-3));
    bool asserted = false, monotone = true;
    for (const FoliationSlice& s : f.slices) {
      sample_rows.push_back("foliation-H_f," + fam.field.name + "," + format_number(s.s) + "," +
                            format_number(s.H_f));
      if (s.monotonicity_asserted) {
        asserted = true;
        monotone = monotone && s.monotone;
      }
    }
    CheckRecord c;
    c.name = "foliation.monotone";
    c.asserted = asserted;
    c.pass = monotone;
    c.lhs = monotone ? 1.0 : 0.0;
    c.rhs = 1.0;
    c.note = asserted ? "Ric_f >= 0 and II >= 0 sampled" : "curvature hypotheses fail; reported only";
    add(c);
  }

  void run_all() {
    geometry();
    run_stationarity();
    if (wants("first-variation")) run_first_variation();
    if (wants("second-variation")) run_second_variation();
    const bool need_spectrum = wants("spectrum") || wants("topology") || wants("area-bounds");
    if (need_spectrum) run_spectrum();
    if (wants("identities")) run_identities();
    if (wants("topology")) run_topology();
    if (wants("area-bounds")) run_area_bounds();
    if (wants("rigidity")) run_rigidity();
    if (wants("foliation")) run_foliation();
  }
};

int classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InputError*>(&e) ||
      dynamic_cast<const ImmersionError*>(&e))
    return ExitConfig;
  if (dynamic_cast<const PreconditionError*>(&e)) return ExitCheckFailed;
  return ExitNumerical;
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const InputError*>(&e)) return "InputError";
  if (dynamic_cast<const ImmersionError*>(&e)) return "ImmersionError";
  if (dynamic_cast<const PreconditionError*>(&e)) return "PreconditionError";
  if (dynamic_cast<const MeshingError*>(&e)) return "MeshingError";
  if (dynamic_cast<const SingularBoundaryError*>(&e)) return "SingularBoundaryError";
  if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
  return "Error";
}

int worse(int a, int b) {
  auto rank = [](int c) { return c == ExitConfig ? 3 : c == ExitNumerical ? 2 : c == ExitCheckFailed ? 1 : 0; };
  return rank(a) >= rank(b) ? a : b;
}

double json_number(const Json& j) {
  return j.is_number() ? j.get<double>() : std::nan("");
}

std::optional<double> zero_crossing(const std::vector<double>& x, const std::vector<double>& y) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!std::isfinite(y[i]) || !std::isfinite(y[i + 1])) continue;
    if (y[i] == 0.0) return x[i];
    if (y[i] * y[i + 1] < 0.0) return x[i] - y[i] * (x[i + 1] - x[i]) / (y[i + 1] - y[i]);
  }
  if (!y.empty() && y.back() == 0.0) return x.back();
  return std::nullopt;
}

}  // namespace

Scenario parse_scenario(const Json& j) {
  Scenario s;
  build_plan(j, s.config);
  s.name = s.config["name"].get<std::string>();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  Json j;
  try {
    j = Json::parse(in, nullptr, true, false);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON (" + std::string(e.what()) + ")");
  }
  return parse_scenario(j);
}

RunResult run_scenario(const Scenario& s, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult out;
  Json& report = out.report;
  report["name"] = s.name;
  report["config"] = s.config;
  std::vector<CheckRecord> checks;
  std::vector<std::string> sample_rows, spectrum_rows;
  std::optional<SurfaceMesh> mesh;
  std::optional<ExtrinsicData> data;
  std::optional<SpectralResult> spectrum;
  int code = ExitOk;
  Plan plan;
  try {
    Json normalized;
    plan = build_plan(s.config, normalized);
    Runner r(plan, report);
    try {
      r.run_all();
    } catch (...) {
      checks = std::move(r.checks);
      sample_rows = std::move(r.sample_rows);
      spectrum_rows = std::move(r.spectrum_rows);
      throw;
    }
    checks = std::move(r.checks);
    sample_rows = std::move(r.sample_rows);
    spectrum_rows = std::move(r.spectrum_rows);
    mesh = std::move(r.mesh);
    data = std::move(r.data);
    spectrum = std::move(r.spectrum);

    if (!plan.sweep_values.empty()) {
      Json inner = s.config;
      inner["sweep"] = Json::object();
      inner["expect"] = Json::object();
      Scenario base;
      base.name = s.name;
      base.config = inner;
      const SweepResult sw = sweep(base, plan.sweep_param, plan.sweep_values);
      Json rows = Json::array();
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < sw.rows.size(); ++i) {
        Json row = Json::object();
        for (std::size_t c = 0; c < sw.columns.size(); ++c)
          row[sw.columns[c]] = std::isfinite(sw.rows[i][c]) ? Json(sw.rows[i][c]) : Json(nullptr);
        rows.push_back(row);
        xs.push_back(sw.rows[i][0]);
        ys.push_back(sw.rows[i][2]);
      }
      Json sj = {{"param", sw.param}, {"rows", rows}};
      const std::optional<double> cross = zero_crossing(xs, ys);
      sj["lambda_min_zero_crossing"] = cross ? Json(*cross) : Json(nullptr);
      report["sweep"] = sj;
      for (int c : sw.exit_codes)
        if (c != ExitOk) {
          CheckRecord rec;
          rec.name = "sweep.runs";
          rec.note = "a sweep point exited with code " + std::to_string(c);
          checks.push_back(rec);
          break;
        }
      if (plan.expect.crossing) {
        CheckRecord c = closeness_check("sweep.zero-crossing", cross.value_or(std::nan("")),
                                        *plan.expect.crossing, *plan.expect.crossing_tol);
        if (!cross) c.note = "lambda_min does not change sign over the range";
        checks.push_back(c);
      }
      if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        write_text(opt.out_dir + "/sweep.csv", sw.csv());
      }
    }
  } catch (const std::exception& e) {
    code = classify(e);
    report["error"] = {{"kind", error_kind(e)}, {"message", e.what()}};
  }

  Json cj = Json::array();
  int asserted = 0, failed = 0;
  for (const CheckRecord& c : checks) {
    cj.push_back(to_json(c));
    if (c.asserted) {
      ++asserted;
      if (!c.pass) ++failed;
    }
  }
  report["checks"] = cj;
  report["summary"] = {{"asserted", asserted}, {"failed", failed},
                       {"reported", static_cast<int>(checks.size())}};
  if (failed > 0) code = worse(code, ExitCheckFailed);
  report["exit_code"] = code;
  out.exit_code = code;

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out.metadata = {{"scenario", s.name},
                  {"generated_at", stamp},
                  {"wall_seconds", wall},
                  {"workers", worker_count()},
                  {"version", "1.0.0"}};

  if (!opt.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    const std::string d = opt.out_dir + "/";
    write_json(d + "report.json", report);
    write_json(d + "metadata.json", out.metadata);
    std::string samples = "task,field,s,value\n";
    for (const auto& r : sample_rows) samples += r + "\n";
    write_text(d + "samples.csv", samples);
    std::string spec = "constrained,index,eigenvalue,residual\n";
    for (const auto& r : spectrum_rows) spec += r + "\n";
    write_text(d + "spectrum.csv", spec);
    if (mesh && opt.write_mesh) {
      write_off(*mesh, d + "mesh.off");
      if (data) write_geometry_csv(*data, d + "geometry.csv");
      if (spectrum) write_eigenfunctions_csv(*mesh, *spectrum, d + "eigenfunctions.csv");
    }
    write_text(d + "plot.gp", gnuplot_script(!spectrum_rows.empty(), !sample_rows.empty(),
                                             !plan.sweep_values.empty(), plan.sweep_param));
  }
  return out;
}

// ------------------------------------------------------------------- sweeps

std::vector<double> parse_range(const std::string& text) {
  auto parse_num = [&](const std::string& t) {
    const char* b = t.c_str();
    char* e = nullptr;
    const double v = std::strtod(b, &e);
    if (t.empty() || e != b + t.size() || !std::isfinite(v))
      throw ConfigError("range '" + text + "': '" + t + "' is not a number");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') == std::string::npos) {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_num(part));
    if (out.empty()) throw ConfigError("range '" + text + "' is empty");
    return out;
  }
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw ConfigError("range '" + text + "': expected a:b:step");
  const double a = parse_num(parts[0]), b = parse_num(parts[1]), step = parse_num(parts[2]);
  if (step == 0.0) throw ConfigError("range '" + text + "': step must be non-zero");
  const double n = (b - a) / step;
  if (n < -1e-9) throw ConfigError("range '" + text + "' is empty");
  const int count = static_cast<int>(std::floor(n + 1e-9)) + 1;
  if (count > 10000) throw ConfigError("range '" + text + "' has too many points");
  for (int i = 0; i < count; ++i) out.push_back(a + i * step);
  return out;
}

std::string resolve_knob(const Scenario& s, const std::string& knob) {
  std::vector<std::pair<std::string, const Json*>> leaves;
  collect_leaves(s.config, "", leaves);
  const Json* leaf = nullptr;
  std::string path;
  if (knob.find('.') != std::string::npos || knob.find('[') != std::string::npos) {
    Json copy = s.config;
    if (!locate(copy, knob)) throw ConfigError("unknown knob '" + knob + "'");
    for (const auto& [p, j] : leaves)
      if (p == knob) leaf = j;
    path = knob;
    if (!leaf) throw ConfigError("knob '" + knob + "' is not a scalar");
  } else {
    std::vector<std::string> matches;
    for (const auto& [p, j] : leaves) {
      const auto dot = p.rfind('.');
      const std::string last = dot == std::string::npos ? p : p.substr(dot + 1);
      if (last == knob && p.find("sweep") != 0) {
        matches.push_back(p);
        leaf = j;
      }
    }
    if (matches.empty()) throw ConfigError("unknown knob '" + knob + "'");
    if (matches.size() > 1) {
      std::string all;
      for (const auto& m : matches) all += (all.empty() ? "" : ", ") + m;
      throw ConfigError("knob '" + knob + "' is ambiguous (" + all + ")");
    }
    path = matches.front();
  }
  if (!leaf->is_number()) throw ConfigError("knob '" + path + "' is not numeric");
  return path;
}

Scenario with_knob(const Scenario& s, const std::string& knob, double value) {
  const std::string path = resolve_knob(s, knob);
  Json cfg = s.config;
  Json* leaf = locate(cfg, path);
  if (leaf->is_number_integer()) {
    if (value != std::round(value))
      throw ConfigError("knob '" + path + "' takes integer values");
    *leaf = static_cast<long long>(std::llround(value));
  } else {
    *leaf = value;
  }
  return parse_scenario(cfg);
}

double richardson_order(double q0, double q1, double q2, double ratio) {
  const double d1 = std::abs(q1 - q0), d2 = std::abs(q2 - q1);
  if (!(d1 > 0.0) || !(d2 > 0.0) || !(ratio > 1.0)) return std::nan("");
  return std::log(d1 / d2) / std::log(ratio);
}

std::string SweepResult::csv() const {
  std::string s;
  for (std::size_t c = 0; c < columns.size(); ++c) s += (c ? "," : "") + columns[c];
  s += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) s += ",";
      if (c == 1) s += std::to_string(static_cast<int>(row[c]));
      else s += format_number(row[c]);
    }
    s += "\n";
  }
  return s;
}

SweepResult sweep(const Scenario& s, const std::string& knob, const std::vector<double>& values,
                  const RunOptions& opt) {
  if (values.empty()) throw ConfigError("sweep range is empty");
  SweepResult r;
  r.param = resolve_knob(s, knob);
  r.columns = {r.param, "exit_code", "lambda_min", "lambda_2", "constrained_min",
               "H_f_mean", "area_f", "chi"};
  const bool resolution = r.param == "resolution";
  if (resolution) {
    r.columns.push_back("order_lambda_min");
    r.columns.push_back("order_lambda_2");
    r.columns.push_back("order_constrained_min");
  }
  RunOptions inner;
  inner.write_mesh = false;
  Scenario base = s;
  base.config["sweep"] = Json::object();
  for (double v : values) {
    const Scenario sv = with_knob(base, r.param, v);
    const RunResult rr = run_scenario(sv, inner);
    const Json& rep = rr.report;
    std::vector<double> row = {v, static_cast<double>(rr.exit_code)};
    auto at = [&](std::initializer_list<const char*> keys) -> double {
      const Json* cur = &rep;
      for (const char* k : keys) {
        if (!cur->is_object() || !cur->contains(k)) return std::nan("");
        cur = &(*cur)[k];
      }
      return json_number(*cur);
    };
    row.push_back(at({"spectrum", "lambda_min"}));
    double l2 = std::nan("");
    if (rep.contains("spectrum") && rep["spectrum"]["eigenvalues"].size() > 1)
      l2 = json_number(rep["spectrum"]["eigenvalues"][1]);
    row.push_back(l2);
    row.push_back(at({"spectrum", "constrained", "lambda_min"}));
    row.push_back(at({"stationarity", "H_f_mean"}));
    row.push_back(at({"geometry", "area_f"}));
    row.push_back(at({"mesh", "chi"}));
    r.rows.push_back(row);
    r.exit_codes.push_back(rr.exit_code);
  }
  if (resolution) {
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      for (int q : {2, 3, 4}) {
        double order = std::nan("");
        if (i >= 2)
          order = richardson_order(r.rows[i - 2][q], r.rows[i - 1][q], r.rows[i][q],
                                   r.rows[i][0] / r.rows[i - 1][0]);
        r.rows[i].push_back(order);
      }
    }
  }
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    write_text(opt.out_dir + "/sweep.csv", r.csv());
    write_text(opt.out_dir + "/plot.gp", gnuplot_script(false, false, true, r.param));
  }
  return r;
}

}  // namespace wstab
