#include "wstab/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wstab/errors.hpp"

namespace wstab {

IdentityResidual gauss_rearrangement_residual(const AmbientSpace& space, const SurfaceMesh&,
                                              const ExtrinsicData& data, double tol) {
  if (space.dim != 3) throw InputError("the rearrangement identity needs surfaces in 3-manifolds");
  IdentityResidual r;
  for (const auto& s : data.interior) {
    const double lhs = s.ric_f_nn + s.sigma2;
    const double rhs = 0.5 * (s.S_f + s.H_f * s.H_f) + 0.5 * (s.sigma2 + s.grad_sigma_psi2) - s.K +
                       s.lap_sigma_psi;
    r.max_residual = std::max(r.max_residual, std::abs(lhs - rhs));
    r.scale = std::max(r.scale, std::abs(lhs));
  }
  r.pass = r.max_residual <= tol;
  return r;
}

BoundaryIdentity boundary_identity_residual(const AmbientSpace&, const SurfaceMesh&,
                                            const ExtrinsicData& data, double tol) {
  BoundaryIdentity b;
  for (const auto& s : data.boundary) {
    b.max_contact = std::max(b.max_contact, std::abs(s.contact));
    b.max_residual = std::max(b.max_residual, std::abs(s.II_NN - (s.trace_II - s.h)));
  }
  b.applicable = !data.boundary.empty() && b.max_contact <= 1e-6;
  b.pass = !b.applicable || b.max_residual <= tol;
  return b;
}

ChainReport stability_topology_chain(const AmbientSpace& space, const SurfaceMesh& mesh,
                                     const ExtrinsicData& data, const IndexFormAssembly& a) {
  ChainReport c;
  c.chi = mesh.euler_characteristic();
  c.genus = mesh.genus;
  c.boundary_components = mesh.boundary_components;
  c.bound2 = 2.0 * M_PI * c.chi;

  double grad_term = 0.0, potential = 0.0, robin = 0.0;
  double min_scalar = std::numeric_limits<double>::infinity();
  double min_bmc = std::numeric_limits<double>::infinity();
  for (const auto& s : data.interior) {
    c.term_scalar += 0.5 * (s.S_f + s.H_f * s.H_f) * s.da;
    c.term_sigma += 0.5 * s.sigma2 * s.da;
    c.term_grad_psi += 0.25 * s.grad_sigma_psi2 * s.da;
    // u = f^{-1/2}: u^2 da_f = da and |grad u|^2 da_f = |grad_S psi|^2 da / 4.
    grad_term += 0.25 * s.grad_sigma_psi2 * s.da;
    potential += (s.ric_f_nn + s.sigma2) * s.da;
    min_scalar = std::min(min_scalar, s.S_f + s.H_f * s.H_f);
  }
  for (const auto& s : data.boundary) {
    c.term_boundary_mc += s.H_f_boundary * s.dl;
    robin += s.II_NN * s.dl;
    min_bmc = std::min(min_bmc, s.H_f_boundary);
  }
  c.I_f_u = grad_term - potential - robin;
  c.bound1 = c.bound2 - c.term_scalar - c.term_sigma - c.term_grad_psi - c.term_boundary_mc;
  const VecX u = interpolate(mesh, [&](const Vec3& p) { return std::exp(-0.5 * space.density.psi(p)); });
  c.I_f_u_fem = index_form_value(a, u, u);

  const double scale = std::max({1.0, std::abs(c.bound2), std::abs(c.term_scalar),
                                 std::abs(c.term_sigma), std::abs(c.term_grad_psi),
                                 std::abs(c.term_boundary_mc), std::abs(c.I_f_u)});
  c.tol = 1e-6 * scale;
  c.hypotheses.push_back(
      {"S_f + H_f^2 >= 0", min_scalar, min_scalar >= -1e-6 * std::max(1.0, std::abs(min_scalar))});
  if (!data.boundary.empty())
    c.hypotheses.push_back({"(H_f)_dM >= 0", min_bmc, min_bmc >= -1e-6 * std::max(1.0, std::abs(min_bmc))});
  c.hypotheses_hold = std::all_of(c.hypotheses.begin(), c.hypotheses.end(),
                                  [](const Hypothesis& h) { return h.holds; });
  c.stationary = stationarity_verdict(space, mesh, data).volume_constrained;
  c.first_inequality = c.I_f_u <= c.bound1 + c.tol;
  c.second_inequality = c.bound1 <= c.bound2 + c.tol;
  c.asserted = c.hypotheses_hold && c.stationary;
  c.equality_throughout = std::abs(c.I_f_u - c.bound1) <= c.tol && std::abs(c.bound1 - c.bound2) <= c.tol;
  c.pass = !c.asserted || (c.first_inequality && c.second_inequality);
  return c;
}

const char* to_string(TopologyVerdict v) {
  switch (v) {
    case TopologyVerdict::SphereOrTorus: return "SphereOrTorus";
    case TopologyVerdict::DiskOrCylinder: return "DiskOrCylinder";
    case TopologyVerdict::Inconsistent: return "Inconsistent";
    case TopologyVerdict::NotApplicable: return "NotApplicable";
  }
  return "?";
}

TopologyVerdict topology_verdict(const ChainReport& chain, bool strongly_stable) {
  if (!chain.hypotheses_hold || !chain.stationary || !strongly_stable)
    return TopologyVerdict::NotApplicable;
  if (chain.boundary_components == 0)
    return chain.chi == 0 || chain.chi == 2 ? TopologyVerdict::SphereOrTorus
                                            : TopologyVerdict::Inconsistent;
  return chain.chi == 0 || chain.chi == 1 ? TopologyVerdict::DiskOrCylinder
                                          : TopologyVerdict::Inconsistent;
}

const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::Pass: return "Pass";
    case BoundStatus::Fail: return "Fail";
    case BoundStatus::NotApplicable: return "NotApplicable";
  }
  return "?";
}

AreaBoundReport area_bound_check(const AmbientSpace&, const SurfaceMesh& mesh,
                                 const ExtrinsicData& data, double S0, bool stable,
                                 bool stationary) {
  if (S0 == 0.0) throw InputError("area bound needs S0 != 0 (the bounds degenerate at 0)");
  AreaBoundReport r;
  r.S0 = S0;
  r.chi = mesh.euler_characteristic();
  double hmin = std::numeric_limits<double>::infinity();
  for (const auto& s : data.interior) {
    r.area += s.f * s.da;
    hmin = std::min(hmin, s.S_f - S0 * s.f);
  }
  // Literal hypothesis S_f >= S0 f (density on the right-hand side).
  r.hypothesis = {"S_f >= S0 f", hmin, hmin >= -1e-6 * std::max(1.0, std::abs(S0))};
  const double tol = 1e-6 * std::max(1.0, r.area);
  if (S0 > 0.0) {
    r.theorem = "disk-upper";
    r.bound = 4.0 * M_PI / S0;
    r.slack = r.bound - r.area;
  } else {
    r.theorem = "negative-chi-lower";
    r.bound = 4.0 * M_PI * r.chi / S0;
    r.slack = r.area - r.bound;
  }
  if (!r.hypothesis.holds) {
    r.note = "hypothesis S_f >= S0 f fails at a sample point";
    return r;
  }
  if (!stable || !stationary) {
    r.note = "surface is not verified strongly stable and stationary";
    return r;
  }
  if (S0 > 0.0) {
    if (mesh.boundary_components == 0) {
      r.note = "closed surface; the disk bound concerns free boundary surfaces";
      return r;
    }
    const bool ok = r.chi == 1 && r.slack >= -tol;
    r.status = ok ? BoundStatus::Pass : BoundStatus::Fail;
    if (r.chi != 1) r.note = "stable surface under S0 > 0 is not a disk";
  } else {
    if (r.chi >= 0) {
      r.note = "chi >= 0: the lower bound is vacuous";
      return r;
    }
    r.status = r.slack >= -tol ? BoundStatus::Pass : BoundStatus::Fail;
  }
  return r;
}

RigidityFlags rigidity_flags(const AmbientSpace&, const SurfaceMesh&, const ExtrinsicData& data,
                             double tol) {
  RigidityFlags f;
  f.tol = tol;
  for (const auto& s : data.interior) {
    f.max_sigma = std::max(f.max_sigma, s.sigma_norm);
    f.max_grad_psi = std::max(f.max_grad_psi, std::sqrt(s.grad_sigma_psi2));
    f.max_ricci = std::max(f.max_ricci, std::abs(s.ric_f_nn));
    f.max_K = std::max(f.max_K, std::abs(s.K));
  }
  for (const auto& s : data.boundary) {
    f.max_II_NN = std::max(f.max_II_NN, std::abs(s.II_NN));
    f.max_h = std::max(f.max_h, std::abs(s.h));
  }
  f.totally_geodesic = f.max_sigma <= tol;
  f.density_const_on_surface = f.max_grad_psi <= tol;
  f.ricci_normal_zero = f.max_ricci <= tol;
  f.II_NN_zero = f.max_II_NN <= tol;
  f.boundary_geodesic = f.max_h <= tol;
  f.gauss_flat = f.max_K <= tol;
  return f;
}

FoliationReport foliation_monotonicity_check(const AmbientSpace& space,
                                             const DeformedFamily& family,
                                             const Quadrature& quad) {
  std::vector<double> svals = family.s_values;
  if (svals.empty()) svals = {0.0};
  const double h = 1e-3;
  auto mean_Hf = [&](double s) {
    const SurfaceMesh m = family.mesh_at(s);
    const ExtrinsicData d = extrinsic_geometry(space, m, quad);
    return stationarity_verdict(space, m, d).H_f_mean;
  };
  // Quadrature points of each slice are images of base points with the same parameters.
  const ExtrinsicData base = extrinsic_geometry(space, family.base, quad);
  FoliationReport rep;
  rep.pass = true;
  for (double s : svals) {
    FoliationSlice sl;
    sl.s = s;
    const SurfaceMesh m = family.mesh_at(s);
    const ExtrinsicData d = extrinsic_geometry(space, m, quad);
    const StationarityVerdict v = stationarity_verdict(space, m, d);
    if (!v.volume_constrained) {
      std::ostringstream os;
      os << "foliation slice s = " << s << " is not f-stationary (H_f spread " << v.H_f_spread
         << ")";
      throw PreconditionError(os.str());
    }
    sl.H_f = v.H_f_mean;
    sl.dH_f = (8.0 * (mean_Hf(s + h) - mean_Hf(s - h)) - (mean_Hf(s + 2 * h) - mean_Hf(s - 2 * h))) /
              (12.0 * h);
    auto velocity = [&](const Vec3& x0) {
      auto at = [&](double t) { return family.point_at(x0, t); };
      return Vec3((8.0 * (at(s + h) - at(s - h)) - (at(s + 2 * h) - at(s - 2 * h))) / (12.0 * h));
    };
    double rhs = 0.0;
    sl.min_ricci = std::numeric_limits<double>::infinity();
    sl.min_II = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.interior.size(); ++i) {
      const auto& q = d.interior[i];
      const double u = velocity(base.interior[i].x).dot(q.N);
      rhs += (q.ric_f_nn + q.sigma2) * u * q.f * q.da;
      sl.area += q.f * q.da;
      sl.min_ricci = std::min(sl.min_ricci, q.ric_f_nn);
    }
    for (std::size_t i = 0; i < d.boundary.size(); ++i) {
      const auto& q = d.boundary[i];
      const double u = velocity(base.boundary[i].x).dot(q.N);
      rhs += q.II_NN * u * q.f * q.dl;
      sl.min_II = std::min({sl.min_II, q.II_NN, q.II_TT});
    }
    if (d.boundary.empty()) sl.min_II = 0.0;
    sl.lhs = sl.dH_f * sl.area;
    sl.rhs = rhs;
    sl.rel_residual = std::abs(sl.lhs - sl.rhs) / std::max({1.0, std::abs(sl.lhs), std::abs(sl.rhs)});
    sl.monotonicity_asserted = sl.min_ricci >= -1e-9 && sl.min_II >= -1e-9;
    sl.monotone = !sl.monotonicity_asserted || sl.dH_f >= -1e-6;
    rep.max_rel_residual = std::max(rep.max_rel_residual, sl.rel_residual);
    if (sl.rel_residual > 1e-3 || !sl.monotone) rep.pass = false;
    rep.slices.push_back(sl);
  }
  return rep;
}

}  // namespace wstab
