// Checks of the pointwise identities, the stability/Gauss-Bonnet chain, the
// topology and area bounds, and the equality-case certificates.
#pragma once

#include <string>
#include <vector>

#include "wstab/stability.hpp"

namespace wstab {

struct Hypothesis {
  std::string name;
  double sampled_min = 0.0;
  bool holds = false;
};

struct IdentityResidual {
  double max_residual = 0.0;
  double scale = 0.0;   // max |lhs| over the samples
  bool pass = false;
};

// Ric_f(N,N) + |sigma|^2 = (S_f + H_f^2)/2 + (|sigma|^2 + |grad_S psi|^2)/2 - K + Lap_S psi.
IdentityResidual gauss_rearrangement_residual(const AmbientSpace& space, const SurfaceMesh& mesh,
                                              const ExtrinsicData& data, double tol = 1e-5);

struct BoundaryIdentity {
  double max_residual = 0.0;
  double max_contact = 0.0;
  bool applicable = false;  // orthogonal contact and non-empty boundary
  bool pass = false;
};
// II(N,N) = 2 H_dM - h along the boundary of an orthogonally meeting surface.
BoundaryIdentity boundary_identity_residual(const AmbientSpace& space, const SurfaceMesh& mesh,
                                            const ExtrinsicData& data, double tol = 1e-6);

struct ChainReport {
  double I_f_u = 0.0;        // I_f(1/sqrt f, 1/sqrt f) by quadrature with exact gradients
  double I_f_u_fem = 0.0;    // same on the P1 interpolant
  double bound1 = 0.0;       // 2 pi chi - (S_f + H_f^2)/2 - |sigma|^2/2 - |grad psi|^2/4 - (H_f)_dM
  double bound2 = 0.0;       // 2 pi chi
  double term_scalar = 0.0, term_sigma = 0.0, term_grad_psi = 0.0, term_boundary_mc = 0.0;
  int chi = 0, genus = 0, boundary_components = 0;
  std::vector<Hypothesis> hypotheses;  // S_f + H_f^2 >= 0, (H_f)_dM >= 0
  bool hypotheses_hold = false;
  bool stationary = false;
  bool asserted = false;
  bool first_inequality = false, second_inequality = false;
  bool equality_throughout = false;
  double tol = 0.0;
  bool pass = false;
};
ChainReport stability_topology_chain(const AmbientSpace& space, const SurfaceMesh& mesh,
                                     const ExtrinsicData& data, const IndexFormAssembly& a);

enum class TopologyVerdict { SphereOrTorus, DiskOrCylinder, Inconsistent, NotApplicable };
const char* to_string(TopologyVerdict v);
TopologyVerdict topology_verdict(const ChainReport& chain, bool strongly_stable);

enum class BoundStatus { Pass, Fail, NotApplicable };
const char* to_string(BoundStatus s);

struct AreaBoundReport {
  double S0 = 0.0;
  double area = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - area for S0 > 0, area - bound for S0 < 0
  int chi = 0;
  Hypothesis hypothesis;  // S_f >= S0 f
  std::string theorem;    // "disk-upper" or "negative-chi-lower"
  BoundStatus status = BoundStatus::NotApplicable;
  std::string note;
};
// Throws InputError for S0 = 0.
AreaBoundReport area_bound_check(const AmbientSpace& space, const SurfaceMesh& mesh,
                                 const ExtrinsicData& data, double S0, bool stable,
                                 bool stationary);

struct RigidityFlags {
  bool totally_geodesic = false, density_const_on_surface = false, ricci_normal_zero = false,
       II_NN_zero = false, boundary_geodesic = false, gauss_flat = false;
  double max_sigma = 0, max_grad_psi = 0, max_ricci = 0, max_II_NN = 0, max_h = 0, max_K = 0;
  double tol = 1e-6;
  bool all() const {
    return totally_geodesic && density_const_on_surface && ricci_normal_zero && II_NN_zero &&
           boundary_geodesic && gauss_flat;
  }
};
RigidityFlags rigidity_flags(const AmbientSpace& space, const SurfaceMesh& mesh,
                             const ExtrinsicData& data, double tol = 1e-6);

struct FoliationSlice {
  double s = 0, H_f = 0, dH_f = 0, area = 0, lhs = 0, rhs = 0, rel_residual = 0;
  double min_ricci = 0, min_II = 0;
  bool monotonicity_asserted = false, monotone = true;
};
struct FoliationReport {
  std::vector<FoliationSlice> slices;
  double max_rel_residual = 0.0;
  bool pass = false;
};
// H_f'(s) A_f(s) = int_bdry II(N,N) u dl_f + int (Ric_f(N,N) + |sigma|^2) u da_f per slice.
FoliationReport foliation_monotonicity_check(const AmbientSpace& space,
                                             const DeformedFamily& family,
                                             const Quadrature& quad = Quadrature{});

}  // namespace wstab
