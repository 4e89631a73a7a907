// Immersed surfaces with boundary on dM: analytic charts, triangle meshes and
// pointwise extrinsic geometry.
//
// An immersion is a finite set of rectangular parameter patches, each with a
// chart written once as a generic callable and evaluated on doubles or on J2
// jets. Mesh triangles are straight in parameter space, so every quadrature
// point sits exactly on the immersed surface and all curvature comes from
// exact chart derivatives. Orientation: N = sign * (x_u x x_v)/|x_u x x_v|,
// sigma(X, Y) = <D_X Y, N>, H = tr(sigma)/n = -(1/n) div N, so the round
// sphere with outward N has H = -1/r.
#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wstab/ambient.hpp"
#include "wstab/jet.hpp"
#include "wstab/quadrature.hpp"

namespace wstab {

enum Side { SideULo = 0, SideUHi = 1, SideVLo = 2, SideVHi = 3 };

struct Patch {
  Vec2 lo{0.0, 0.0}, hi{1.0, 1.0};
  bool periodic_u = false, periodic_v = false;
  std::array<bool, 4> on_boundary{false, false, false, false};  // indexed by Side
  // Cells per unit resolution along u and v.
  double cells_u = 1.0, cells_v = 1.0;
  std::function<Vec3(double, double)> eval;
  std::function<V3<J2>(const J2&, const J2&)> jet;
};

// Wraps a generic chart [](auto u, auto v) -> V3<decltype(u)>.
template <class F>
Patch make_patch(F chart, Vec2 lo, Vec2 hi) {
  Patch p;
  p.lo = lo;
  p.hi = hi;
  p.eval = [chart](double u, double v) { return values(chart(u, v)); };
  p.jet = [chart](const J2& u, const J2& v) { return chart(u, v); };
  return p;
}

struct Immersion {
  std::string name;
  std::vector<Patch> patches;
  int orientation_sign = 1;
  // Characteristic length used for tolerances and welding.
  double scale = 1.0;
};

using ImmersionPtr = std::shared_ptr<const Immersion>;

struct Triangle {
  std::array<int, 3> v;        // counter-clockwise in parameter space
  int patch = 0;
  std::array<Vec2, 3> uv;      // corner parameters (unwrapped across periodic seams)
};

struct BoundaryEdge {
  int v0 = 0, v1 = 0;          // oriented as in the owning triangle
  int tri = 0;
  int corner0 = 0, corner1 = 0;
};

struct SurfaceMesh {
  ImmersionPtr immersion;
  std::vector<Vec3> positions;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  int edge_count = 0;
  int genus = 0;
  int boundary_components = 0;
  int resolution = 0;
  double min_angle_deg = 0.0;

  int vertex_count() const { return static_cast<int>(positions.size()); }
  int euler_characteristic() const {
    return vertex_count() - edge_count + static_cast<int>(triangles.size());
  }
};

// Records at interior quadrature points.
struct InteriorSample {
  int tri = 0, qp = 0;
  std::array<double, 3> bary{};
  Vec2 uv;
  double da = 0.0;             // quadrature weight times area element
  Vec3 x, N, xu, xv;
  Mat2 G, Ginv, B;             // metric, inverse, second fundamental form (parameter basis)
  double H = 0, H_f = 0, K = 0, sigma2 = 0;
  double psi = 0, f = 1, psi_N = 0, grad_sigma_psi2 = 0, lap_sigma_psi = 0;
  double ric_f_nn = 0, S_f = 0, sigma_norm = 0;
  Vec3 grad_psi;
};

// Records at boundary quadrature points.
struct BoundarySample {
  int edge = 0, qp = 0;
  double t = 0.0;              // position along the edge, 0 at v0
  double dl = 0.0;
  Vec3 x, T, nu, N, xi;        // nu: inner conormal of the boundary curve in the surface
  double h = 0;                // geodesic curvature <D_T T, nu>
  double II_NN = 0, II_TT = 0, trace_II = 0, H_f_boundary = 0, contact = 0;
  double psi = 0, f = 1;
  Vec3 grad_psi;
};

struct ExtrinsicData {
  Quadrature quad;
  std::vector<InteriorSample> interior;
  std::vector<BoundarySample> boundary;
  int points_per_triangle = 0;
  int points_per_edge = 0;
};

// Exact geometry of one chart point from its jet.
struct ChartGeometry {
  Vec3 x, xu, xv, xuu, xuv, xvv, N;
  Mat2 G, Ginv, B;
  double area_element = 0;
};
ChartGeometry chart_geometry(const V3<J2>& jet, int orientation_sign);
V3<J2> patch_jet(const Patch& p, const Vec2& uv);

// Operations.
SurfaceMesh mesh_from_immersion(const AmbientSpace& space, ImmersionPtr imm, int resolution);
ExtrinsicData extrinsic_geometry(const AmbientSpace& space, const SurfaceMesh& mesh,
                                 const Quadrature& quad = Quadrature{});
std::vector<double> contact_angle(const AmbientSpace& space, const SurfaceMesh& mesh,
                                  const ExtrinsicData& data);

struct StationarityVerdict {
  bool strong = false;
  bool volume_constrained = false;
  double H_f_mean = 0, H_f_spread = 0, max_contact = 0;
  double tol_H = 0, tol_angle = 1e-6;
};
StationarityVerdict stationarity_verdict(const AmbientSpace& space, const SurfaceMesh& mesh,
                                         const ExtrinsicData& data, double tol_H = -1.0,
                                         double tol_angle = 1e-6);
int euler_characteristic(const SurfaceMesh& mesh);

// Interior parameter points must land in int(M), boundary sides on {Phi = 0}.
void validate_immersion(const AmbientSpace& space, const Immersion& imm, int samples_per_side = 9);

// Gauss-Bonnet closure: integral of K plus integral of h, and 2 pi chi.
struct GaussBonnet {
  double total_curvature = 0, boundary_curvature = 0, two_pi_chi = 0, rel_error = 0;
};
GaussBonnet gauss_bonnet(const SurfaceMesh& mesh, const ExtrinsicData& data);

// Weighted integrals of sample fields.
double integrate(const ExtrinsicData& data, const std::function<double(const InteriorSample&)>& g);
double integrate_boundary(const ExtrinsicData& data,
                          const std::function<double(const BoundarySample&)>& g);

// File formats.
void write_off(const SurfaceMesh& mesh, const std::string& path);  // plus path + ".boundary"
SurfaceMesh read_off(const std::string& path, ImmersionPtr imm);  // topology only
void write_geometry_csv(const ExtrinsicData& data, const std::string& path);

// ------------------------------------------------------------ built-in charts

struct SphereOptions {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  // Perturbation x = c + r (1 + eps b(p)) p with b = p1 p3 + p2^2 on the unit sphere.
  double perturbation = 0.0;
};
// Closed sphere (cube-sphere patches).
Immersion sphere_immersion(const SphereOptions& opt = {});
// Upper hemisphere {p3 >= center3}, boundary on the equator.
Immersion hemisphere_immersion(const SphereOptions& opt = {});
// Cap of polar half-angle alpha around +e3 (alpha = pi/2 is the hemisphere).
Immersion cap_immersion(double alpha, const SphereOptions& opt = {});
// Flat disk {p3 = center3 + height, |p - c| <= radius} (conformal image of the hemisphere).
Immersion disk_immersion(Vec3 center, double radius, double height = 0.0);
// Slice {s0} x S^1(L) x [-w, w] of the product; ambient coordinates (s, y, t).
Immersion product_slice_immersion(double s0, double L, double half_width = 1.0);
// Slice {s0} x S^1(L1) x S^1(L2).
Immersion product_torus_immersion(double s0, double L1, double L2);

}  // namespace wstab
