// Ambient spaces with density f = exp(psi) and an implicit boundary {Phi = 0}.
//
// Points live in R^3. A two-dimensional ambient uses the first two
// coordinates; the third is ignored by every trace and tangent projection.
// Sign conventions: Ric_f = Ric - Hess psi, S_f = S - 2 Lap psi - |grad psi|^2,
// M = {Phi >= 0}, xi = grad Phi / |grad Phi| (inner normal),
// II(v, w) = -Hess Phi(v, w) / |grad Phi|.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wstab/jet.hpp"

namespace wstab {

struct Density {
  std::string name;
  std::function<double(const Vec3&)> psi;
  std::function<Vec3(const Vec3&)> grad_psi;
  std::function<Mat3(const Vec3&)> hess_psi;

  double f(const Vec3& p) const { return std::exp(psi(p)); }
};

struct BoundarySpec {
  std::string name;
  std::function<double(const Vec3&)> phi;
  std::function<Vec3(const Vec3&)> grad_phi;
  std::function<Mat3(const Vec3&)> hess_phi;
  // Width in Phi units of the collar on which deformed surfaces are pulled
  // back onto their level of Phi (see functionals.hpp).
  double collar = 0.25;
};

enum class MetricKind { FlatEuclidean, FlatProduct };

struct AmbientSpace {
  int dim = 3;
  MetricKind metric_kind = MetricKind::FlatEuclidean;
  // FlatProduct: coordinate 0 is the line factor; coordinates 1..L.size()
  // are circles of the listed circumferences; the rest are intervals.
  std::vector<double> circumferences;
  std::function<double(const Vec3&, const Vec3&)> ricci;
  std::function<double(const Vec3&)> scalar;
  Density density;
  std::optional<BoundarySpec> boundary;
  std::string name;

  bool contains(const Vec3& p, double tol = 1e-10) const;
  bool flat() const { return !custom_curvature; }
  bool custom_curvature = false;
};

// Builders. Flat spaces get zero Ricci and scalar curvature.
AmbientSpace euclidean_space(Density density, std::optional<BoundarySpec> boundary = std::nullopt,
                             int dim = 3);
AmbientSpace product_space(std::vector<double> circumferences, Density density,
                           std::optional<BoundarySpec> boundary = std::nullopt);
// Installs user curvature callbacks; they enter Ric_f, S_f and the Gauss
// equation only (lengths and areas stay Euclidean in the coordinates).
void set_curvature(AmbientSpace& space, std::function<double(const Vec3&, const Vec3&)> ricci,
                   std::function<double(const Vec3&)> scalar);

// Built-in densities.
Density constant_density(double value = 1.0);
Density gaussian_density(Vec3 weights = Vec3(1, 1, 1));  // psi = -sum w_i p_i^2
Density radial_log_density(double k);                    // psi = k log|p|
Density linear_density(const Vec3& a, double b);         // psi = <a,p> + b
Density radial_smooth_density(std::vector<double> g);    // psi = sum g_i |p|^i

// Built-in boundaries.
BoundarySpec half_space_boundary(Vec3 normal = Vec3(0, 0, 1), double offset = 0.0);
BoundarySpec slab_boundary(int axis = 2, double half_width = 1.0);
BoundarySpec ball_boundary(Vec3 center = Vec3::Zero(), double radius = 1.0);
BoundarySpec ball_complement_boundary(Vec3 center = Vec3::Zero(), double radius = 1.0);
BoundarySpec cone_boundary(double alpha, Vec3 axis = Vec3(0, 0, 1));
BoundarySpec cylinder_boundary(double radius = 1.0, int axis = 2);

// Operations.
double bakry_emery_ricci(const AmbientSpace& space, const Vec3& p, const Vec3& v);
double perelman_scalar(const AmbientSpace& space, const Vec3& p);
Vec3 boundary_inner_normal(const AmbientSpace& space, const Vec3& p);
double boundary_second_fundamental(const AmbientSpace& space, const Vec3& p, const Vec3& v,
                                   const Vec3& w);
double boundary_f_mean_curvature(const AmbientSpace& space, const Vec3& p);

// Trace of II over the tangent space of the boundary (= n H_{dM}).
double boundary_mean_curvature_trace(const AmbientSpace& space, const Vec3& p);
// Laplacian of psi restricted to the ambient dimension.
double laplacian_psi(const AmbientSpace& space, const Vec3& p);

struct ResidualReport {
  double grad_residual = 0.0;
  double hess_residual = 0.0;
  double max_residual = 0.0;
  double threshold = 1e-6;
  bool pass = true;
};
ResidualReport density_consistency_check(const AmbientSpace& space, const std::vector<Vec3>& samples);

struct CurvatureCheck {
  double max_residual = 0.0;
  bool pass = true;
};
// scalar(p) against the trace of ricci(p, .) over the coordinate basis.
CurvatureCheck curvature_consistency_check(const AmbientSpace& space,
                                           const std::vector<Vec3>& samples);

struct BoundaryCheck {
  double min_grad_norm = 0.0;
  bool inner_normal_ok = true;
};
// |grad Phi| > 0 and Phi(p + eps xi) > 0 at boundary samples; throws
// SingularBoundaryError on a degenerate gradient.
BoundaryCheck boundary_check(const AmbientSpace& space, const std::vector<Vec3>& samples,
                             double eps = 1e-4);

}  // namespace wstab
