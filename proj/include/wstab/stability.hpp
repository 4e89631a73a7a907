// P1 discretization of the index form and the f-Jacobi operator, the
// Robin-Jacobi eigenproblem and the stability verdicts.
//
// I_f(u, u) = int |grad u|^2 da_f - int (Ric_f(N,N) + |sigma|^2) u^2 da_f
//             - int_bdry II(N,N) u^2 dl_f
// The Robin condition du/dnu + II(N,N) u = 0 is the natural condition of this
// form and is never imposed strongly. The test space is all of H^1.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "wstab/functionals.hpp"
#include "wstab/surface.hpp"

namespace wstab {

using SpMat = Eigen::SparseMatrix<double>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

struct IndexFormAssembly {
  SpMat K, P, B, M;
  VecX load;  // M 1, the da_f-weighted load vector
  int dof = 0;
  SpMat form() const { return K - P - B; }
};

IndexFormAssembly assemble(const AmbientSpace& space, const SurfaceMesh& mesh,
                           const Quadrature& quad = fem_quadrature());
// Uses precomputed geometry at the FEM quadrature.
IndexFormAssembly assemble(const SurfaceMesh& mesh, const ExtrinsicData& data);

double index_form_value(const IndexFormAssembly& a, const VecX& v, const VecX& w);
// Discrete L_f u = -M^{-1} (K - P - B) u.
VecX jacobi_apply(const IndexFormAssembly& a, const VecX& u);
// |v^T A w - w^T A v| where A = K - P - B.
double jacobi_symmetry_residual(const IndexFormAssembly& a, const VecX& v, const VecX& w);
// Largest asymmetry of K, P, B, M.
double assembly_symmetry_error(const IndexFormAssembly& a);

struct SpectralResult {
  std::vector<double> eigenvalues;        // ascending
  std::vector<VecX> eigenfunctions;       // M-orthonormal
  std::vector<double> solver_residuals;   // ||A u - lambda M u|| / ||u||
  std::string solver;
  int dof = 0;
  double lambda_min() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
  double residual_max() const;
};

struct EigenOptions {
  int dense_limit = 400;
  int block_size = 4;
  int max_iterations = 400;
  double tolerance = 1e-10;
  unsigned seed = 12345;  // Krylov start block
};

// Smallest `count` eigenpairs of (K - P - B) u = lambda M u.
SpectralResult robin_eigenproblem(const IndexFormAssembly& a, int count,
                                  const EigenOptions& opt = {});
// Same pencil restricted to {u : load^T u = 0}.
SpectralResult constrained_eigenproblem(const IndexFormAssembly& a, int count,
                                        const EigenOptions& opt = {});
// Generic symmetric pencil solve (dense or shift-invert block Krylov).
SpectralResult symmetric_pencil(const SpMat& A, const SpMat& M, int count,
                                const EigenOptions& opt = {});

// 1e-3 max(1, |largest computed eigenvalue|).
double default_verdict_tol(const SpectralResult& spec);
bool strong_stability_verdict(const SpectralResult& spec, double tol = -1.0);

struct ConstrainedVerdict {
  bool stable = false;
  double constrained_min = 0.0;
  double unconstrained_min = 0.0;
  double tol = 0.0;
  SpectralResult spectrum;
};
ConstrainedVerdict volume_constrained_verdict(const IndexFormAssembly& a,
                                              const SpectralResult& spec, double tol = -1.0,
                                              const EigenOptions& opt = {});

// Nodal interpolant of a function on the mesh vertices.
VecX interpolate(const SurfaceMesh& mesh, const std::function<double(const Vec3&)>& g);
// Nodal values of u = <X, N> with N averaged over incident corners.
VecX normal_component(const SurfaceMesh& mesh, const VariationField& X);

struct JacobiFdCheck {
  double max_relative_residual = 0.0;
  double max_abs_residual = 0.0;
  double scale = 0.0;
  bool pass = false;
  std::vector<double> dH, L;  // per interior quadrature point
};
// d/ds H_f(s) at each quadrature point against the pointwise f-Jacobi
// operator applied to u = <X, N> (interpolated from the mass-inverted weak form).
JacobiFdCheck jacobi_fd_check(const AmbientSpace& space, const DeformedFamily& family,
                              const IndexFormAssembly& a);

// Per-vertex CSV of the first eigenfunctions.
void write_eigenfunctions_csv(const SurfaceMesh& mesh, const SpectralResult& spec,
                              const std::string& path, int max_functions = 6);

}  // namespace wstab
