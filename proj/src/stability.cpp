#include "wstab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "wstab/errors.hpp"
#include "wstab/parallel.hpp"

namespace wstab {

namespace {

struct Local {
  double K[3][3]{}, P[3][3]{}, M[3][3]{};
};

}  // namespace

IndexFormAssembly assemble(const AmbientSpace& space, const SurfaceMesh& mesh,
                           const Quadrature& quad) {
  return assemble(mesh, extrinsic_geometry(space, mesh, quad));
}

IndexFormAssembly assemble(const SurfaceMesh& mesh, const ExtrinsicData& data) {
  const int n = mesh.vertex_count();
  const int ppt = data.points_per_triangle;
  std::vector<Local> locals(mesh.triangles.size());
  parallel_for(mesh.triangles.size(), [&](std::size_t ti) {
    const Triangle& t = mesh.triangles[ti];
    Mat2 D;
    D.col(0) = t.uv[1] - t.uv[0];
    D.col(1) = t.uv[2] - t.uv[0];
    const Mat2 Dinv = D.inverse();
    Vec2 grad[3];
    grad[1] = Dinv.row(0).transpose();
    grad[2] = Dinv.row(1).transpose();
    grad[0] = -grad[1] - grad[2];
    Local& L = locals[ti];
    for (int q = 0; q < ppt; ++q) {
      const InteriorSample& s = data.interior[ti * ppt + q];
      const double w = s.f * s.da;
      const double pot = s.ric_f_nn + s.sigma2;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          L.K[i][j] += grad[i].dot(s.Ginv * grad[j]) * w;
          L.P[i][j] += pot * s.bary[i] * s.bary[j] * w;
          L.M[i][j] += s.bary[i] * s.bary[j] * w;
        }
    }
  });
  std::vector<Eigen::Triplet<double>> tk, tp, tm, tb;
  tk.reserve(9 * locals.size());
  tp.reserve(9 * locals.size());
  tm.reserve(9 * locals.size());
  for (std::size_t ti = 0; ti < locals.size(); ++ti) {
    const Triangle& t = mesh.triangles[ti];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        tk.emplace_back(t.v[i], t.v[j], locals[ti].K[i][j]);
        tp.emplace_back(t.v[i], t.v[j], locals[ti].P[i][j]);
        tm.emplace_back(t.v[i], t.v[j], locals[ti].M[i][j]);
      }
  }
  const int ppe = data.points_per_edge;
  for (std::size_t ei = 0; ei < mesh.boundary_edges.size(); ++ei) {
    const BoundaryEdge& e = mesh.boundary_edges[ei];
    double loc[2][2]{};
    for (int q = 0; q < ppe; ++q) {
      const BoundarySample& s = data.boundary[ei * ppe + q];
      const double phi[2] = {1.0 - s.t, s.t};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) loc[i][j] += s.II_NN * phi[i] * phi[j] * s.f * s.dl;
    }
    const int v[2] = {e.v0, e.v1};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) tb.emplace_back(v[i], v[j], loc[i][j]);
  }
  IndexFormAssembly a;
  a.dof = n;
  a.K.resize(n, n);
  a.P.resize(n, n);
  a.M.resize(n, n);
  a.B.resize(n, n);
  a.K.setFromTriplets(tk.begin(), tk.end());
  a.P.setFromTriplets(tp.begin(), tp.end());
  a.M.setFromTriplets(tm.begin(), tm.end());
  a.B.setFromTriplets(tb.begin(), tb.end());
  a.load = a.M * VecX::Ones(n);
  return a;
}

namespace {
void check_dim(const IndexFormAssembly& a, const VecX& v, const char* op) {
  if (v.size() != a.dof) {
    std::ostringstream os;
    os << op << ": vector has " << v.size() << " entries, assembly has " << a.dof << " DOF";
    throw InputError(os.str());
  }
}
}  // namespace

double index_form_value(const IndexFormAssembly& a, const VecX& v, const VecX& w) {
  check_dim(a, v, "index_form_value");
  check_dim(a, w, "index_form_value");
  return v.dot(a.K * w) - v.dot(a.P * w) - v.dot(a.B * w);
}

VecX jacobi_apply(const IndexFormAssembly& a, const VecX& u) {
  check_dim(a, u, "jacobi_apply");
  Eigen::SimplicialLDLT<SpMat> mass(a.M);
  if (mass.info() != Eigen::Success) throw NumericalError("mass matrix factorization failed");
  const VecX rhs = -(a.K * u - a.P * u - a.B * u);
  return mass.solve(rhs);
}

double jacobi_symmetry_residual(const IndexFormAssembly& a, const VecX& v, const VecX& w) {
  return std::abs(index_form_value(a, v, w) - index_form_value(a, w, v));
}

double assembly_symmetry_error(const IndexFormAssembly& a) {
  double e = 0.0;
  for (const SpMat* m : {&a.K, &a.P, &a.B, &a.M}) {
    const SpMat d = SpMat(m->transpose()) - *m;
    for (int k = 0; k < d.outerSize(); ++k)
      for (SpMat::InnerIterator it(d, k); it; ++it) e = std::max(e, std::abs(it.value()));
  }
  return e;
}

double SpectralResult::residual_max() const {
  double r = 0.0;
  for (double x : solver_residuals) r = std::max(r, x);
  return r;
}

SpectralResult robin_eigenproblem(const IndexFormAssembly& a, int count, const EigenOptions& opt) {
  if (count < 1 || count > a.dof) throw InputError("eigenpair count must lie in [1, DOF]");
  SpectralResult r = symmetric_pencil(a.form(), a.M, count, opt);
  return r;
}

double default_verdict_tol(const SpectralResult& spec) {
  double top = 0.0;
  for (double l : spec.eigenvalues) top = std::max(top, std::abs(l));
  return 1e-3 * std::max(1.0, top);
}

bool strong_stability_verdict(const SpectralResult& spec, double tol) {
  if (tol < 0.0) tol = default_verdict_tol(spec);
  return spec.lambda_min() >= -tol;
}

ConstrainedVerdict volume_constrained_verdict(const IndexFormAssembly& a,
                                              const SpectralResult& spec, double tol,
                                              const EigenOptions& opt) {
  ConstrainedVerdict v;
  v.tol = tol < 0.0 ? default_verdict_tol(spec) : tol;
  const int count = std::max(1, std::min<int>(3, a.dof - 1));
  v.spectrum = constrained_eigenproblem(a, count, opt);
  v.constrained_min = v.spectrum.lambda_min();
  v.unconstrained_min = spec.lambda_min();
  v.stable = v.constrained_min >= -v.tol;
  return v;
}

VecX interpolate(const SurfaceMesh& mesh, const std::function<double(const Vec3&)>& g) {
  VecX u(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i) u[i] = g(mesh.positions[i]);
  return u;
}

VecX normal_component(const SurfaceMesh& mesh, const VariationField& X) {
  const Immersion& imm = *mesh.immersion;
  std::vector<Vec3> nsum(mesh.vertex_count(), Vec3::Zero());
  const double eps = 1e-9;
  for (const auto& t : mesh.triangles) {
    const Patch& p = imm.patches[t.patch];
    for (int k = 0; k < 3; ++k) {
      // Corner pulled a hair inside the triangle, away from chart singular points.
      const Vec2 c = (t.uv[0] + t.uv[1] + t.uv[2]) / 3.0;
      const Vec2 uv = t.uv[k] + eps * (c - t.uv[k]);
      nsum[t.v[k]] += chart_geometry(patch_jet(p, uv), imm.orientation_sign).N;
    }
  }
  VecX u(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    const Vec3& x = mesh.positions[i];
    u[i] = values(X.at(V3<double>{{x[0], x[1], x[2]}})).dot(nsum[i].normalized());
  }
  return u;
}

JacobiFdCheck jacobi_fd_check(const AmbientSpace& space, const DeformedFamily& family,
                              const IndexFormAssembly& a) {
  const SurfaceMesh& mesh = family.base;
  const ExtrinsicData base = extrinsic_geometry(space, mesh);
  const StationarityVerdict sv = stationarity_verdict(space, mesh, base);
  if (!sv.volume_constrained) throw PreconditionError("Jacobi check needs an f-stationary base");

  const double h = 1e-3;
  const double steps[4] = {-2 * h, -h, h, 2 * h};
  std::vector<ImmersionPtr> imms;
  for (double s : steps) imms.push_back(family.immersion_at(s));
  const int sign = mesh.immersion->orientation_sign;

  const VecX Lu = jacobi_apply(a, normal_component(mesh, family.field));

  JacobiFdCheck c;
  c.dH.resize(base.interior.size());
  c.L.resize(base.interior.size());
  parallel_for(base.interior.size(), [&](std::size_t i) {
    const InteriorSample& s0 = base.interior[i];
    const Triangle& t = mesh.triangles[s0.tri];
    double hf[4];
    for (int k = 0; k < 4; ++k) {
      const ChartGeometry g = chart_geometry(patch_jet(imms[k]->patches[t.patch], s0.uv), sign);
      const double H = 0.5 * (g.Ginv * g.B).trace();
      hf[k] = 2.0 * H - space.density.grad_psi(g.x).dot(g.N);
    }
    c.dH[i] = (8.0 * (hf[2] - hf[1]) - (hf[3] - hf[0])) / (12.0 * h);
    c.L[i] = s0.bary[0] * Lu[t.v[0]] + s0.bary[1] * Lu[t.v[1]] + s0.bary[2] * Lu[t.v[2]];
  });
  double lmax = 0.0;
  for (std::size_t i = 0; i < c.L.size(); ++i) {
    c.max_abs_residual = std::max(c.max_abs_residual, std::abs(c.dH[i] - c.L[i]));
    lmax = std::max(lmax, std::abs(c.L[i]));
  }
  c.scale = std::max(1.0, lmax);
  c.max_relative_residual = c.max_abs_residual / c.scale;
  c.pass = c.max_relative_residual <= 1e-3;
  return c;
}

void write_eigenfunctions_csv(const SurfaceMesh& mesh, const SpectralResult& spec,
                              const std::string& path, int max_functions) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  const int k = std::min<int>(max_functions, spec.eigenfunctions.size());
  out << "vertex,x,y,z";
  for (int j = 0; j < k; ++j) out << ",phi" << j;
  out << '\n';
  char buf[40];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    const Vec3& p = mesh.positions[i];
    out << i << ',' << num(p[0]) << ',' << num(p[1]) << ',' << num(p[2]);
    for (int j = 0; j < k; ++j) out << ',' << num(spec.eigenfunctions[j][i]);
    out << '\n';
  }
}

}  // namespace wstab
