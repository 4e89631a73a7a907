#include "wstab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "wstab/errors.hpp"
#include "wstab/parallel.hpp"

namespace wstab {

V3<J2> patch_jet(const Patch& p, const Vec2& uv) {
  return p.jet(J2::variable(uv[0], 0), J2::variable(uv[1], 1));
}

ChartGeometry chart_geometry(const V3<J2>& jet, int orientation_sign) {
  ChartGeometry g;
  g.x = values(jet);
  g.xu = partial(jet, 0);
  g.xv = partial(jet, 1);
  g.xuu = second(jet, 0);
  g.xuv = second(jet, 1);
  g.xvv = second(jet, 2);
  const Vec3 c = g.xu.cross(g.xv);
  g.area_element = c.norm();
  if (!(g.area_element > 1e-14 * std::max(1.0, g.xu.norm() * g.xv.norm())))
    throw ImmersionError("rank-deficient chart Jacobian");
  g.N = (orientation_sign >= 0 ? 1.0 : -1.0) * c / g.area_element;
  g.G << g.xu.dot(g.xu), g.xu.dot(g.xv), g.xu.dot(g.xv), g.xv.dot(g.xv);
  g.Ginv = g.G.inverse();
  g.B << g.xuu.dot(g.N), g.xuv.dot(g.N), g.xuv.dot(g.N), g.xvv.dot(g.N);
  return g;
}

namespace {

InteriorSample interior_sample(const AmbientSpace& space, const Immersion& imm, const Triangle& t,
                               const TrianglePoint& q) {
  InteriorSample s;
  s.bary = {1.0 - q.l1 - q.l2, q.l1, q.l2};
  s.uv = s.bary[0] * t.uv[0] + s.bary[1] * t.uv[1] + s.bary[2] * t.uv[2];
  const Patch& patch = imm.patches[t.patch];
  const ChartGeometry g = chart_geometry(patch_jet(patch, s.uv), imm.orientation_sign);
  const Vec2 e1 = t.uv[1] - t.uv[0], e2 = t.uv[2] - t.uv[0];
  const double param_area = 0.5 * std::abs(e1[0] * e2[1] - e1[1] * e2[0]);
  s.da = q.weight * param_area * g.area_element;
  s.x = g.x;
  s.N = g.N;
  s.xu = g.xu;
  s.xv = g.xv;
  s.G = g.G;
  s.Ginv = g.Ginv;
  s.B = g.B;

  const Mat2 W = g.Ginv * g.B;
  s.H = 0.5 * W.trace();
  s.sigma2 = (W * W).trace();
  s.sigma_norm = std::sqrt(std::max(0.0, s.sigma2));
  s.K = W.determinant();

  const Density& d = space.density;
  s.psi = d.psi(s.x);
  s.f = std::exp(s.psi);
  s.grad_psi = d.grad_psi(s.x);
  const Mat3 Hpsi = d.hess_psi(s.x);
  s.psi_N = s.grad_psi.dot(s.N);
  s.grad_sigma_psi2 = std::max(0.0, s.grad_psi.squaredNorm() - s.psi_N * s.psi_N);
  s.H_f = 2.0 * s.H - s.psi_N;
  const double ric_nn = space.ricci(s.x, s.N);
  s.ric_f_nn = ric_nn - s.N.dot(Hpsi * s.N);
  const double scal = space.scalar(s.x);
  s.S_f = scal - 2.0 * Hpsi.trace() - s.grad_psi.squaredNorm();
  // Gauss equation in a 3-manifold: sectional curvature of T Sigma is S/2 - Ric(N,N).
  if (space.custom_curvature) s.K += 0.5 * scal - ric_nn;

  // Intrinsic Laplacian of psi o x in the chart.
  const Vec3 xa[2] = {g.xu, g.xv};
  const Vec3 xab[2][2] = {{g.xuu, g.xuv}, {g.xuv, g.xvv}};
  double dpsi[2];
  for (int a = 0; a < 2; ++a) dpsi[a] = s.grad_psi.dot(xa[a]);
  double lap = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const double d2 = xa[a].dot(Hpsi * xa[b]) + s.grad_psi.dot(xab[a][b]);
      double gamma_term = 0.0;
      for (int c = 0; c < 2; ++c) {
        double gamma = 0.0;
        for (int e = 0; e < 2; ++e) gamma += g.Ginv(c, e) * xab[a][b].dot(xa[e]);
        gamma_term += gamma * dpsi[c];
      }
      lap += g.Ginv(a, b) * (d2 - gamma_term);
    }
  s.lap_sigma_psi = lap;
  return s;
}

BoundarySample boundary_sample(const AmbientSpace& space, const Immersion& imm,
                               const SurfaceMesh& mesh, const BoundaryEdge& e, const EdgePoint& q) {
  const Triangle& t = mesh.triangles[e.tri];
  const Patch& patch = imm.patches[t.patch];
  const int c2 = 3 - e.corner0 - e.corner1;
  const Vec2 a = t.uv[e.corner0], b = t.uv[e.corner1];
  const Vec2 dir = b - a;
  const Vec2 uv = a + q.t * dir;
  const ChartGeometry g = chart_geometry(patch_jet(patch, uv), imm.orientation_sign);

  BoundarySample s;
  s.t = q.t;
  s.x = g.x;
  s.N = g.N;
  const Vec3 c1 = g.xu * dir[0] + g.xv * dir[1];
  const Vec3 c2v = g.xuu * dir[0] * dir[0] + 2.0 * g.xuv * dir[0] * dir[1] + g.xvv * dir[1] * dir[1];
  const double speed = c1.norm();
  s.dl = q.weight * speed;
  s.T = c1 / speed;
  Vec3 nu = g.N.cross(s.T);
  const Vec2 w = t.uv[c2] - uv;
  if (nu.dot(g.xu * w[0] + g.xv * w[1]) < 0.0) nu = -nu;
  s.nu = nu;
  s.h = c2v.dot(nu) / (speed * speed);

  if (!space.boundary) throw MeshingError("surface has boundary edges but M has no boundary");
  const BoundarySpec& bd = *space.boundary;
  const Vec3 gphi = bd.grad_phi(s.x);
  const double gn = gphi.norm();
  if (gn < 1e-12) throw SingularBoundaryError("|grad Phi| < 1e-12 at a boundary point");
  s.xi = gphi / gn;
  const Mat3 Hphi = bd.hess_phi(s.x);
  s.II_NN = -s.N.dot(Hphi * s.N) / gn;
  s.II_TT = -s.T.dot(Hphi * s.T) / gn;
  s.trace_II = boundary_mean_curvature_trace(space, s.x);
  s.psi = space.density.psi(s.x);
  s.f = std::exp(s.psi);
  s.grad_psi = space.density.grad_psi(s.x);
  s.H_f_boundary = s.trace_II - s.grad_psi.dot(s.xi);
  s.contact = s.N.dot(s.xi);
  return s;
}

}  // namespace

ExtrinsicData extrinsic_geometry(const AmbientSpace& space, const SurfaceMesh& mesh,
                                 const Quadrature& quad) {
  if (!mesh.immersion) throw InputError("extrinsic_geometry: mesh has no reference immersion");
  const Immersion& imm = *mesh.immersion;
  ExtrinsicData data;
  data.quad = quad;
  const auto& tp = triangle_points(quad.rule);
  const auto& ep = edge_points(quad.boundary_rule);
  data.points_per_triangle = static_cast<int>(tp.size());
  data.points_per_edge = static_cast<int>(ep.size());
  data.interior.resize(mesh.triangles.size() * tp.size());
  parallel_for(mesh.triangles.size(), [&](std::size_t ti) {
    for (std::size_t q = 0; q < tp.size(); ++q) {
      InteriorSample s = interior_sample(space, imm, mesh.triangles[ti], tp[q]);
      s.tri = static_cast<int>(ti);
      s.qp = static_cast<int>(q);
      data.interior[ti * tp.size() + q] = s;
    }
  });
  data.boundary.resize(mesh.boundary_edges.size() * ep.size());
  parallel_for(mesh.boundary_edges.size(), [&](std::size_t ei) {
    for (std::size_t q = 0; q < ep.size(); ++q) {
      BoundarySample s = boundary_sample(space, imm, mesh, mesh.boundary_edges[ei], ep[q]);
      s.edge = static_cast<int>(ei);
      s.qp = static_cast<int>(q);
      data.boundary[ei * ep.size() + q] = s;
    }
  });
  return data;
}

double integrate(const ExtrinsicData& data, const std::function<double(const InteriorSample&)>& g) {
  double sum = 0.0;
  for (const auto& s : data.interior) sum += g(s) * s.da;
  return sum;
}

double integrate_boundary(const ExtrinsicData& data,
                          const std::function<double(const BoundarySample&)>& g) {
  double sum = 0.0;
  for (const auto& s : data.boundary) sum += g(s) * s.dl;
  return sum;
}

std::vector<double> contact_angle(const AmbientSpace&, const SurfaceMesh& mesh,
                                  const ExtrinsicData& data) {
  if (mesh.boundary_edges.empty()) throw InputError("contact_angle: surface has no boundary");
  std::vector<double> out;
  out.reserve(data.boundary.size());
  for (const auto& s : data.boundary) out.push_back(s.contact);
  return out;
}

StationarityVerdict stationarity_verdict(const AmbientSpace&, const SurfaceMesh&,
                                         const ExtrinsicData& data, double tol_H,
                                         double tol_angle) {
  StationarityVerdict v;
  double wsum = 0.0, hsum = 0.0;
  double hmin = std::numeric_limits<double>::infinity(), hmax = -hmin;
  for (const auto& s : data.interior) {
    wsum += s.f * s.da;
    hsum += s.H_f * s.f * s.da;
    hmin = std::min(hmin, s.H_f);
    hmax = std::max(hmax, s.H_f);
  }
  v.H_f_mean = hsum / wsum;
  v.H_f_spread = hmax - hmin;
  for (const auto& s : data.boundary) v.max_contact = std::max(v.max_contact, std::abs(s.contact));
  v.tol_H = tol_H > 0.0 ? tol_H : 1e-6 * (1.0 + std::abs(v.H_f_mean));
  v.tol_angle = tol_angle;
  v.volume_constrained = v.H_f_spread <= v.tol_H && v.max_contact <= v.tol_angle;
  v.strong = v.volume_constrained && std::abs(v.H_f_mean) <= v.tol_H;
  return v;
}

int euler_characteristic(const SurfaceMesh& mesh) { return mesh.euler_characteristic(); }

void validate_immersion(const AmbientSpace& space, const Immersion& imm, int n) {
  if (!space.boundary) return;
  const BoundarySpec& b = *space.boundary;
  for (std::size_t pi = 0; pi < imm.patches.size(); ++pi) {
    const Patch& p = imm.patches[pi];
    auto at = [&](double su, double sv) {
      return p.eval(p.lo[0] + su * (p.hi[0] - p.lo[0]), p.lo[1] + sv * (p.hi[1] - p.lo[1]));
    };
    for (int i = 1; i < n; ++i)
      for (int j = 1; j < n; ++j) {
        const Vec3 x = at(double(i) / n, double(j) / n);
        if (!(b.phi(x) > 0.0)) {
          std::ostringstream os;
          os << "immersion '" << imm.name << "': interior point (" << x.transpose()
             << ") is not in int(M)";
          throw ImmersionError(os.str());
        }
      }
    for (int side = 0; side < 4; ++side) {
      if (!p.on_boundary[side]) continue;
      for (int i = 0; i <= n; ++i) {
        const double s = double(i) / n;
        const Vec3 x = side == SideULo ? at(0, s) : side == SideUHi ? at(1, s)
                     : side == SideVLo ? at(s, 0) : at(s, 1);
        if (std::abs(b.phi(x)) > 1e-8) {
          std::ostringstream os;
          os << "immersion '" << imm.name << "': boundary arc misses {Phi = 0} by "
             << std::abs(b.phi(x));
          throw ImmersionError(os.str());
        }
      }
    }
  }
}

GaussBonnet gauss_bonnet(const SurfaceMesh& mesh, const ExtrinsicData& data) {
  GaussBonnet gb;
  gb.total_curvature = integrate(data, [](const InteriorSample& s) { return s.K; });
  gb.boundary_curvature = integrate_boundary(data, [](const BoundarySample& s) { return s.h; });
  gb.two_pi_chi = 2.0 * M_PI * mesh.euler_characteristic();
  gb.rel_error = std::abs(gb.total_curvature + gb.boundary_curvature - gb.two_pi_chi) /
                 std::max(2.0 * M_PI, std::abs(gb.two_pi_chi));
  return gb;
}

// ------------------------------------------------------------ built-in charts

namespace {

struct Face {
  Vec3 n, a, b;
};

const Face kFaces[6] = {
    {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},   {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
    {{0, 1, 0}, {-1, 0, 0}, {0, 0, 1}},  {{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}},
    {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},  {{0, 0, -1}, {0, 1, 0}, {1, 0, 0}}};

// Equiangular cube-sphere point on the unit sphere.
template <class T>
V3<T> cube_sphere(const Face& F, const T& u, const T& v) {
  using std::tan;
  const T tu = tan(0.25 * M_PI * u), tv = tan(0.25 * M_PI * v);
  V3<T> q;
  for (int i = 0; i < 3; ++i) q[i] = F.n[i] + tu * F.a[i] + tv * F.b[i];
  const T r = norm(q);
  return (T(1.0) / r) * q;
}

// Polar-angle rescaling beta -> c beta around +e3.
template <class T>
V3<T> rescale_polar(const V3<T>& p, double c) {
  using std::atan2;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T rho = sqrt(p[0] * p[0] + p[1] * p[1]);
  if (value(rho) < 1e-300) return {{T(0.0), T(0.0), T(1.0)}};
  const T beta = atan2(rho, p[2]);
  const T s = sin(c * beta) / rho;
  return {{s * p[0], s * p[1], cos(c * beta)}};
}

template <class T>
V3<T> place(const V3<T>& p, const SphereOptions& o) {
  T scale = T(o.radius);
  if (o.perturbation != 0.0) scale = o.radius * (1.0 + o.perturbation * (p[0] * p[2] + p[1] * p[1]));
  V3<T> x;
  for (int i = 0; i < 3; ++i) x[i] = scale * p[i] + o.center[i];
  return x;
}

std::vector<Patch> cube_patches(bool full, const std::function<Patch(const Face&, Vec2, Vec2)>& mk) {
  std::vector<Patch> out;
  Patch top = mk(kFaces[0], Vec2(-1, -1), Vec2(1, 1));
  out.push_back(top);
  for (int f = 1; f <= 4; ++f) {
    Patch side = mk(kFaces[f], Vec2(-1, full ? -1.0 : 0.0), Vec2(1, 1));
    if (!full) {
      side.cells_v = 0.5;
      side.on_boundary[SideVLo] = true;
    }
    out.push_back(side);
  }
  if (full) out.push_back(mk(kFaces[5], Vec2(-1, -1), Vec2(1, 1)));
  return out;
}

}  // namespace

Immersion sphere_immersion(const SphereOptions& opt) {
  Immersion imm;
  imm.name = "sphere";
  imm.scale = opt.radius;
  imm.patches = cube_patches(true, [opt](const Face& F, Vec2 lo, Vec2 hi) {
    return make_patch([F, opt](auto u, auto v) { return place(cube_sphere(F, u, v), opt); }, lo, hi);
  });
  return imm;
}

Immersion hemisphere_immersion(const SphereOptions& opt) {
  Immersion imm;
  imm.name = "hemisphere";
  imm.scale = opt.radius;
  imm.patches = cube_patches(false, [opt](const Face& F, Vec2 lo, Vec2 hi) {
    return make_patch([F, opt](auto u, auto v) { return place(cube_sphere(F, u, v), opt); }, lo, hi);
  });
  return imm;
}

Immersion cap_immersion(double alpha, const SphereOptions& opt) {
  if (!(alpha > 0.0 && alpha < M_PI)) throw InputError("cap half-angle must lie in (0, pi)");
  if (alpha == 0.5 * M_PI) {
    Immersion imm = hemisphere_immersion(opt);
    imm.name = "cap";
    return imm;
  }
  const double c = 2.0 * alpha / M_PI;
  Immersion imm;
  imm.name = "cap";
  imm.scale = opt.radius;
  imm.patches = cube_patches(false, [opt, c](const Face& F, Vec2 lo, Vec2 hi) {
    return make_patch(
        [F, opt, c](auto u, auto v) { return place(rescale_polar(cube_sphere(F, u, v), c), opt); },
        lo, hi);
  });
  return imm;
}

Immersion disk_immersion(Vec3 center, double radius, double height) {
  Immersion imm;
  imm.name = "disk";
  imm.scale = radius;
  imm.patches = cube_patches(false, [center, radius, height](const Face& F, Vec2 lo, Vec2 hi) {
    return make_patch(
        [F, center, radius, height](auto u, auto v) {
          using T = decltype(u);
          const V3<T> p = cube_sphere(F, u, v);
          const T s = radius / (1.0 + p[2]);
          return V3<T>{{center[0] + s * p[0], center[1] + s * p[1], T(center[2] + height)}};
        },
        lo, hi);
  });
  return imm;
}

Immersion product_slice_immersion(double s0, double L, double w) {
  Immersion imm;
  imm.name = "product-slice";
  imm.scale = std::max(L, 2.0 * w);
  Patch p = make_patch(
      [s0](auto u, auto v) {
        using T = decltype(u);
        return V3<T>{{T(s0), u, v}};
      },
      Vec2(0.0, -w), Vec2(L, w));
  p.periodic_u = true;
  p.on_boundary[SideVLo] = p.on_boundary[SideVHi] = true;
  p.cells_u = L / (2.0 * w);
  p.cells_v = 1.0;
  imm.patches.push_back(p);
  return imm;
}

Immersion product_torus_immersion(double s0, double L1, double L2) {
  Immersion imm;
  imm.name = "product-torus";
  imm.scale = std::max(L1, L2);
  Patch p = make_patch(
      [s0](auto u, auto v) {
        using T = decltype(u);
        return V3<T>{{T(s0), u, v}};
      },
      Vec2(0.0, 0.0), Vec2(L1, L2));
  p.periodic_u = p.periodic_v = true;
  p.cells_u = L1 / L2;
  p.cells_v = 1.0;
  imm.patches.push_back(p);
  return imm;
}

}  // namespace wstab
