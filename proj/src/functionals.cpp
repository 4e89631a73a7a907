#include "wstab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <type_traits>

#include "wstab/errors.hpp"
#include "wstab/parallel.hpp"

namespace wstab {

// ------------------------------------------------------------ fields

VariationField zero_field() {
  return make_field("zero", [](const auto& p) {
    using T = std::decay_t<decltype(p[0])>;
    return V3<T>{{T(0.0), T(0.0), T(0.0)}};
  });
}

VariationField translation_field(const Vec3& v) {
  VariationField f = make_field("translation", [v](const auto& p) {
    using T = std::decay_t<decltype(p[0])>;
    return constant_v3<T>(v);
  });
  f.flow = [v](const Vec3& p, double s) { return Vec3(p + s * v); };
  f.flow_jet = [v](const V3<J2>& p, double s) { return p + s * constant_v3<J2>(v); };
  return f;
}

VariationField radial_field(const Vec3& c, double a0, const Vec3& a) {
  return make_field("radial", [c, a0, a](const auto& p) {
    using T = std::decay_t<decltype(p[0])>;
    const V3<T> d = p - constant_v3<T>(c);
    const T phi = a0 + dot(constant_v3<T>(a), d);
    return (phi / norm(d)) * d;
  });
}

VariationField inflation_field(const Vec3& c) {
  return make_field("inflation", [c](const auto& p) { return p - constant_v3<std::decay_t<decltype(p[0])>>(c); });
}

namespace {
template <class T>
V3<T> rotate(const V3<T>& p, const Vec3& axis, const Vec3& c, double s) {
  const double w = axis.norm();
  if (w == 0.0) return p;
  const Vec3 k = axis / w;
  const double th = s * w, cs = std::cos(th), sn = std::sin(th);
  const V3<T> d = p - constant_v3<T>(c);
  const V3<T> kv = constant_v3<T>(k);
  const V3<T> r = cs * d + sn * cross(kv, d) + ((1.0 - cs) * dot(kv, d)) * kv;
  return r + constant_v3<T>(c);
}
}  // namespace

VariationField rotation_field(const Vec3& axis, const Vec3& c) {
  VariationField f = make_field("rotation", [axis, c](const auto& p) {
    using T = std::decay_t<decltype(p[0])>;
    return cross(constant_v3<T>(axis), p - constant_v3<T>(c));
  });
  f.flow = [axis, c](const Vec3& p, double s) {
    return values(rotate(V3<double>{{p[0], p[1], p[2]}}, axis, c, s));
  };
  f.flow_jet = [axis, c](const V3<J2>& p, double s) { return rotate(p, axis, c, s); };
  return f;
}

VariationField normal_constant_field(const Vec3& n, double a0, const Vec3& a) {
  return make_field("normal-constant", [n, a0, a](const auto& p) {
    using T = std::decay_t<decltype(p[0])>;
    const T phi = a0 + dot(constant_v3<T>(a), p);
    return phi * constant_v3<T>(n);
  });
}

VariationField sphere_tangential_field(const Vec3& a, const Vec3& c) {
  return make_field("sphere-tangential", [a, c](const auto& p) {
    using T = std::decay_t<decltype(p[0])>;
    const V3<T> d = p - constant_v3<T>(c);
    const T r = norm(d);
    const V3<T> av = constant_v3<T>(a);
    return r * av - (dot(av, d) / r) * d;
  });
}

VariationField gradient_field(const Vec3& a, const Mat3& Q) {
  return make_field("gradient", [a, Q](const auto& p) {
    using T = std::decay_t<decltype(p[0])>;
    V3<T> r = constant_v3<T>(a);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r[i] = r[i] + Q(i, j) * p[j];
    return r;
  });
}

VariationField with_cutoff(VariationField f, const BumpCutoff& c) {
  f.cutoff = c;
  f.name += "+cutoff";
  return f;
}

VariationField sum_field(const VariationField& a, const VariationField& b) {
  VariationField f;
  f.name = a.name + "+" + b.name;
  f.X = [a, b](const Vec3& p) {
    const V3<double> q{{p[0], p[1], p[2]}};
    return values(a.at(q) + b.at(q));
  };
  f.X_jet = [a, b](const V3<J2>& p) { return a.at(p) + b.at(p); };
  return f;
}

// ------------------------------------------------------------ deformation

namespace {

template <class T>
T phi_of(const BoundarySpec& b, const V3<T>& y) {
  const Vec3 y0 = values(y);
  if constexpr (std::is_same_v<T, J2>) {
    return lift(y, b.phi(y0), b.grad_phi(y0), b.hess_phi(y0));
  } else {
    return b.phi(y0);
  }
}

// Jet of grad Phi along y; its second derivatives use central differences of
// hess_phi for the third derivatives of Phi.
template <class T>
V3<T> grad_phi_of(const BoundarySpec& b, const V3<T>& y) {
  const Vec3 y0 = values(y);
  const Vec3 g = b.grad_phi(y0);
  if constexpr (std::is_same_v<T, J2>) {
    const Mat3 H = b.hess_phi(y0);
    const double step = 1e-4 * (1.0 + y0.norm());
    Mat3 dH[3];
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Zero();
      e[k] = step;
      dH[k] = (b.hess_phi(y0 + e) - b.hess_phi(y0 - e)) / (2.0 * step);
    }
    const Vec3 ya[2] = {partial(y, 0), partial(y, 1)};
    const Vec3 yab[3] = {second(y, 0), second(y, 1), second(y, 2)};
    const int pa[3] = {0, 0, 1}, pb[3] = {0, 1, 1};
    V3<J2> r;
    for (int i = 0; i < 3; ++i) {
      r[i].v = g[i];
      for (int a = 0; a < 2; ++a) r[i].d[a] = H.row(i).dot(ya[a]);
      for (int m = 0; m < 3; ++m) {
        double t = H.row(i).dot(yab[m]);
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) t += dH[k](i, j) * ya[pa[m]][j] * ya[pb[m]][k];
        r[i].h[m] = t;
      }
    }
    return r;
  } else {
    return {{g[0], g[1], g[2]}};
  }
}

template <class T>
T collar_weight(double collar, const T& phi) {
  const T t = phi / collar;
  if (value(t) <= 0.0) return T(1.0);
  if (value(t) >= 1.0) return T(0.0);
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

template <class T>
V3<T> deform(const AmbientSpace& space, const VariationField& F, const V3<T>& x, double s) {
  if (s == 0.0) return x;
  V3<T> y = F.flowed(x, s);
  if (!space.boundary) return y;
  const BoundarySpec& b = *space.boundary;
  const T phix = phi_of(b, x);
  if (value(phix) >= b.collar) return y;
  const T w = collar_weight(b.collar, phix);
  const T target = phix + s * dot(grad_phi_of(b, x), F.at(x));
  for (int it = 0; it < 3; ++it) {
    const V3<T> g = grad_phi_of(b, y);
    const T r = phi_of(b, y) - target;
    y = y - ((w * r) / dot(g, g)) * g;
  }
  return y;
}

}  // namespace

Vec3 DeformedFamily::point_at(const Vec3& x, double s) const {
  return values(deform(*space, field, V3<double>{{x[0], x[1], x[2]}}, s));
}

ImmersionPtr DeformedFamily::immersion_at(double s) const {
  if (s == 0.0) return base.immersion;
  auto imm = std::make_shared<Immersion>(*base.immersion);
  const AmbientSpace* sp = space;
  const VariationField F = field;
  for (std::size_t i = 0; i < imm->patches.size(); ++i) {
    const Patch orig = base.immersion->patches[i];
    Patch& p = imm->patches[i];
    p.eval = [orig, sp, F, s](double u, double v) {
      const Vec3 x = orig.eval(u, v);
      return values(deform(*sp, F, V3<double>{{x[0], x[1], x[2]}}, s));
    };
    p.jet = [orig, sp, F, s](const J2& u, const J2& v) { return deform(*sp, F, orig.jet(u, v), s); };
  }
  return imm;
}

SurfaceMesh DeformedFamily::mesh_at(double s) const {
  if (s == 0.0) return base;
  SurfaceMesh m = base;
  m.immersion = immersion_at(s);
  for (auto& p : m.positions) p = point_at(p, s);
  return m;
}

DeformedFamily make_family(const AmbientSpace& space, const SurfaceMesh& base,
                           const VariationField& field, std::vector<double> s_values) {
  DeformedFamily f;
  f.space = &space;
  f.base = base;
  f.field = field;
  f.s_values = std::move(s_values);
  return f;
}

double admissibility_residual(const AmbientSpace&, const ExtrinsicData& data,
                              const VariationField& X) {
  double r = 0.0;
  for (const auto& s : data.boundary) {
    const Vec3 x = values(X.at(V3<double>{{s.x[0], s.x[1], s.x[2]}}));
    r = std::max(r, std::abs(x.dot(s.xi)));
  }
  return r;
}

void require_admissible(const AmbientSpace& space, const ExtrinsicData& data,
                        const VariationField& X) {
  const double r = admissibility_residual(space, data, X);
  if (r > 1e-8) {
    std::ostringstream os;
    os << "field '" << X.name << "' is not tangent to dM along the boundary (|<X, xi>| = " << r
       << ")";
    throw InputError(os.str());
  }
}

// ------------------------------------------------------------ functionals

namespace {

double fold(const std::vector<double>& parts) {
  double s = 0.0;
  for (double p : parts) s += p;
  return s;
}

double param_area(const Triangle& t) {
  const Vec2 e1 = t.uv[1] - t.uv[0], e2 = t.uv[2] - t.uv[0];
  return 0.5 * std::abs(e1[0] * e2[1] - e1[1] * e2[0]);
}

Vec2 qp_uv(const Triangle& t, const TrianglePoint& q) {
  return (1.0 - q.l1 - q.l2) * t.uv[0] + q.l1 * t.uv[1] + q.l2 * t.uv[2];
}

// Gauss-Legendre nodes and weights on [0, 1].
const std::vector<std::pair<double, double>>& gauss_legendre8() {
  static const std::vector<std::pair<double, double>> rule = [] {
    const int n = 8;
    std::vector<std::pair<double, double>> r;
    for (int i = 1; i <= n; ++i) {
      double x = std::cos(M_PI * (i - 0.25) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.push_back({0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp)});
    }
    std::sort(r.begin(), r.end());
    return r;
  }();
  return rule;
}

}  // namespace

double weighted_area(const AmbientSpace& space, const SurfaceMesh& mesh, const Quadrature& quad) {
  const Immersion& imm = *mesh.immersion;
  const auto& tp = triangle_points(quad.rule);
  std::vector<double> parts(mesh.triangles.size());
  parallel_for(mesh.triangles.size(), [&](std::size_t ti) {
    const Triangle& t = mesh.triangles[ti];
    const Patch& p = imm.patches[t.patch];
    const double pa = param_area(t);
    double sum = 0.0;
    for (const auto& q : tp) {
      const V3<J2> j = patch_jet(p, qp_uv(t, q));
      const double da = partial(j, 0).cross(partial(j, 1)).norm();
      sum += q.weight * pa * da * space.density.f(values(j));
    }
    parts[ti] = sum;
  });
  return fold(parts);
}

namespace {

// d/dt V_f at the surface phi_t(Sigma).
double volume_rate(const AmbientSpace& space, const DeformedFamily& fam, double t,
                   const Quadrature& quad) {
  const Immersion& base = *fam.base.immersion;
  const auto& tp = triangle_points(quad.rule);
  const double sign = base.orientation_sign >= 0 ? 1.0 : -1.0;
  const double d = 1e-3;
  std::vector<double> parts(fam.base.triangles.size());
  parallel_for(fam.base.triangles.size(), [&](std::size_t ti) {
    const Triangle& tr = fam.base.triangles[ti];
    const Patch& p = base.patches[tr.patch];
    const double pa = param_area(tr);
    double sum = 0.0;
    for (const auto& q : tp) {
      const Vec2 uv = qp_uv(tr, q);
      const V3<J2> x0 = patch_jet(p, uv);
      const V3<J2> xt = deform(*fam.space, fam.field, x0, t);
      const Vec3 x = values(x0);
      auto at = [&](double s) { return fam.point_at(x, s); };
      const Vec3 vel = (8.0 * (at(t + d) - at(t - d)) - (at(t + 2 * d) - at(t - 2 * d))) / (12.0 * d);
      const Vec3 n_da = sign * partial(xt, 0).cross(partial(xt, 1));
      sum += q.weight * pa * vel.dot(n_da) * space.density.f(values(xt));
    }
    parts[ti] = sum;
  });
  return fold(parts);
}

}  // namespace

double swept_weighted_volume(const AmbientSpace& space, const DeformedFamily& family, double s,
                             const Quadrature& quad) {
  if (!family.s_values.empty()) {
    const auto [lo, hi] = std::minmax_element(family.s_values.begin(), family.s_values.end());
    if (s < *lo - 1e-15 || s > *hi + 1e-15) {
      std::ostringstream os;
      os << "swept_weighted_volume: s = " << s << " outside the sampled range [" << *lo << ", "
         << *hi << "]";
      throw InputError(os.str());
    }
  }
  if (s == 0.0) return 0.0;
  double v = 0.0;
  for (const auto& [node, w] : gauss_legendre8()) v += w * volume_rate(space, family, node * s, quad);
  return v * s;
}

double first_variation_formula(const AmbientSpace&, const SurfaceMesh&, const ExtrinsicData& data,
                               const VariationField& X) {
  double interior = 0.0, boundary = 0.0;
  for (const auto& s : data.interior) {
    const Vec3 x = values(X.at(V3<double>{{s.x[0], s.x[1], s.x[2]}}));
    interior += s.H_f * x.dot(s.N) * s.f * s.da;
  }
  for (const auto& s : data.boundary) {
    const Vec3 x = values(X.at(V3<double>{{s.x[0], s.x[1], s.x[2]}}));
    boundary += x.dot(s.nu) * s.f * s.dl;
  }
  return -interior - boundary;
}

double volume_first_variation(const AmbientSpace&, const SurfaceMesh&, const ExtrinsicData& data,
                              const VariationField& X) {
  double v = 0.0;
  for (const auto& s : data.interior) {
    const Vec3 x = values(X.at(V3<double>{{s.x[0], s.x[1], s.x[2]}}));
    v += x.dot(s.N) * s.f * s.da;
  }
  return v;
}

namespace {

FdEstimate centered_first(const std::function<double(double)>& F, double scale) {
  const double h1 = 1e-3, h2 = 5e-4;
  FdEstimate e;
  e.s_samples = {-h1, -h2, h2, h1};
  for (double s : e.s_samples) e.f_samples.push_back(F(s));
  const double d1 = (e.f_samples[3] - e.f_samples[0]) / (2.0 * h1);
  const double d2 = (e.f_samples[2] - e.f_samples[1]) / (2.0 * h2);
  e.value = (4.0 * d2 - d1) / 3.0;
  e.error_estimate = std::abs(d2 - d1) / 3.0;
  if (!std::isfinite(e.value) || std::abs(d2 - d1) > 1e-2 * (std::abs(e.value) + scale)) {
    std::ostringstream os;
    os << "finite-difference estimates disagree across steps (" << d1 << " vs " << d2
       << "): family is not smooth";
    throw NumericalError(os.str());
  }
  return e;
}

}  // namespace

FdEstimate first_variation_fd(const AmbientSpace& space, const DeformedFamily& family,
                              const Quadrature& quad) {
  const double a0 = weighted_area(space, family.base, quad);
  return centered_first(
      [&](double s) { return weighted_area(space, family.mesh_at(s), quad); }, 1e-3 * a0);
}

FdEstimate volume_variation_fd(const AmbientSpace& space, const DeformedFamily& family,
                               const Quadrature& quad) {
  const double a0 = weighted_area(space, family.base, quad);
  DeformedFamily open = family;
  open.s_values.clear();
  return centered_first([&](double s) { return swept_weighted_volume(space, open, s, quad); },
                        1e-3 * a0);
}

FdEstimate second_variation_fd(const AmbientSpace& space, const DeformedFamily& family,
                               const Quadrature& quad) {
  const ExtrinsicData base = extrinsic_geometry(space, family.base, quad);
  const StationarityVerdict v = stationarity_verdict(space, family.base, base);
  if (!v.volume_constrained) {
    std::ostringstream os;
    os << "second variation needs an f-stationary base (H_f spread " << v.H_f_spread
       << ", max |<N, xi>| " << v.max_contact << ")";
    throw PreconditionError(os.str());
  }
  const double H0 = v.H_f_mean;
  DeformedFamily open = family;
  open.s_values.clear();
  const double a0 = weighted_area(space, family.base, quad);
  // F(s) - F(0), so an identically zero field gives exactly zero.
  auto dF = [&](double s) {
    return (weighted_area(space, open.mesh_at(s), quad) - a0) +
           H0 * swept_weighted_volume(space, open, s, quad);
  };
  const double h1 = 1e-2, h2 = 5e-3;
  FdEstimate e;
  e.s_samples = {-2 * h1, -h1, -h2, h2, h1, 2 * h1};
  for (double s : e.s_samples) e.f_samples.push_back(dF(s));
  // Sample map: -2h1, -h1 (= -2h2), -h2, h2, h1 (= 2h2), 2h1.
  const auto& d = e.f_samples;
  const double D1 = (-d[5] + 16.0 * d[4] + 16.0 * d[1] - d[0]) / (12.0 * h1 * h1);
  const double D2 = (-d[4] + 16.0 * d[3] + 16.0 * d[2] - d[1]) / (12.0 * h2 * h2);
  e.value = (16.0 * D2 - D1) / 15.0;
  e.error_estimate = std::abs(D2 - D1) / 15.0;
  if (!std::isfinite(e.value)) throw NumericalError("second variation is not finite");
  return e;
}

DivergenceResidual divergence_theorem_residual(const AmbientSpace&, const SurfaceMesh& mesh,
                                               const ExtrinsicData& data, const VariationField& X) {
  const Immersion& imm = *mesh.immersion;
  std::vector<double> div_parts(data.interior.size()), h_parts(data.interior.size());
  parallel_for(data.interior.size(), [&](std::size_t i) {
    const InteriorSample& s = data.interior[i];
    const Patch& p = imm.patches[mesh.triangles[s.tri].patch];
    const V3<J2> xj = patch_jet(p, s.uv);
    const V3<J2> Xj = X.at(xj);
    const Vec3 Xa[2] = {partial(Xj, 0), partial(Xj, 1)};
    const Vec3 xa[2] = {s.xu, s.xv};
    double div = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) div += s.Ginv(a, b) * Xa[a].dot(xa[b]);
    const Vec3 x0 = values(Xj);
    div_parts[i] = (div + s.grad_psi.dot(x0)) * s.f * s.da;
    h_parts[i] = s.H_f * x0.dot(s.N) * s.f * s.da;
  });
  DivergenceResidual r;
  r.divergence_term = fold(div_parts);
  r.mean_curvature_term = fold(h_parts);
  for (const auto& s : data.boundary) {
    const Vec3 x = values(X.at(V3<double>{{s.x[0], s.x[1], s.x[2]}}));
    r.boundary_term += x.dot(s.nu) * s.f * s.dl;
  }
  r.residual = std::abs(r.divergence_term + r.mean_curvature_term + r.boundary_term);
  return r;
}

double index_form_of_field(const AmbientSpace&, const SurfaceMesh& mesh, const ExtrinsicData& data,
                           const VariationField& X) {
  const Immersion& imm = *mesh.immersion;
  std::vector<double> parts(data.interior.size());
  parallel_for(data.interior.size(), [&](std::size_t i) {
    const InteriorSample& s = data.interior[i];
    const Patch& p = imm.patches[mesh.triangles[s.tri].patch];
    const V3<J2> Xj = X.at(patch_jet(p, s.uv));
    const Vec3 x0 = values(Xj);
    const Vec3 xa[2] = {s.xu, s.xv};
    const double u = x0.dot(s.N);
    double du[2];
    for (int a = 0; a < 2; ++a) {
      Vec3 dN = Vec3::Zero();
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) dN -= s.B(a, b) * s.Ginv(b, c) * xa[c];
      du[a] = partial(Xj, a).dot(s.N) + x0.dot(dN);
    }
    double grad2 = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) grad2 += s.Ginv(a, b) * du[a] * du[b];
    parts[i] = (grad2 - (s.ric_f_nn + s.sigma2) * u * u) * s.f * s.da;
  });
  double boundary = 0.0;
  for (const auto& s : data.boundary) {
    const double u = values(X.at(V3<double>{{s.x[0], s.x[1], s.x[2]}})).dot(s.N);
    boundary += s.II_NN * u * u * s.f * s.dl;
  }
  return fold(parts) - boundary;
}

VariationCheck compare(std::string surface, std::string density, std::string field, double lhs,
                       double rhs, double abs_tol, double rel_tol) {
  VariationCheck c;
  c.surface = std::move(surface);
  c.density = std::move(density);
  c.field = std::move(field);
  c.lhs = lhs;
  c.rhs = rhs;
  c.abs_err = std::abs(lhs - rhs);
  c.rel_err = c.abs_err / std::max(std::abs(rhs), 1e-300);
  c.pass = c.abs_err <= std::max(abs_tol, rel_tol * std::abs(rhs));
  return c;
}

}  // namespace wstab
