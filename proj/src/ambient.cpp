#include "wstab/ambient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wstab/errors.hpp"

namespace wstab {

namespace {

double dim_trace(const Mat3& A, int dim) { return dim == 2 ? A(0, 0) + A(1, 1) : A.trace(); }

void require_in_space(const AmbientSpace& space, const Vec3& p, const char* op) {
  if (!space.contains(p)) {
    std::ostringstream os;
    os << op << ": point (" << p.transpose() << ") lies outside M";
    throw InputError(os.str());
  }
}

const BoundarySpec& require_boundary(const AmbientSpace& space, const char* op) {
  if (!space.boundary) throw InputError(std::string(op) + ": ambient space has no boundary");
  return *space.boundary;
}

Vec3 checked_grad_phi(const BoundarySpec& b, const Vec3& p, const char* op) {
  if (std::abs(b.phi(p)) > 1e-10) {
    std::ostringstream os;
    os << op << ": |Phi(p)| = " << std::abs(b.phi(p)) << " exceeds 1e-10";
    throw InputError(os.str());
  }
  const Vec3 g = b.grad_phi(p);
  if (g.norm() < 1e-12) throw SingularBoundaryError(std::string(op) + ": |grad Phi| < 1e-12");
  return g;
}

void install_flat(AmbientSpace& s) {
  s.ricci = [](const Vec3&, const Vec3&) { return 0.0; };
  s.scalar = [](const Vec3&) { return 0.0; };
  s.custom_curvature = false;
}

}  // namespace

bool AmbientSpace::contains(const Vec3& p, double tol) const {
  if (!boundary) return true;
  return boundary->phi(p) >= -tol;
}

AmbientSpace euclidean_space(Density density, std::optional<BoundarySpec> boundary, int dim) {
  if (dim != 2 && dim != 3) throw InputError("ambient dimension must be 2 or 3");
  AmbientSpace s;
  s.dim = dim;
  s.metric_kind = MetricKind::FlatEuclidean;
  s.density = std::move(density);
  s.boundary = std::move(boundary);
  install_flat(s);
  return s;
}

AmbientSpace product_space(std::vector<double> circumferences, Density density,
                           std::optional<BoundarySpec> boundary) {
  if (circumferences.empty() || circumferences.size() > 2)
    throw InputError("FlatProduct needs one or two circle factors");
  for (double L : circumferences)
    if (!(L > 0.0)) throw InputError("circle circumference must be positive");
  AmbientSpace s;
  s.dim = 3;
  s.metric_kind = MetricKind::FlatProduct;
  s.circumferences = std::move(circumferences);
  // Circle coordinates are reduced to the fundamental domain [0, L) before
  // the density and boundary callbacks see them.
  auto wrap = [L = s.circumferences](const Vec3& p) {
    Vec3 q = p;
    for (std::size_t i = 0; i < L.size(); ++i) q[i + 1] -= L[i] * std::floor(q[i + 1] / L[i]);
    return q;
  };
  s.density.name = density.name;
  s.density.psi = [d = density.psi, wrap](const Vec3& p) { return d(wrap(p)); };
  s.density.grad_psi = [d = density.grad_psi, wrap](const Vec3& p) { return d(wrap(p)); };
  s.density.hess_psi = [d = density.hess_psi, wrap](const Vec3& p) { return d(wrap(p)); };
  if (boundary) {
    BoundarySpec b = *boundary;
    b.phi = [d = boundary->phi, wrap](const Vec3& p) { return d(wrap(p)); };
    b.grad_phi = [d = boundary->grad_phi, wrap](const Vec3& p) { return d(wrap(p)); };
    b.hess_phi = [d = boundary->hess_phi, wrap](const Vec3& p) { return d(wrap(p)); };
    s.boundary = b;
  }
  install_flat(s);
  return s;
}

void set_curvature(AmbientSpace& space, std::function<double(const Vec3&, const Vec3&)> ricci,
                   std::function<double(const Vec3&)> scalar) {
  space.ricci = std::move(ricci);
  space.scalar = std::move(scalar);
  space.custom_curvature = true;
}

// ---------------------------------------------------------------- densities

Density constant_density(double value) {
  if (!(value > 0.0)) throw InputError("constant density must be positive");
  const double c = std::log(value);
  Density d;
  d.name = "constant";
  d.psi = [c](const Vec3&) { return c; };
  d.grad_psi = [](const Vec3&) { return Vec3::Zero().eval(); };
  d.hess_psi = [](const Vec3&) { return Mat3::Zero().eval(); };
  return d;
}

Density gaussian_density(Vec3 w) {
  Density d;
  d.name = "gaussian";
  d.psi = [w](const Vec3& p) { return -(w.array() * p.array().square()).sum(); };
  d.grad_psi = [w](const Vec3& p) { return (-2.0 * w.array() * p.array()).matrix().eval(); };
  d.hess_psi = [w](const Vec3&) { return Mat3((-2.0 * w).asDiagonal()); };
  return d;
}

Density radial_log_density(double k) {
  Density d;
  d.name = "radial-log";
  d.psi = [k](const Vec3& p) { return k * std::log(p.norm()); };
  d.grad_psi = [k](const Vec3& p) { return (k / p.squaredNorm() * p).eval(); };
  d.hess_psi = [k](const Vec3& p) {
    const double r2 = p.squaredNorm();
    return ((k / r2) * (Mat3::Identity() - 2.0 / r2 * p * p.transpose())).eval();
  };
  return d;
}

Density linear_density(const Vec3& a, double b) {
  Density d;
  d.name = "linear";
  d.psi = [a, b](const Vec3& p) { return a.dot(p) + b; };
  d.grad_psi = [a](const Vec3&) { return a; };
  d.hess_psi = [](const Vec3&) { return Mat3::Zero().eval(); };
  return d;
}

Density radial_smooth_density(std::vector<double> g) {
  if (g.empty()) g.push_back(0.0);
  // g(r), g'(r), g''(r) and g'(r)/r; the last is regular at r = 0 when the
  // linear coefficient vanishes.
  auto eval = [g](double r, double& g0, double& g1, double& g2, double& g1_over_r) {
    g0 = g1 = g2 = 0.0;
    g1_over_r = 0.0;
    double rp = 1.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g0 += g[i] * rp;
      rp *= r;
    }
    for (std::size_t i = 1; i < g.size(); ++i) g1 += double(i) * g[i] * std::pow(r, double(i) - 1);
    for (std::size_t i = 2; i < g.size(); ++i)
      g2 += double(i) * double(i - 1) * g[i] * std::pow(r, double(i) - 2);
    for (std::size_t i = 2; i < g.size(); ++i)
      g1_over_r += double(i) * g[i] * std::pow(r, double(i) - 2);
    if (g.size() > 1 && g[1] != 0.0) g1_over_r += g[1] / r;
  };
  Density d;
  d.name = "radial-smooth";
  d.psi = [eval](const Vec3& p) {
    double g0, g1, g2, q;
    eval(p.norm(), g0, g1, g2, q);
    return g0;
  };
  d.grad_psi = [eval](const Vec3& p) {
    double g0, g1, g2, q;
    eval(p.norm(), g0, g1, g2, q);
    return (q * p).eval();
  };
  d.hess_psi = [eval](const Vec3& p) {
    const double r = p.norm();
    double g0, g1, g2, q;
    eval(r, g0, g1, g2, q);
    if (r < 1e-300) return (q * Mat3::Identity()).eval();
    const Vec3 e = p / r;
    return (g2 * e * e.transpose() + q * (Mat3::Identity() - e * e.transpose())).eval();
  };
  return d;
}

// --------------------------------------------------------------- boundaries

BoundarySpec half_space_boundary(Vec3 normal, double offset) {
  if (normal.norm() == 0.0) throw InputError("half-space normal must be non-zero");
  normal.normalize();
  BoundarySpec b;
  b.name = "half-space";
  b.phi = [normal, offset](const Vec3& p) { return normal.dot(p) - offset; };
  b.grad_phi = [normal](const Vec3&) { return normal; };
  b.hess_phi = [](const Vec3&) { return Mat3::Zero().eval(); };
  b.collar = 0.25;
  return b;
}

BoundarySpec slab_boundary(int axis, double half_width) {
  if (axis < 0 || axis > 2) throw InputError("slab axis must be 0, 1 or 2");
  BoundarySpec b;
  b.name = "slab";
  b.phi = [axis, half_width](const Vec3& p) { return half_width - std::abs(p[axis]); };
  b.grad_phi = [axis](const Vec3& p) {
    Vec3 g = Vec3::Zero();
    g[axis] = p[axis] >= 0.0 ? -1.0 : 1.0;
    return g;
  };
  b.hess_phi = [](const Vec3&) { return Mat3::Zero().eval(); };
  b.collar = 0.25 * half_width;
  return b;
}

BoundarySpec ball_boundary(Vec3 center, double radius) {
  BoundarySpec b;
  b.name = "ball";
  b.phi = [center, radius](const Vec3& p) { return radius - (p - center).norm(); };
  b.grad_phi = [center](const Vec3& p) { return (-(p - center).normalized()).eval(); };
  b.hess_phi = [center](const Vec3& p) {
    const Vec3 q = p - center;
    const double r = q.norm();
    const Vec3 e = q / r;
    return (-(Mat3::Identity() - e * e.transpose()) / r).eval();
  };
  b.collar = 0.25 * radius;
  return b;
}

BoundarySpec ball_complement_boundary(Vec3 center, double radius) {
  BoundarySpec b;
  b.name = "ball-complement";
  b.phi = [center, radius](const Vec3& p) { return (p - center).norm() - radius; };
  b.grad_phi = [center](const Vec3& p) { return (p - center).normalized().eval(); };
  b.hess_phi = [center](const Vec3& p) {
    const Vec3 q = p - center;
    const double r = q.norm();
    const Vec3 e = q / r;
    return ((Mat3::Identity() - e * e.transpose()) / r).eval();
  };
  b.collar = 0.25 * radius;
  return b;
}

BoundarySpec cone_boundary(double alpha, Vec3 axis) {
  if (!(alpha > 0.0 && alpha < M_PI)) throw InputError("cone half-angle must lie in (0, pi)");
  axis.normalize();
  const double ca = std::cos(alpha);
  BoundarySpec b;
  b.name = "cone";
  b.phi = [axis, ca](const Vec3& p) { return axis.dot(p) - ca * p.norm(); };
  // Phi is not differentiable at the apex; report a zero gradient there.
  b.grad_phi = [axis, ca](const Vec3& p) {
    if (p.norm() < 1e-14) return Vec3::Zero().eval();
    return (axis - ca * p.normalized()).eval();
  };
  b.hess_phi = [ca](const Vec3& p) {
    const double r = p.norm();
    const Vec3 e = p / r;
    return (-ca / r * (Mat3::Identity() - e * e.transpose())).eval();
  };
  b.collar = 0.25 * std::sin(alpha);
  return b;
}

BoundarySpec cylinder_boundary(double radius, int axis) {
  if (axis < 0 || axis > 2) throw InputError("cylinder axis must be 0, 1 or 2");
  BoundarySpec b;
  b.name = "cylinder";
  auto radial = [axis](const Vec3& p) {
    Vec3 q = p;
    q[axis] = 0.0;
    return q;
  };
  b.phi = [radial, radius](const Vec3& p) { return radius - radial(p).norm(); };
  b.grad_phi = [radial](const Vec3& p) { return (-radial(p).normalized()).eval(); };
  b.hess_phi = [radial, axis](const Vec3& p) {
    const Vec3 q = radial(p);
    const double r = q.norm();
    const Vec3 e = q / r;
    Mat3 P = Mat3::Identity() - e * e.transpose();
    P.row(axis).setZero();
    P.col(axis).setZero();
    return (-P / r).eval();
  };
  b.collar = 0.25 * radius;
  return b;
}

// --------------------------------------------------------------- operations

double bakry_emery_ricci(const AmbientSpace& space, const Vec3& p, const Vec3& v) {
  if (std::abs(v.norm() - 1.0) > 1e-12) throw InputError("bakry_emery_ricci: v is not a unit vector");
  require_in_space(space, p, "bakry_emery_ricci");
  return space.ricci(p, v) - v.dot(space.density.hess_psi(p) * v);
}

double laplacian_psi(const AmbientSpace& space, const Vec3& p) {
  return dim_trace(space.density.hess_psi(p), space.dim);
}

double perelman_scalar(const AmbientSpace& space, const Vec3& p) {
  require_in_space(space, p, "perelman_scalar");
  Vec3 g = space.density.grad_psi(p);
  if (space.dim == 2) g[2] = 0.0;
  return space.scalar(p) - 2.0 * laplacian_psi(space, p) - g.squaredNorm();
}

Vec3 boundary_inner_normal(const AmbientSpace& space, const Vec3& p) {
  const BoundarySpec& b = require_boundary(space, "boundary_inner_normal");
  return checked_grad_phi(b, p, "boundary_inner_normal").normalized();
}

double boundary_second_fundamental(const AmbientSpace& space, const Vec3& p, const Vec3& v,
                                   const Vec3& w) {
  const BoundarySpec& b = require_boundary(space, "boundary_second_fundamental");
  const Vec3 g = checked_grad_phi(b, p, "boundary_second_fundamental");
  const Vec3 xi = g.normalized();
  if (std::abs(v.dot(xi)) > 1e-10 * std::max(1.0, v.norm()) ||
      std::abs(w.dot(xi)) > 1e-10 * std::max(1.0, w.norm()))
    throw InputError("boundary_second_fundamental: argument not tangent to the boundary");
  return -v.dot(b.hess_phi(p) * w) / g.norm();
}

double boundary_mean_curvature_trace(const AmbientSpace& space, const Vec3& p) {
  const BoundarySpec& b = require_boundary(space, "boundary_mean_curvature_trace");
  const Vec3 g = checked_grad_phi(b, p, "boundary_mean_curvature_trace");
  const Vec3 xi = g.normalized();
  const Mat3 H = b.hess_phi(p);
  return -(dim_trace(H, space.dim) - xi.dot(H * xi)) / g.norm();
}

double boundary_f_mean_curvature(const AmbientSpace& space, const Vec3& p) {
  const double tr = boundary_mean_curvature_trace(space, p);
  const Vec3 xi = boundary_inner_normal(space, p);
  return tr - space.density.grad_psi(p).dot(xi);
}

ResidualReport density_consistency_check(const AmbientSpace& space, const std::vector<Vec3>& samples) {
  ResidualReport rep;
  const Density& d = space.density;
  const int n = space.dim;
  for (const Vec3& p : samples) {
    const double h = 1e-5 * (1.0 + p.norm());
    // Second differences of psi lose about eps/h^2 to cancellation, which at
    // h = 1e-5 sits at the 1e-6 threshold; the Hessian stencil uses 10 h.
    const double hh = 1e-4 * (1.0 + p.norm());
    Vec3 g_fd = Vec3::Zero();
    Mat3 H_fd = Mat3::Zero();
    const double f0 = d.psi(p);
    for (int i = 0; i < n; ++i) {
      Vec3 e = Vec3::Zero();
      e[i] = 1.0;
      g_fd[i] = (d.psi(p + h * e) - d.psi(p - h * e)) / (2.0 * h);
      H_fd(i, i) = (d.psi(p + hh * e) - 2.0 * f0 + d.psi(p - hh * e)) / (hh * hh);
      for (int j = 0; j < i; ++j) {
        Vec3 ej = Vec3::Zero();
        ej[j] = 1.0;
        const double v = (d.psi(p + hh * e + hh * ej) - d.psi(p + hh * e - hh * ej) -
                          d.psi(p - hh * e + hh * ej) + d.psi(p - hh * e - hh * ej)) /
                         (4.0 * hh * hh);
        H_fd(i, j) = H_fd(j, i) = v;
      }
    }
    Vec3 g = d.grad_psi(p);
    Mat3 H = d.hess_psi(p);
    if (n == 2) {
      g[2] = 0.0;
      H.row(2).setZero();
      H.col(2).setZero();
    }
    const double gr = (g - g_fd).cwiseAbs().maxCoeff() / std::max(1.0, g_fd.cwiseAbs().maxCoeff());
    const double hr = (H - H_fd).cwiseAbs().maxCoeff() / std::max(1.0, H_fd.cwiseAbs().maxCoeff());
    rep.grad_residual = std::max(rep.grad_residual, gr);
    rep.hess_residual = std::max(rep.hess_residual, hr);
  }
  rep.max_residual = std::max(rep.grad_residual, rep.hess_residual);
  rep.pass = rep.max_residual <= rep.threshold;
  return rep;
}

CurvatureCheck curvature_consistency_check(const AmbientSpace& space,
                                           const std::vector<Vec3>& samples) {
  CurvatureCheck c;
  for (const Vec3& p : samples) {
    double tr = 0.0;
    for (int i = 0; i < space.dim; ++i) {
      Vec3 e = Vec3::Zero();
      e[i] = 1.0;
      tr += space.ricci(p, e);
    }
    const double s = space.scalar(p);
    c.max_residual = std::max(c.max_residual, std::abs(s - tr) / std::max(1.0, std::abs(s)));
  }
  c.pass = c.max_residual <= 1e-10;
  return c;
}

BoundaryCheck boundary_check(const AmbientSpace& space, const std::vector<Vec3>& samples,
                             double eps) {
  const BoundarySpec& b = require_boundary(space, "boundary_check");
  BoundaryCheck c;
  c.min_grad_norm = std::numeric_limits<double>::infinity();
  for (const Vec3& p : samples) {
    const Vec3 g = checked_grad_phi(b, p, "boundary_check");
    c.min_grad_norm = std::min(c.min_grad_norm, g.norm());
    if (!(b.phi(p + eps * g.normalized()) > 0.0)) c.inner_normal_ok = false;
  }
  return c;
}

}  // namespace wstab
