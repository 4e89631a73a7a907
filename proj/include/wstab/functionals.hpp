// Weighted area and volume, variation fields, deformed families and the
// finite-difference checks of the first and second variation.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "wstab/surface.hpp"

namespace wstab {

// Quintic bump b(q) = 1 - 10q^3 + 15q^4 - 6q^5 of q = |p - center|^2 / radius^2,
// zero with two derivatives for q >= 1.
struct BumpCutoff {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

template <class T>
T bump_weight(const BumpCutoff& b, const V3<T>& p) {
  T q = T(0.0);
  for (int i = 0; i < 3; ++i) {
    const T d = p[i] - b.center[i];
    q = q + d * d;
  }
  q = q / (b.radius * b.radius);
  if (value(q) >= 1.0) return T(0.0);
  return 1.0 + q * q * q * (-10.0 + q * (15.0 - 6.0 * q));
}

struct VariationField {
  std::string name;
  std::function<Vec3(const Vec3&)> X;
  std::function<V3<J2>(const V3<J2>&)> X_jet;
  // Exact flow p -> phi_s(p) when known (rigid motions); otherwise p + s X(p).
  std::function<Vec3(const Vec3&, double)> flow;
  std::function<V3<J2>(const V3<J2>&, double)> flow_jet;
  std::optional<BumpCutoff> cutoff;

  template <class T>
  V3<T> at(const V3<T>& p) const;
  template <class T>
  V3<T> flowed(const V3<T>& p, double s) const;
};

// Wraps a generic field [](const auto& p) -> V3<T>.
template <class F>
VariationField make_field(std::string name, F f) {
  VariationField v;
  v.name = std::move(name);
  v.X = [f](const Vec3& p) { return values(f(constant_v3<double>(p))); };
  v.X_jet = [f](const V3<J2>& p) { return f(p); };
  return v;
}

template <class T>
V3<T> VariationField::at(const V3<T>& p) const {
  V3<T> x;
  if constexpr (std::is_same_v<T, J2>) {
    x = X_jet(p);
  } else {
    const Vec3 r = X(values(p));
    x = {{r[0], r[1], r[2]}};
  }
  if (cutoff) x = bump_weight(*cutoff, p) * x;
  return x;
}

template <class T>
V3<T> VariationField::flowed(const V3<T>& p, double s) const {
  if (flow && !cutoff) {
    if constexpr (std::is_same_v<T, J2>) {
      return flow_jet(p, s);
    } else {
      const Vec3 r = flow(values(p), s);
      return {{r[0], r[1], r[2]}};
    }
  }
  return p + s * at(p);
}

// Built-in fields.
VariationField zero_field();
VariationField translation_field(const Vec3& v);
// X = phi(p) (p - c)/|p - c| with phi = a0 + <a, p - c>.
VariationField radial_field(const Vec3& center, double a0 = 1.0, const Vec3& a = Vec3::Zero());
// X = p - c (homothety; unit hemisphere grows to radius 1 + s).
VariationField inflation_field(const Vec3& center = Vec3::Zero());
// X = axis x (p - c), with the exact rotation as its flow.
VariationField rotation_field(const Vec3& axis, const Vec3& center = Vec3::Zero());
// X = phi(p) n with constant n and phi = a0 + <a, p>.
VariationField normal_constant_field(const Vec3& n, double a0 = 1.0, const Vec3& a = Vec3::Zero());
// Tangential field on a sphere of center c: a - <a, p^> p^ scaled by |p - c|.
VariationField sphere_tangential_field(const Vec3& a, const Vec3& center = Vec3::Zero());
// Ambient gradient of g(p) = <a, p> + 0.5 <p, Q p>.
VariationField gradient_field(const Vec3& a, const Mat3& Q);
VariationField with_cutoff(VariationField f, const BumpCutoff& c);
VariationField sum_field(const VariationField& a, const VariationField& b);

// Surfaces phi_s(Sigma). Points in the collar {0 <= Phi < collar} are pulled
// back onto the level Phi(x) + s <grad Phi(x), X(x)> by a few Newton steps
// blended with a smoothstep weight, so boundary points stay on dM and the
// velocity at s = 0 is X.
struct DeformedFamily {
  const AmbientSpace* space = nullptr;
  SurfaceMesh base;
  VariationField field;
  std::vector<double> s_values;

  ImmersionPtr immersion_at(double s) const;
  SurfaceMesh mesh_at(double s) const;
  Vec3 point_at(const Vec3& x, double s) const;
};
DeformedFamily make_family(const AmbientSpace& space, const SurfaceMesh& base,
                           const VariationField& field, std::vector<double> s_values = {});

// Maximum of |<X, xi>| over boundary quadrature points.
double admissibility_residual(const AmbientSpace& space, const ExtrinsicData& data,
                              const VariationField& X);
// Throws InputError when the residual exceeds 1e-8.
void require_admissible(const AmbientSpace& space, const ExtrinsicData& data,
                        const VariationField& X);

double weighted_area(const AmbientSpace& space, const SurfaceMesh& mesh,
                     const Quadrature& quad = Quadrature{});
double swept_weighted_volume(const AmbientSpace& space, const DeformedFamily& family, double s,
                             const Quadrature& quad = Quadrature{});

double first_variation_formula(const AmbientSpace& space, const SurfaceMesh& mesh,
                               const ExtrinsicData& data, const VariationField& X);
double volume_first_variation(const AmbientSpace& space, const SurfaceMesh& mesh,
                              const ExtrinsicData& data, const VariationField& X);

struct FdEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
  std::vector<double> s_samples;
  std::vector<double> f_samples;  // functional values at s_samples
};
FdEstimate first_variation_fd(const AmbientSpace& space, const DeformedFamily& family,
                              const Quadrature& quad = Quadrature{});
FdEstimate volume_variation_fd(const AmbientSpace& space, const DeformedFamily& family,
                               const Quadrature& quad = Quadrature{});
// d^2/ds^2 of A_f + H_f V_f at 0; requires a volume-constrained stationary base.
FdEstimate second_variation_fd(const AmbientSpace& space, const DeformedFamily& family,
                               const Quadrature& quad = Quadrature{});

struct DivergenceResidual {
  double divergence_term = 0, mean_curvature_term = 0, boundary_term = 0, residual = 0;
};
DivergenceResidual divergence_theorem_residual(const AmbientSpace& space, const SurfaceMesh& mesh,
                                               const ExtrinsicData& data, const VariationField& X);

// Continuous index form I_f(u, u) for u = <X, N> with exact surface gradients.
double index_form_of_field(const AmbientSpace& space, const SurfaceMesh& mesh,
                           const ExtrinsicData& data, const VariationField& X);

struct VariationCheck {
  std::string surface, density, field;
  double lhs = 0, rhs = 0, abs_err = 0, rel_err = 0;
  bool pass = false;
};
VariationCheck compare(std::string surface, std::string density, std::string field, double lhs,
                       double rhs, double abs_tol, double rel_tol);

}  // namespace wstab
