#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wstab/errors.hpp"
#include "wstab/functionals.hpp"

using namespace wstab;

namespace {
ImmersionPtr share(Immersion i) { return std::make_shared<const Immersion>(std::move(i)); }

struct Setup {
  AmbientSpace space;
  SurfaceMesh mesh;
  ExtrinsicData data;
};

Setup hemisphere(Density d, int res = 16) {
  Setup s{euclidean_space(std::move(d), half_space_boundary()), {}, {}};
  s.mesh = mesh_from_immersion(s.space, share(hemisphere_immersion()), res);
  s.data = extrinsic_geometry(s.space, s.mesh);
  return s;
}
}  // namespace

TEST_CASE("weighted area of the unit half-sphere") {
  const Setup s = hemisphere(constant_density(), 16);
  CHECK(std::abs(weighted_area(s.space, s.mesh) - 2 * oracle::pi) <= 1e-4);
  // psi = k log r is identically 0 on the unit sphere.
  const Setup t = hemisphere(radial_log_density(-2.5), 16);
  CHECK(std::abs(weighted_area(t.space, t.mesh) - 2 * oracle::pi) <= 1e-4);
}

TEST_CASE("inflation: A'(0) = 4 pi, V'(0) = 2 pi") {
  const Setup s = hemisphere(constant_density());
  const VariationField X = inflation_field();
  const DeformedFamily fam = make_family(s.space, s.mesh, X);
  const FdEstimate a = first_variation_fd(s.space, fam);
  CHECK(a.value == doctest::Approx(4 * oracle::pi).epsilon(1e-4));
  CHECK(first_variation_formula(s.space, s.mesh, s.data, X) ==
        doctest::Approx(4 * oracle::pi).epsilon(1e-4));
  const FdEstimate v = volume_variation_fd(s.space, fam);
  CHECK(v.value == doctest::Approx(2 * oracle::pi).epsilon(1e-4));
  CHECK(volume_first_variation(s.space, s.mesh, s.data, X) ==
        doctest::Approx(2 * oracle::pi).epsilon(1e-4));
}

TEST_CASE("swept volume of the inflated half-sphere") {
  const Setup s = hemisphere(constant_density());
  const DeformedFamily fam = make_family(s.space, s.mesh, inflation_field());
  for (double t : {-0.1, 0.05, 0.2})
    CHECK(swept_weighted_volume(s.space, fam, t) ==
          doctest::Approx(oracle::half_shell_volume(t)).epsilon(1e-3));
  CHECK(swept_weighted_volume(s.space, fam, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("first variation formula matches finite differences off-stationary") {
  const Setup s = hemisphere(gaussian_density());
  for (const VariationField& X :
       {radial_field(Vec3::Zero(), 1.0, Vec3(0.3, -0.2, 0)), rotation_field(Vec3(0, 0, 1)),
        sum_field(inflation_field(), translation_field(Vec3(0.5, 0.2, 0)))}) {
    const double formula = first_variation_formula(s.space, s.mesh, s.data, X);
    const FdEstimate fd = first_variation_fd(s.space, make_family(s.space, s.mesh, X));
    CHECK_MESSAGE(std::abs(formula - fd.value) <= std::max(1e-6, 1e-4 * std::abs(fd.value)),
                  X.name);
    const DivergenceResidual r = divergence_theorem_residual(s.space, s.mesh, s.data, X);
    CHECK(r.residual <= 1e-6 * std::max(1.0, std::abs(r.divergence_term)));
  }
}

TEST_CASE("zero field has zero variations") {
  const Setup s = hemisphere(radial_log_density(-1.0), 8);
  const VariationField Z = zero_field();
  CHECK(first_variation_formula(s.space, s.mesh, s.data, Z) == 0.0);
  CHECK(std::abs(first_variation_fd(s.space, make_family(s.space, s.mesh, Z)).value) <= 1e-12);
  CHECK(index_form_of_field(s.space, s.mesh, s.data, Z) == 0.0);
}

TEST_CASE("second variation of A_f + H_f V_f along inflation") {
  // A_f(r) = 2 pi r^(2+k), V_f(r) = 2 pi r^(3+k)/(3+k), H_f = -(2+k).
  const double k = -2.5;
  const double exact = 2 * oracle::pi * ((2 + k) * (1 + k) - (2 + k) * (2 + k));
  CHECK(exact == doctest::Approx(oracle::hemisphere_inflation_index(k)));
  const Setup s = hemisphere(radial_log_density(k));
  const VariationField X = inflation_field();
  const FdEstimate fd = second_variation_fd(s.space, make_family(s.space, s.mesh, X));
  CHECK(fd.value == doctest::Approx(exact).epsilon(1e-3));
  CHECK(index_form_of_field(s.space, s.mesh, s.data, X) == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("second variation requires a stationary base") {
  Setup s{euclidean_space(constant_density(), half_space_boundary()), {}, {}};
  SphereOptions o;
  o.perturbation = 0.1;
  s.mesh = mesh_from_immersion(s.space, share(hemisphere_immersion(o)), 8);
  CHECK_THROWS_AS(second_variation_fd(s.space, make_family(s.space, s.mesh, inflation_field())),
                  PreconditionError);
}

TEST_CASE("fields must be tangent to dM") {
  const Setup s = hemisphere(constant_density(), 8);
  CHECK_THROWS_AS(require_admissible(s.space, s.data, translation_field(Vec3(0, 0, 1))),
                  InputError);
  CHECK_NOTHROW(require_admissible(s.space, s.data, translation_field(Vec3(1, 0, 0))));
  CHECK(admissibility_residual(s.space, s.data, inflation_field()) <= 1e-12);
}

TEST_CASE("deformed boundary stays on dM") {
  const AmbientSpace space = euclidean_space(constant_density(), ball_boundary());
  const SurfaceMesh base =
      mesh_from_immersion(space, share(disk_immersion(Vec3(0, 0, 0.3), std::sqrt(0.91))), 8);
  const DeformedFamily fam = make_family(space, base, sphere_tangential_field(Vec3(0, 0, 1)));
  const SurfaceMesh m = fam.mesh_at(0.05);
  for (const BoundaryEdge& e : m.boundary_edges)
    CHECK(std::abs(space.boundary->phi(m.positions[e.v0])) <= 1e-10);
}

TEST_CASE("cutoff vanishes outside its ball") {
  const BumpCutoff b{Vec3(0, 0, 1), 0.5};
  const V3<double> far{{0.0, 0.0, 0.0}}, mid{{0.0, 0.0, 0.9}};
  CHECK(bump_weight(b, far) == 0.0);
  const double q = 0.01 / 0.25;
  CHECK(bump_weight(b, mid) == doctest::Approx(1 - 10 * q * q * q + 15 * std::pow(q, 4) -
                                               6 * std::pow(q, 5)));
}

TEST_CASE("compare() applies absolute and relative tolerances") {
  CHECK(compare("s", "d", "f", 1.0, 1.0 + 1e-7, 1e-6, 1e-4).pass);
  CHECK_FALSE(compare("s", "d", "f", 100.0, 100.1, 1e-6, 1e-4).pass);
  CHECK(compare("s", "d", "f", 100.0, 100.005, 1e-6, 1e-4).pass);
}
