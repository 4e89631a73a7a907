#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "wstab/errors.hpp"
#include "wstab/theorems.hpp"

using namespace wstab;

namespace {
ImmersionPtr share(Immersion i) { return std::make_shared<const Immersion>(std::move(i)); }

struct Setup {
  AmbientSpace space;
  SurfaceMesh mesh;
  ExtrinsicData data;
  IndexFormAssembly a;
  SpectralResult spec;
};

Setup make(AmbientSpace space, Immersion imm, int res) {
  Setup s{std::move(space), {}, {}, {}, {}};
  s.mesh = mesh_from_immersion(s.space, share(std::move(imm)), res);
  s.data = extrinsic_geometry(s.space, s.mesh);
  s.a = assemble(s.space, s.mesh);
  s.spec = robin_eigenproblem(s.a, 4);
  return s;
}

constexpr double L = 2 * oracle::pi;

Setup product_slice(Density d) {
  return make(product_space({L}, std::move(d), slab_boundary(2, 1.0)),
              product_slice_immersion(0, L), 12);
}
}  // namespace

TEST_CASE("pointwise Gauss rearrangement") {
  for (const Density& d : {gaussian_density(), radial_log_density(-2.0), constant_density(),
                           radial_smooth_density({0, 0, 0.5})}) {
    const Setup s = make(euclidean_space(d, half_space_boundary()), hemisphere_immersion(), 8);
    const IdentityResidual r = gauss_rearrangement_residual(s.space, s.mesh, s.data);
    CHECK_MESSAGE(r.pass, d.name);
    CHECK(r.max_residual <= 1e-5 * std::max(1.0, r.scale));
  }
}

TEST_CASE("boundary identity II(N,N) = 2 H_dM - h") {
  SUBCASE("half-sphere in a half-space") {
    const Setup s =
        make(euclidean_space(gaussian_density(), half_space_boundary()), hemisphere_immersion(), 8);
    const BoundaryIdentity b = boundary_identity_residual(s.space, s.mesh, s.data);
    CHECK(b.applicable);
    CHECK(b.pass);
  }
  SUBCASE("cap in a cone") {
    const Setup s = make(euclidean_space(constant_density(), cone_boundary(oracle::pi / 3)),
                         cap_immersion(oracle::pi / 3), 8);
    const BoundaryIdentity b = boundary_identity_residual(s.space, s.mesh, s.data);
    CHECK(b.applicable);
    CHECK(b.max_residual <= 1e-6);
  }
  SUBCASE("offset disk does not meet dM orthogonally") {
    const Setup s = make(euclidean_space(constant_density(), ball_boundary()),
                         disk_immersion(Vec3(0, 0, 0.3), std::sqrt(0.91)), 6);
    CHECK_FALSE(boundary_identity_residual(s.space, s.mesh, s.data).applicable);
  }
}

TEST_CASE("product slice is the equality case of the chain") {
  const Setup s = product_slice(linear_density(Vec3(1, 0, 0), 0.0));
  const ChainReport c = stability_topology_chain(s.space, s.mesh, s.data, s.a);
  CHECK(c.chi == 0);
  CHECK(c.hypotheses_hold);
  CHECK(c.stationary);
  CHECK(c.pass);
  CHECK(c.equality_throughout);
  CHECK(std::abs(c.I_f_u) <= 1e-8);
  CHECK(std::abs(c.bound1) <= 1e-8);
  CHECK(topology_verdict(c, strong_stability_verdict(s.spec)) == TopologyVerdict::DiskOrCylinder);
}

TEST_CASE("closed product torus") {
  const Setup s = make(product_space({L, L}, linear_density(Vec3(1, 0, 0), 0.0)),
                       product_torus_immersion(0, L, L), 8);
  const ChainReport c = stability_topology_chain(s.space, s.mesh, s.data, s.a);
  CHECK(c.pass);
  CHECK(topology_verdict(c, strong_stability_verdict(s.spec)) == TopologyVerdict::SphereOrTorus);
}

TEST_CASE("sphere of radius 2 outside the unit ball, psi = -2 log r") {
  SphereOptions o;
  o.radius = 2.0;
  const Setup s = make(euclidean_space(radial_log_density(-2.0), ball_complement_boundary()),
                       sphere_immersion(o), 8);
  const ChainReport c = stability_topology_chain(s.space, s.mesh, s.data, s.a);
  CHECK(c.chi == 2);
  CHECK(c.hypotheses_hold);
  CHECK(topology_verdict(c, strong_stability_verdict(s.spec)) == TopologyVerdict::SphereOrTorus);
}

TEST_CASE("unstable or hypothesis-violating surfaces get no verdict") {
  const Setup s =
      make(euclidean_space(gaussian_density(), half_space_boundary()), hemisphere_immersion(), 8);
  const ChainReport c = stability_topology_chain(s.space, s.mesh, s.data, s.a);
  CHECK_FALSE(strong_stability_verdict(s.spec));
  CHECK(topology_verdict(c, false) == TopologyVerdict::NotApplicable);
  CHECK(std::string(to_string(TopologyVerdict::DiskOrCylinder)) == "DiskOrCylinder");
}

TEST_CASE("area bound for the disk in a solid cylinder") {
  const Setup s = make(euclidean_space(gaussian_density(Vec3(1, 1, 0)), cylinder_boundary(0.5)),
                       disk_immersion(Vec3::Zero(), 0.5), 12);
  const AreaBoundReport r = area_bound_check(s.space, s.mesh, s.data, 6.0, true, true);
  // A_f = int_0^{1/2} e^{-r^2} 2 pi r dr.
  CHECK(r.area == doctest::Approx(oracle::pi * (1 - std::exp(-0.25))).epsilon(1e-4));
  CHECK(r.chi == 1);
  CHECK(r.status == BoundStatus::Pass);
  CHECK(r.slack > 0.0);
  CHECK_THROWS_AS(area_bound_check(s.space, s.mesh, s.data, 0.0, true, true), InputError);
}

TEST_CASE("area bound with S0 < 0 needs negative chi") {
  const Setup s = product_slice(linear_density(Vec3(1, 0, 0), 0.0));
  const AreaBoundReport r = area_bound_check(s.space, s.mesh, s.data, -1.0, true, true);
  CHECK(r.status == BoundStatus::NotApplicable);
  CHECK(r.area == doctest::Approx(2 * L).epsilon(1e-10));
}

TEST_CASE("rigidity flags") {
  SUBCASE("weighted product slice") {
    const Setup s = product_slice(linear_density(Vec3(1, 0, 0), 0.0));
    CHECK(rigidity_flags(s.space, s.mesh, s.data).all());
  }
  SUBCASE("unweighted product slice") {
    const Setup s = product_slice(constant_density());
    CHECK(rigidity_flags(s.space, s.mesh, s.data).all());
  }
  SUBCASE("half-sphere is not totally geodesic") {
    const Setup s =
        make(euclidean_space(constant_density(), half_space_boundary()), hemisphere_immersion(), 8);
    const RigidityFlags f = rigidity_flags(s.space, s.mesh, s.data);
    CHECK_FALSE(f.totally_geodesic);
    CHECK_FALSE(f.all());
    CHECK(f.max_sigma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  }
}

TEST_CASE("foliation identity for slices") {
  SUBCASE("psi = s: H_f constant along the family") {
    const Setup s = product_slice(linear_density(Vec3(1, 0, 0), 0.0));
    const DeformedFamily fam =
        make_family(s.space, s.mesh, translation_field(Vec3(1, 0, 0)), {-0.5, 0.0, 0.5});
    const FoliationReport r = foliation_monotonicity_check(s.space, fam);
    CHECK(r.pass);
    for (const FoliationSlice& sl : r.slices) CHECK(std::abs(sl.dH_f) <= 1e-8);
  }
  SUBCASE("psi = s^2/2: the identity holds with H_f = -s") {
    const Setup s = product_slice(gaussian_density(Vec3(-0.5, 0, 0)));
    const DeformedFamily fam =
        make_family(s.space, s.mesh, translation_field(Vec3(1, 0, 0)), {-0.3, 0.0, 0.3});
    const FoliationReport r = foliation_monotonicity_check(s.space, fam);
    CHECK(r.pass);
    CHECK(r.max_rel_residual <= 1e-4);
    for (const FoliationSlice& sl : r.slices) {
      CHECK(sl.H_f == doctest::Approx(-sl.s).epsilon(1e-8));
      CHECK(sl.dH_f == doctest::Approx(-1.0).epsilon(1e-4));
    }
  }
}
