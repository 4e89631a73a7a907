#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "wstab/ambient.hpp"
#include "wstab/errors.hpp"
#include "wstab/expression.hpp"

using namespace wstab;

namespace {
std::vector<Vec3> random_points(int n, double lo, double hi, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Vec3> out;
  while (static_cast<int>(out.size()) < n) {
    Vec3 p(u(rng), u(rng), u(rng));
    if (p.norm() > 0.2) out.push_back(p);
  }
  return out;
}
}  // namespace

TEST_CASE("gaussian density curvature closed forms") {
  const AmbientSpace s = euclidean_space(gaussian_density());
  for (const Vec3& p : random_points(50, -2, 2, 1)) {
    const Vec3 v = p.cross(Vec3(0.3, -1, 2)).normalized();
    CHECK(bakry_emery_ricci(s, p, v) == doctest::Approx(oracle::gaussian_ric(v.squaredNorm())).epsilon(1e-12));
    CHECK(std::abs(perelman_scalar(s, p) - oracle::gaussian_scalar(p.squaredNorm())) <= 1e-10);
  }
}

TEST_CASE("radial log density scalar curvature and boundary f-mean curvature") {
  for (double k : {-3.0, -2.0, -1.0, 0.5}) {
    for (double r : {0.5, 1.0, 2.0}) {
      const AmbientSpace s =
          euclidean_space(radial_log_density(k), ball_complement_boundary(Vec3::Zero(), r));
      for (const Vec3& q : random_points(10, -1, 1, 7)) {
        const Vec3 p = r * q.normalized();
        CHECK(std::abs(perelman_scalar(s, p) - oracle::radial_log_scalar(k, r)) <= 1e-10);
        CHECK(std::abs(boundary_f_mean_curvature(s, p) - oracle::radial_log_boundary_Hf(k, r)) <=
              1e-10);
      }
    }
  }
}

TEST_CASE("density callbacks are consistent with their derivatives") {
  const std::vector<Vec3> pts = random_points(20, -1.5, 1.5, 3);
  for (const Density& d : {constant_density(2.0), gaussian_density(Vec3(1, 0.5, 2)),
                           radial_log_density(-2.5), linear_density(Vec3(1, -2, 0.5), 0.3),
                           radial_smooth_density({0.1, 0.0, 0.5, 0.0, -0.2})}) {
    const ResidualReport r = density_consistency_check(euclidean_space(d), pts);
    CHECK_MESSAGE(r.pass, d.name);
  }
}

TEST_CASE("flat spaces have zero curvature and consistent scalar trace") {
  const AmbientSpace s = euclidean_space(constant_density());
  const CurvatureCheck c = curvature_consistency_check(s, random_points(5, -1, 1, 5));
  CHECK(c.pass);
  CHECK(bakry_emery_ricci(s, Vec3(1, 2, 3), Vec3(0, 1, 0)) == 0.0);
}

TEST_CASE("boundary inner normals point into M") {
  const BoundarySpec specs[] = {half_space_boundary(), slab_boundary(2, 1.0), ball_boundary(),
                                ball_complement_boundary(), cone_boundary(M_PI / 3),
                                cylinder_boundary(0.5)};
  const Vec3 on[] = {Vec3(0.3, 0.2, 0), Vec3(0.1, 0.2, 1), Vec3(0, 0.6, 0.8), Vec3(0.6, 0, 0.8),
                     Vec3(std::sin(M_PI / 3), 0, std::cos(M_PI / 3)), Vec3(0.5, 0, 0.7)};
  for (int i = 0; i < 6; ++i) {
    const AmbientSpace s = euclidean_space(constant_density(), specs[i]);
    CHECK(std::abs(s.boundary->phi(on[i])) < 1e-12);
    const BoundaryCheck b = boundary_check(s, {on[i]});
    CHECK_MESSAGE(b.inner_normal_ok, specs[i].name);
    CHECK(b.min_grad_norm > 0.0);
  }
}

TEST_CASE("degenerate boundary gradient is reported") {
  const AmbientSpace s = euclidean_space(constant_density(), cone_boundary(M_PI / 4));
  CHECK_THROWS_AS(boundary_check(s, {Vec3::Zero()}), SingularBoundaryError);
}

TEST_CASE("product space callbacks see the fundamental domain") {
  const double L = 2.0;
  const AmbientSpace s = product_space({L}, gaussian_density(), slab_boundary(2, 1.0));
  const Vec3 p(0.3, 0.4, 0.2);
  CHECK(s.density.psi(p) == doctest::Approx(s.density.psi(p + Vec3(0, 3 * L, 0))));
  CHECK(s.boundary->phi(p) == doctest::Approx(s.boundary->phi(p - Vec3(0, L, 0))));
  CHECK_THROWS_AS(product_space({}, constant_density()), InputError);
  CHECK_THROWS_AS(product_space({-1.0}, constant_density()), InputError);
}

TEST_CASE("constant density must be positive") {
  CHECK_THROWS_AS(constant_density(0.0), InputError);
}

TEST_CASE("expressions evaluate with exact jets") {
  const Expression e = Expression::parse("r*sin(u)*cos(v) + u^2 - 3*v/2", {{"r", 2.0}});
  const double u = 0.7, v = -0.4;
  CHECK(e.eval(u, v) == doctest::Approx(2 * std::sin(u) * std::cos(v) + u * u - 1.5 * v));
  const J2 ju = J2::variable(u, 0), jv = J2::variable(v, 1);
  const J2 r = e.eval(ju, jv);
  CHECK(r.d[0] == doctest::Approx(2 * std::cos(u) * std::cos(v) + 2 * u));
  CHECK(r.d[1] == doctest::Approx(-2 * std::sin(u) * std::sin(v) - 1.5));
  CHECK(r.h[0] == doctest::Approx(-2 * std::sin(u) * std::cos(v) + 2));
  CHECK(r.h[1] == doctest::Approx(-2 * std::cos(u) * std::sin(v)));
  CHECK(r.h[2] == doctest::Approx(-2 * std::sin(u) * std::cos(v)));
}

TEST_CASE("expression grammar") {
  CHECK(Expression::parse("-2^2").eval(0.0, 0.0) == doctest::Approx(-4));
  CHECK(Expression::parse("2^3^2").eval(0.0, 0.0) == doctest::Approx(512));
  CHECK(Expression::parse("atan2(1, 1)*4").eval(0.0, 0.0) == doctest::Approx(oracle::pi));
  CHECK(Expression::parse("u^v").eval(2.0, 3.0) == doctest::Approx(8));
  CHECK(Expression::parse("sqrt(u*u + v*v)").eval(3.0, 4.0) == doctest::Approx(5));
  CHECK_THROWS_AS(Expression::parse("sin(u"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("w + 1"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("1 +"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("u v"), ConfigError);
  try {
    Expression::parse("u + foo");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
}
