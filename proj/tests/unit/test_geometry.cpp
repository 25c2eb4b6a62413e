#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mcps/error.hpp"
#include "mcps/geometry.hpp"
#include "test_support.hpp"

using namespace mcps;

namespace {

constexpr double kPi = std::numbers::pi;

struct Revolution {
  double area = 0.0;
  double volume = 0.0;
  double willmore = 0.0;
  double mean_curvature_integral = 0.0;  ///< int H dA with H = 2/R on a sphere
};

// Surface of revolution r(t) = R + rho c (3 cos^2 t - 1) integrated over the
// colatitude with a 1D Gauss-Legendre rule.
Revolution revolve(double radius, double rho, double c) {
  std::vector<double> x, w;
  gauss_legendre(400, x, w);
  Revolution out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = 0.5 * kPi * (x[i] + 1.0);
    const double wt = 0.5 * kPi * w[i];
    const double ct = std::cos(t), st = std::sin(t);
    const double r = radius + rho * c * (3 * ct * ct - 1);
    const double rt = -6 * rho * c * ct * st;
    const double rtt = -6 * rho * c * std::cos(2 * t);
    const double px = r * st, pz = r * ct;
    const double dx = rt * st + r * ct, dz = rt * ct - r * st;
    const double ddx = rtt * st + 2 * rt * ct - r * st;
    const double ddz = rtt * ct - 2 * rt * st - r * ct;
    const double speed = std::hypot(dx, dz);
    const double k1 = (dx * ddz - dz * ddx) / (speed * speed * speed);
    const double k2 = dz / (px * speed);
    const double h = -(k1 + k2);
    const double da = 2 * kPi * px * speed * wt;
    out.area += da;
    out.volume += 2 * kPi / 3 * r * r * r * st * wt;
    out.willmore += 0.5 * h * h * da;
    out.mean_curvature_integral += h * da;
  }
  return out;
}

}  // namespace

TEST_CASE("functionals of an axisymmetric deformation match a surface-of-revolution quadrature") {
  ModelParams p = ModelParams::defaults();
  p.radius = 1.3;
  SphereTransform tr(16, p.radius);
  GeometryKernel kernel(tr);
  const double c = 0.4;
  // u = c (3z^2 - 1) on the parameter sphere.
  const SpectralField u = tr.analysis(test::span_of(
      test::on_grid(tr.grid(), [&](double, double, double z) { return c * (3 * z * z - 1); })));
  const PhaseField phi = homogeneous_phase(p, tr.basis());
  for (double rho : {0.05, 0.2}) {
    const SurfaceFunctionals f = kernel.evaluate(u, rho, phi, p);
    const Revolution ref = revolve(p.radius, rho, 1.0 * c);
    CHECK(f.area == doctest::Approx(ref.area).epsilon(1e-11));
    CHECK(f.volume == doctest::Approx(ref.volume).epsilon(1e-11));
    CHECK(f.willmore == doctest::Approx(ref.willmore).epsilon(1e-9));
    CHECK(f.f1 == doctest::Approx(-p.lambda.dot(p.alpha) * ref.mean_curvature_integral).epsilon(1e-9));
    CHECK(f.gauss == doctest::Approx(4 * kPi).epsilon(1e-10));
    CHECK(f.min_radius == doctest::Approx(p.radius - rho * c).epsilon(1e-3));
  }
}

TEST_CASE("lagrangian and closed-form constants") {
  ModelParams p = ModelParams::defaults();
  p.radius = 0.8;
  p.sigma = 2.0;
  SurfaceFunctionals f;
  f.willmore = 30.0;
  f.area = 9.0;
  f.volume = 2.5;
  f.f1 = -3.0;
  f.f2 = 0.7;
  const double rho = 0.1, l1 = 1.5;
  const double v0 = 4 * kPi * std::pow(p.radius, 3) / 3;
  const double expected = p.kappa * 30.0 + p.sigma * 9.0 + (-2 * p.sigma / p.radius + rho * l1) * (2.5 - v0) +
                          rho * p.kappa * -3.0 + rho * rho * 0.7;
  CHECK(lagrangian(f, p, rho, l1) == doctest::Approx(expected).epsilon(1e-14));
  const double area = 4 * kPi * p.radius * p.radius;
  CHECK(taylor_c1(p) == doctest::Approx((2 * p.kappa / (p.radius * p.radius) + p.sigma) * area));
  CHECK(taylor_c2_printed(p) == doctest::Approx(-2 * p.kappa / p.radius * p.lambda.dot(p.alpha)));
  CHECK(taylor_c2_area(p) == doctest::Approx(area * taylor_c2_printed(p)));
}

TEST_CASE("the kernel rejects folded surfaces") {
  const ModelParams p = ModelParams::defaults();
  SphereTransform tr(8, 1.0);
  GeometryKernel kernel(tr);
  SpectralField u = SpectralField::zero(8);
  u(2, 0) = 1.0;
  const PhaseField phi = homogeneous_phase(p, tr.basis());
  CHECK_THROWS_AS(kernel.evaluate(u, 10.0, phi, p), EmbeddingError);
}

TEST_CASE("variation report covers the seven formulas and F1") {
  const ModelParams p = ModelParams::defaults();
  SphereTransform small(8, 1.0), big(16, 1.0);
  GeometryKernel kernel(big);
  const Deformation u = random_deformation(small.basis(), 4, 0.2, 1);
  const PhaseField phi = homogeneous_phase(p, small.basis());
  const VariationReport r = variation_check(kernel, u.u, phi, p);
  REQUIRE(r.entries.size() == 7);
  for (const VariationEntry& e : r.entries) CHECK_MESSAGE(e.error / e.scale < 1e-6, e.name);
}

TEST_CASE("logspace endpoints and spacing") {
  const std::vector<double> v = logspace(1e-3, 1e-1, 5);
  REQUIRE(v.size() == 5);
  CHECK(v.front() == doctest::Approx(1e-3));
  CHECK(v.back() == doctest::Approx(1e-1));
  CHECK(v[2] == doctest::Approx(1e-2));
}
