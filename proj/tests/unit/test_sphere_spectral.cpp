#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "mcps/error.hpp"
#include "mcps/sphere_spectral.hpp"
#include "test_support.hpp"

using namespace mcps;
using mcps::test::on_grid;
using mcps::test::span_of;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("gauss_legendre: three-point rule and polynomial exactness") {
  std::vector<double> x, w;
  gauss_legendre(3, x, w);
  CHECK(x[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
  CHECK(std::abs(x[1]) < 1e-15);
  CHECK(w[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(w[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));

  gauss_legendre(20, x, w);
  for (int p = 0; p <= 39; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], p);
    const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
    CHECK(std::abs(s - exact) < 1e-14);
  }
}

TEST_CASE("harmonics agree with std::sph_legendre up to a sign per mode") {
  const double radius = 1.7;
  SphereTransform tr(10, radius);
  const QuadratureGrid& g = tr.grid();
  for (int l = 0; l <= 10; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int am = std::abs(m);
      std::vector<std::pair<double, double>> pairs;
      double dot = 0.0;
      for (int j = 0; j < g.nlat(); j += 3) {
        for (int k = 0; k < g.nlon(); k += 5) {
          const double p = g.longitude(k);
          double y = std::sph_legendre(static_cast<unsigned>(l), static_cast<unsigned>(am), g.colatitude(j)) / radius;
          if (m > 0) y *= std::sqrt(2.0) * std::cos(m * p);
          if (m < 0) y *= std::sqrt(2.0) * std::sin(am * p);
          const double v = tr.harmonic(l, m, j, k);
          pairs.emplace_back(v, y);
          dot += v * y;
        }
      }
      // The library may omit the Condon-Shortley phase.
      const double sign = dot < 0.0 ? -1.0 : 1.0;
      double worst = 0.0;
      for (const auto& [v, y] : pairs) worst = std::max(worst, std::abs(v - sign * y));
      CHECK_MESSAGE(worst < 1e-12, "l=" << l << " m=" << m);
    }
  }
}

TEST_CASE("orthonormal Gram matrix by quadrature") {
  SphereTransform tr(9, 1.3);
  const auto n = static_cast<Eigen::Index>(tr.basis().size());
  Eigen::MatrixXd y(static_cast<Eigen::Index>(tr.grid().size()), n);
  for (Eigen::Index c = 0; c < n; ++c) {
    SpectralField e = SpectralField::zero(9);
    e.coeffs(c) = 1.0;
    y.col(c) = tr.synthesis(e);
  }
  Eigen::VectorXd w(y.rows());
  for (int j = 0; j < tr.grid().nlat(); ++j) {
    for (int k = 0; k < tr.grid().nlon(); ++k) w(static_cast<Eigen::Index>(tr.grid().index(j, k))) = tr.grid().weight(j);
  }
  const Eigen::MatrixXd gram = y.transpose() * w.asDiagonal() * y;
  CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(tr.grid().total_weight() == doctest::Approx(4.0 * kPi * 1.3 * 1.3).epsilon(1e-14));
}

TEST_CASE("analysis inverts synthesis on band-limited fields") {
  SphereTransform tr(16, 1.0);
  const SpectralField f = test::random_field(16, 3);
  const SpectralField back = tr.analysis(span_of(tr.synthesis(f)));
  CHECK((back.coeffs - f.coeffs).cwiseAbs().maxCoeff() < 1e-13);

  VectorSpectralField v{16, Eigen::MatrixXd(f.coeffs.size(), 2)};
  v.coeffs.col(0) = f.coeffs;
  v.coeffs.col(1) = test::random_field(16, 4).coeffs;
  CHECK((tr.analysis(tr.synthesis(v)).coeffs - v.coeffs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Laplace-Beltrami on explicit polynomials") {
  const double radius = 2.0;
  SphereTransform tr(6, radius);
  const QuadratureGrid& g = tr.grid();
  // xy is a degree-2 harmonic polynomial; z^2 = (z^2 - 1/3) + 1/3; x^3 - 3xy^2 is degree 3.
  struct Case {
    std::function<double(double, double, double)> f;
    std::function<double(double, double, double)> lap;
  };
  const double r2 = radius * radius;
  const std::vector<Case> cases = {
      {[](double x, double y, double) { return x * y; }, [&](double x, double y, double) { return -6.0 * x * y / r2; }},
      {[](double, double, double z) { return z * z; }, [&](double, double, double z) { return -6.0 * (z * z - 1.0 / 3.0) / r2; }},
      {[](double x, double y, double) { return x * x * x - 3.0 * x * y * y; },
       [&](double x, double y, double) { return -12.0 * (x * x * x - 3.0 * x * y * y) / r2; }},
  };
  for (const Case& c : cases) {
    const SpectralField f = tr.analysis(span_of(on_grid(g, c.f)));
    const Eigen::VectorXd lap = tr.synthesis(laplace_beltrami(f, tr.basis()));
    CHECK((lap - on_grid(g, c.lap)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("angular derivatives of explicit functions") {
  SphereTransform tr(5, 1.0);
  const QuadratureGrid& g = tr.grid();
  // f = x z = sin t cos t cos p
  const SpectralField f = tr.analysis(span_of(on_grid(g, [](double x, double, double z) { return x * z; })));
  const SphereTransform::Derivatives d = tr.synthesis_with_derivatives(f);
  double worst = 0.0;
  for (int j = 0; j < g.nlat(); ++j) {
    const double t = g.colatitude(j);
    for (int k = 0; k < g.nlon(); ++k) {
      const double p = g.longitude(k);
      const auto i = static_cast<Eigen::Index>(g.index(j, k));
      worst = std::max(worst, std::abs(d.d_theta(i) - std::cos(2 * t) * std::cos(p)));
      worst = std::max(worst, std::abs(d.d_phi(i) + 0.5 * std::sin(2 * t) * std::sin(p)));
      worst = std::max(worst, std::abs(d.d_theta_theta(i) + 2.0 * std::sin(2 * t) * std::cos(p)));
      worst = std::max(worst, std::abs(d.d_theta_phi(i) + std::cos(2 * t) * std::sin(p)));
      worst = std::max(worst, std::abs(d.d_phi_phi(i) + 0.5 * std::sin(2 * t) * std::cos(p)));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("project_k2 matches a dense projection onto span{1, x, y, z}") {
  SphereTransform tr(8, 1.0);
  const QuadratureGrid& g = tr.grid();
  const SpectralField f = test::random_field(8, 9);
  const Eigen::VectorXd fv = tr.synthesis(f);
  Eigen::MatrixXd basis(fv.size(), 4);
  basis.col(0) = on_grid(g, [](double, double, double) { return 1.0; });
  basis.col(1) = on_grid(g, [](double x, double, double) { return x; });
  basis.col(2) = on_grid(g, [](double, double y, double) { return y; });
  basis.col(3) = on_grid(g, [](double, double, double z) { return z; });
  Eigen::VectorXd w(fv.size());
  for (int j = 0; j < g.nlat(); ++j) {
    for (int k = 0; k < g.nlon(); ++k) w(static_cast<Eigen::Index>(g.index(j, k))) = g.weight(j);
  }
  const Eigen::MatrixXd gram = basis.transpose() * w.asDiagonal() * basis;
  const Eigen::VectorXd c = gram.ldlt().solve(basis.transpose() * w.asDiagonal() * fv);
  const Eigen::VectorXd dense = fv - basis * c;
  CHECK((tr.synthesis(project_k2(f)) - dense).cwiseAbs().maxCoeff() < 1e-12);
  const SpectralField mf = project_mean_free(f);
  CHECK(std::abs(tr.integrate(span_of(tr.synthesis(mf)))) < 1e-13);
}

TEST_CASE("norms agree with grid quadrature") {
  const double radius = 1.4;
  SphereTransform tr(10, radius);
  const QuadratureGrid& g = tr.grid();
  const SpectralField f = test::random_field(10, 5);
  const SphereTransform::Derivatives d = tr.synthesis_with_derivatives(f);
  Eigen::VectorXd g2(d.value.size());
  for (int j = 0; j < g.nlat(); ++j) {
    const double s = std::sin(g.colatitude(j));
    for (int k = 0; k < g.nlon(); ++k) {
      const auto i = static_cast<Eigen::Index>(g.index(j, k));
      g2(i) = (d.d_theta(i) * d.d_theta(i) + d.d_phi(i) * d.d_phi(i) / (s * s)) / (radius * radius);
    }
  }
  const Eigen::VectorXd f2 = d.value.array().square();
  const Eigen::VectorXd l2 = tr.synthesis(laplace_beltrami(f, tr.basis())).array().square();
  CHECK(l2_norm(f) == doctest::Approx(std::sqrt(tr.integrate(span_of(f2)))).epsilon(1e-12));
  CHECK(h1_seminorm(f, tr.basis()) == doctest::Approx(std::sqrt(tr.integrate(span_of(g2)))).epsilon(1e-12));
  CHECK(h2_seminorm(f, tr.basis()) == doctest::Approx(std::sqrt(tr.integrate(span_of(l2)))).epsilon(1e-12));
  CHECK(mean_value(f, tr.basis()) == doctest::Approx(tr.integrate(span_of(d.value)) / tr.basis().area()).epsilon(1e-12));
  CHECK(inner(f, f) == doctest::Approx(l2_norm(f) * l2_norm(f)));
}

TEST_CASE("resized pads with zeros and truncates") {
  const SpectralField f = test::random_field(4, 1);
  const SpectralField big = resized(f, 7);
  CHECK(big.coeffs.head(f.coeffs.size()) == f.coeffs);
  CHECK(big.coeffs.tail(big.coeffs.size() - f.coeffs.size()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(resized(big, 4).coeffs == f.coeffs);
}

TEST_CASE("invalid shapes and parameters are rejected") {
  CHECK_THROWS_AS(HarmonicBasis::build(1, 1.0), InvalidParameter);
  CHECK_THROWS_AS(HarmonicBasis::build(4, 0.0), InvalidParameter);
  CHECK_THROWS_AS(SphereTransform(HarmonicBasis::build(8, 1.0), QuadratureGrid(8, 16, 1.0)), ShapeError);
  SphereTransform tr(4, 1.0);
  const Eigen::VectorXd wrong = Eigen::VectorXd::Zero(7);
  CHECK_THROWS_AS(tr.analysis(span_of(wrong)), ShapeError);
  CHECK_THROWS_AS(tr.synthesis(SpectralField::zero(6)), ShapeError);
}
