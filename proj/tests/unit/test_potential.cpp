#include <doctest.h>

#include <cmath>

#include "mcps/error.hpp"
#include "mcps/potential.hpp"
#include "mcps/random.hpp"

using namespace mcps;

namespace {

// r + h T(r) = s by plain bisection in long double; independent of the
// library's safeguarded Newton.
long double bisect_resolvent(const Entropy& psi, long double s, long double h) {
  auto g = [&](long double r) { return r + h * static_cast<long double>(psi.derivative(static_cast<double>(r))); };
  long double lo = 0.0L;
  long double hi = 1.0L;
  if (psi.domain() == YosidaDomain::Extended) hi = std::max(1.0L, s) + 1.0L;
  if (psi.domain() == YosidaDomain::UnitInterval && s >= 1.0L + h) return 1.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (mid <= 0.0L || g(mid) < s) lo = mid; else hi = mid;
  }
  return 0.5L * (lo + hi);
}

// Moreau envelope min_r psi(r) + (s - r)^2 / (2h) by golden-section search.
double envelope(const Entropy& psi, double s, double h, double lo, double hi) {
  auto f = [&](double r) { return psi.value(r) + (s - r) * (s - r) / (2.0 * h); };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  for (int i = 0; i < 200; ++i) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    if (f(c) < f(d)) b = d; else a = c;
  }
  return f(0.5 * (a + b));
}

}  // namespace

TEST_CASE("entropy values, derivatives and the cubic extension") {
  const Entropy psi;
  CHECK(psi.value(0.5) == doctest::Approx(0.5 * std::log(0.5)).epsilon(1e-15));
  CHECK(psi.derivative(0.3) == doctest::Approx(std::log(0.3) + 1.0));
  CHECK(psi.second_derivative(0.25) == doctest::Approx(4.0));
  // C2 matching at s = 1: both branches follow s - 1 + (s - 1)^2 / 2 to second order.
  for (double e : {1e-4, -1e-4}) {
    CHECK(std::abs(psi.value(1.0 + e) - (e + 0.5 * e * e)) < 1e-12);
    CHECK(std::abs(psi.derivative(1.0 + e) - (1.0 + e)) < 1e-7);
    CHECK(std::abs(psi.second_derivative(1.0 + e) - 1.0) < 1e-3);
  }
  const ExtensionCoefficients c = cubic_extension(0.0, 1.0, 1.0);
  CHECK(c.a + c.b + c.d == doctest::Approx(0.0));
  CHECK(3 * c.a + 2 * c.b + c.d == doctest::Approx(1.0));
  CHECK(6 * c.a + 2 * c.b == doctest::Approx(1.0));
  // Convexity is lost past 4/3.
  CHECK(psi.second_derivative(1.5) < 0.0);
  CHECK_THROWS_AS(psi.derivative(-1.0), DomainError);
  CHECK_THROWS_AS(psi.value(std::nan("")), DomainError);
}

TEST_CASE("resolvent agrees with bisection on both domains") {
  CounterRng rng(2, 1);
  for (YosidaDomain dom : {YosidaDomain::UnitInterval, YosidaDomain::Extended}) {
    const Entropy psi(dom);
    for (int k = 0; k < 500; ++k) {
      const double h = std::pow(10.0, rng.uniform(-5.0, -1.0));
      const double hi = dom == YosidaDomain::Extended ? 1.25 : 2.0;
      const double s = rng.uniform(-0.5, hi);
      const double got = psi.resolvent(s, h).value;
      const auto ref = static_cast<double>(bisect_resolvent(psi, s, h));
      CHECK_MESSAGE(std::abs(got - ref) <= 1e-12 * std::max(1.0, ref) + 1e-300, "s=" << s << " h=" << h);
    }
  }
  const Entropy psi;
  CHECK_THROWS_AS(psi.resolvent(0.5, 0.0), InvalidParameter);
  CHECK_THROWS_AS(psi.resolvent(INFINITY, 0.1), InvalidParameter);
  // Deep in the negative range the value underflows but the logarithm stays accurate.
  const Resolvent deep = psi.resolvent(-10.0, 0.01);
  CHECK(deep.log_value < -900.0);
  CHECK(std::exp(deep.log_value) + 0.01 * (deep.log_value + 1.0) == doctest::Approx(-10.0).epsilon(1e-12));
}

TEST_CASE("psi_h is the Moreau envelope and its derivatives match finite differences") {
  const Entropy psi;
  for (double h : {1e-1, 1e-2, 1e-3}) {
    for (double s : {0.05, 0.3, 0.8, 1.0, 1.0 + 0.5 * h}) {
      CHECK(psi.regularized(s, h) == doctest::Approx(envelope(psi, s, h, 1e-300, 1.0)).epsilon(1e-9));
    }
    for (double s : {-0.2, 0.1, 0.6, 1.3}) {
      const double d = 1e-6 * h;
      const double fd1 = (psi.regularized(s + d, h) - psi.regularized(s - d, h)) / (2 * d);
      CHECK(psi.regularized_derivative(s, h) == doctest::Approx(fd1).epsilon(1e-6));
      const double fd2 = (psi.regularized_derivative(s + d, h) - psi.regularized_derivative(s - d, h)) / (2 * d);
      CHECK(psi.regularized_second_derivative(s, h) == doctest::Approx(fd2).epsilon(1e-5));
    }
  }
  // Above 1 + h on the unit-interval domain psi_h is (s - 1)^2 / (2h).
  CHECK(psi.regularized(1.5, 0.1) == doctest::Approx(0.25 / 0.2).epsilon(1e-14));
  const Entropy::ValueAndSlope vs = psi.regularized_with_slope(0.4, 0.01);
  CHECK(vs.value == psi.regularized(0.4, 0.01));
  CHECK(vs.slope == psi.regularized_derivative(0.4, 0.01));
}

TEST_CASE("interaction matrix validation and multiwell gradient") {
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_AS(InteractionMatrix{asym}, ValidationError);
  CHECK_THROWS_AS(InteractionMatrix{-Eigen::MatrixXd::Identity(3, 3)}, ValidationError);
  const InteractionMatrix a = InteractionMatrix::uniform_off_diagonal(3, 2.0);
  CHECK(a.largest_eigenvalue() == doctest::Approx(4.0));

  const Entropy psi;
  const Eigen::Vector3d v(0.2, 0.5, 0.3);
  CHECK(multiwell(v, a, psi) ==
        doctest::Approx(0.2 * std::log(0.2) + 0.5 * std::log(0.5) + 0.3 * std::log(0.3) - 0.5 * v.dot(a.matrix() * v)));
  const double h = 1e-3;
  const auto [ent, inter] = multiwell_gradient(v, a, psi, h);
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(i) = 1e-6;
    const double fd = (multiwell_regularized(v + e, a, psi, h) - multiwell_regularized(v - e, a, psi, h)) / 2e-6;
    CHECK(ent(i) + inter(i) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK_THROWS_AS(multiwell(Eigen::Vector3d(0.0, 0.5, 0.5), a, psi), DomainError);
  CHECK_THROWS_AS(multiwell(Eigen::Vector2d(0.5, 0.5), a, psi), ShapeError);
}
