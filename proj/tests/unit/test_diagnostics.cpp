#include <doctest.h>

#include <cmath>

#include "mcps/diagnostics.hpp"
#include "mcps/error.hpp"
#include "mcps/fields.hpp"
#include "test_support.hpp"

using namespace mcps;

TEST_CASE("separation monitor extrema and delta") {
  Eigen::MatrixXd g(3, 3);
  g << 0.2, 0.3, 0.5, 0.1, 0.1, 0.8, 0.4, 0.4, 0.2;
  const SeparationReport r = separation_monitor(g, 1.5);
  CHECK(r.t == 1.5);
  CHECK(r.delta_min == doctest::Approx(0.1));
  CHECK(r.delta_max == doctest::Approx(0.8));
  CHECK(r.sep_delta == doctest::Approx(0.1));
  CHECK(r.component_min(2) == doctest::Approx(0.2));
  CHECK_FALSE(r.breakdown);
  g(0, 0) = -0.1;
  CHECK(separation_monitor(g).breakdown);
}

TEST_CASE("level-set measures agree with a brute-force count") {
  SphereTransform tr(8, 1.0);
  const QuadratureGrid& q = tr.grid();
  const ModelParams p = ModelParams::defaults();
  InitOptions io;
  io.amplitude = 0.2;
  const Eigen::MatrixXd g = init_phase(p, tr, io).phi.grid(tr);
  const double delta = 0.15;
  const LevelSetMeasures m = level_set_measures(g, q, delta, 4);
  REQUIRE(m.levels.size() == 5);
  for (int n = 0; n <= 4; ++n) {
    const double k = delta + delta / std::pow(2.0, n);
    CHECK(m.levels[static_cast<std::size_t>(n)] == doctest::Approx(k));
    for (int i = 0; i < 3; ++i) {
      double s = 0.0;
      for (int j = 0; j < q.nlat(); ++j) {
        for (int l = 0; l < q.nlon(); ++l) {
          if (g(static_cast<Eigen::Index>(q.index(j, l)), i) <= k) s += q.weight(j);
        }
      }
      CHECK(m.measure[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] == doctest::Approx(s).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS(level_set_measures(g, q, 0.5, 2), InvalidParameter);
  CHECK_THROWS_AS(level_set_measures(g, q, 0.0, 2), InvalidParameter);
}

TEST_CASE("De Giorgi recursion around the threshold") {
  const double c = 2.0, b = 3.0, gamma = 0.5;
  const double theta = std::pow(c, -1 / gamma) * std::pow(b, -1 / (gamma * gamma));
  const DeGiorgiResult at = degiorgi_decay(theta, c, b, gamma, 40);
  CHECK(at.theta == doctest::Approx(theta).epsilon(1e-14));
  CHECK(at.bound_holds);
  CHECK(at.tends_to_zero);
  const DeGiorgiResult below = degiorgi_decay(0.5 * theta, c, b, gamma, 40);
  CHECK(below.bound_holds);
  const DeGiorgiResult above = degiorgi_decay(1.5 * theta, c, b, gamma, 40);
  CHECK_FALSE(above.bound_holds);
  CHECK_FALSE(above.tends_to_zero);
  // Direct recursion for a few terms.
  const double y0 = 0.5 * theta;
  double y = y0;
  for (int n = 0; n < 5; ++n) {
    CHECK(std::exp(below.log_y[static_cast<std::size_t>(n)]) == doctest::Approx(y).epsilon(1e-12));
    y = c * std::pow(b, n) * std::pow(y, 1 + gamma);
  }
}

TEST_CASE("Lp norms by quadrature") {
  SphereTransform tr(6, 2.0);
  const double area = tr.basis().area();
  const Eigen::VectorXd ones = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(tr.grid().size()), 3.0);
  CHECK(lp_norm(ones, tr, 4.0) == doctest::Approx(3.0 * std::pow(area, 0.25)));
  const SpectralField f = test::random_field(6, 8);
  CHECK(lp_norm(tr.synthesis(f), tr, 2.0) == doctest::Approx(l2_norm(f)).epsilon(1e-12));
  const SobolevProbe probe = sobolev_constant_probe(tr, {2.0, 4.0}, 20, 3);
  REQUIRE(probe.constant.size() == 2);
  CHECK(probe.constant[0] > 0.0);
}
