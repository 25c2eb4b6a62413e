#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "mcps/error.hpp"
#include "mcps/fields.hpp"
#include "test_support.hpp"

using namespace mcps;

TEST_CASE("T Sigma projection and basis") {
  const Eigen::MatrixXd p = tsigma_projector(4);
  CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((p * Eigen::VectorXd::Ones(4)).norm() < 1e-15);
  const Eigen::MatrixXd b = tsigma_basis(4);
  CHECK(b.cols() == 3);
  CHECK((b.transpose() * b - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((b.transpose() * Eigen::VectorXd::Ones(4)).norm() < 1e-14);
  const Eigen::Vector4d v(1, 2, 3, 10);
  CHECK((project_tsigma(Eigen::VectorXd(v)) - p * v).norm() < 1e-14);
}

TEST_CASE("mobility validation and coercivity against a dense eigenvalue") {
  Eigen::MatrixXd l(3, 3);
  l << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  const Mobility m = validate_mobility(l);
  const Eigen::MatrixXd b = tsigma_basis(3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b.transpose() * l * b);
  CHECK(m.coercivity() == doctest::Approx(eig.eigenvalues().minCoeff()).epsilon(1e-13));
  CHECK((l * m.restricted_inverse() - tsigma_projector(3)).cwiseAbs().maxCoeff() < 1e-13);

  Eigen::MatrixXd asym = l;
  asym(0, 1) = -0.5;
  asym(0, 0) = 1.5;
  CHECK_THROWS_AS(validate_mobility(asym), ValidationError);
  Eigen::MatrixXd rows = l;
  rows(0, 0) = 2.1;
  CHECK_THROWS_AS(validate_mobility(rows), ValidationError);
  CHECK_THROWS_AS(validate_mobility(Eigen::MatrixXd::Identity(2, 3)), ValidationError);
}

TEST_CASE("model parameter validation") {
  ModelParams p = ModelParams::defaults();
  CHECK_NOTHROW(p.validate());
  CHECK(p.auto_stabilization() == doctest::Approx(0.01 / (0.2 * 1e-3)));
  ModelParams bad = p;
  bad.kappa = -1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  bad = p;
  bad.alpha(0) += 0.1;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  bad = p;
  bad.h = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("initial phase respects simplex, mass and margin") {
  const ModelParams p = ModelParams::defaults();
  SphereTransform tr(12, 1.0);
  InitOptions io;
  io.amplitude = 5.0;  // forces rescaling
  io.margin = 0.1;
  const InitResult r = init_phase(p, tr, io);
  CHECK(r.applied_scale < 1.0);
  const Eigen::MatrixXd g = r.phi.grid(tr);
  CHECK(g.minCoeff() >= 0.1 - 1e-12);
  CHECK((g.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-13);
  for (int i = 0; i < 3; ++i) {
    const Eigen::VectorXd col = g.col(i);
    CHECK(tr.integrate(test::span_of(col)) / tr.basis().area() == doctest::Approx(p.alpha(i)).epsilon(1e-13));
  }
  // Degrees above l_init are empty.
  const auto first_unused = static_cast<Eigen::Index>(mode_count(io.l_init));
  CHECK(r.phi.coeffs.coeffs.bottomRows(r.phi.coeffs.coeffs.rows() - first_unused).cwiseAbs().maxCoeff() == 0.0);
  InitOptions other = io;
  other.seed = 2;
  CHECK(init_phase(p, tr, other).phi.coeffs.coeffs != r.phi.coeffs.coeffs);
}

TEST_CASE("random deformation lies in K2 with the requested norm") {
  const HarmonicBasis basis = HarmonicBasis::build(10, 1.5);
  const Deformation u = random_deformation(basis, 5, 0.3, 11);
  CHECK(u.k2_leak() == 0.0);
  CHECK(l2_norm(u.u) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(u.u.coeffs.tail(u.u.coeffs.size() - static_cast<Eigen::Index>(mode_count(5))).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("weighted inverse Laplacian solves lambda_l L f = g per mode") {
  Eigen::MatrixXd l(3, 3);
  l << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  const Mobility m = validate_mobility(l);
  const HarmonicBasis basis = HarmonicBasis::build(6, 1.2);
  VectorSpectralField g = VectorSpectralField::zero(6, 3);
  for (int c = 0; c < 3; ++c) g.coeffs.col(c) = test::random_field(6, 20 + c, 1).coeffs;
  g = project_tsigma(g);
  const VectorSpectralField f = weighted_inv_laplacian(g, m, basis);
  double worst = 0.0;
  for (Eigen::Index k = 1; k < g.coeffs.rows(); ++k) {
    const double lam = basis.mode_eigenvalues()(k);
    const Eigen::VectorXd lhs = lam * l * f.coeffs.row(k).transpose();
    worst = std::max(worst, (lhs - g.coeffs.row(k).transpose()).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-13);
  CHECK(f.coeffs.row(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(hminus1_norm_squared(g, m, basis) == doctest::Approx((g.coeffs.array() * f.coeffs.array()).sum()).epsilon(1e-13));

  VectorSpectralField off = g;
  off.coeffs(3, 0) += 1.0;  // leaves T Sigma
  CHECK_THROWS_AS(weighted_inv_laplacian(off, m, basis), ConstraintError);
}
