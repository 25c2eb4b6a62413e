#include <doctest.h>

#include <cmath>

#include "mcps/config.hpp"
#include "mcps/dynamics.hpp"
#include "mcps/error.hpp"
#include "mcps/runner.hpp"
#include "test_support.hpp"

using namespace mcps;

namespace {

struct Fixture {
  ModelParams p = ModelParams::defaults();
  SphereTransform tr{10, 1.0};
  PhaseField phi;
  Deformation u;
  Fixture() {
    InitOptions io;
    io.amplitude = 0.15;
    phi = init_phase(p, tr, io).phi;
    u = random_deformation(tr.basis(), 4, 0.05, 3);
  }
};

// T Sigma-valued, mean-free direction.
VectorSpectralField admissible_direction(int lmax, std::uint64_t seed) {
  VectorSpectralField d = VectorSpectralField::zero(lmax, 3);
  for (int c = 0; c < 3; ++c) d.coeffs.col(c) = test::random_field(lmax, seed + c, 1, 5).coeffs;
  return project_tsigma(d);
}

}  // namespace

TEST_CASE("chemical potential against a dense evaluation of its definition") {
  Fixture f;
  const ModelParams& p = f.p;
  const ChemicalPotential cp = chemical_potential(f.phi, f.u, p, f.tr);
  const Eigen::MatrixXd g = f.phi.grid(f.tr);
  const Eigen::MatrixXd lap_phi = f.tr.synthesis(laplace_beltrami(f.phi.coeffs, f.tr.basis()));
  const Eigen::VectorXd ug = f.tr.synthesis(f.u.u);
  const Eigen::VectorXd lap_u = f.tr.synthesis(laplace_beltrami(f.u.u, f.tr.basis()));
  const Entropy psi = p.entropy();
  const double r2 = p.radius * p.radius;
  double worst = 0.0;
  for (Eigen::Index x = 0; x < g.rows(); ++x) {
    const Eigen::VectorXd v = g.row(x).transpose();
    Eigen::VectorXd dpsi(3);
    for (int i = 0; i < 3; ++i) dpsi(i) = psi.regularized_derivative(v(i), p.h);
    const Eigen::VectorXd mu = p.b / p.epsilon * (dpsi - p.interaction.matrix() * v) +
                               2.0 * p.kappa * ug(x) * p.lambda / r2 - p.b * p.epsilon * lap_phi.row(x).transpose() +
                               p.kappa * p.lambda.dot(v) * p.lambda + p.kappa * lap_u(x) * p.lambda;
    worst = std::max(worst, (mu - cp.mu_grid.row(x).transpose()).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-12);
  const Eigen::MatrixXd w = f.tr.synthesis(cp.w);
  CHECK((w.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("chemical potential is the phase gradient of the energy") {
  Fixture f;
  const ChemicalPotential cp = chemical_potential(f.phi, f.u, f.p, f.tr);
  const VectorSpectralField d = admissible_direction(10, 30);
  const double e = 1e-5;
  PhaseField plus = f.phi, minus = f.phi;
  plus.coeffs.coeffs += e * d.coeffs;
  minus.coeffs.coeffs -= e * d.coeffs;
  const double fd = (energy(plus, f.u, f.p, f.tr).total - energy(minus, f.u, f.p, f.tr).total) / (2 * e);
  const Eigen::MatrixXd dg = f.tr.synthesis(d);
  double pairing = 0.0;
  for (int c = 0; c < 3; ++c) {
    const Eigen::VectorXd prod = cp.mu_grid.col(c).cwiseProduct(dg.col(c));
    pairing += f.tr.integrate(test::span_of(prod));
  }
  CHECK(fd == doctest::Approx(pairing).epsilon(1e-7));
}

TEST_CASE("rhs_u is minus the shape gradient of the energy on K2") {
  Fixture f;
  const SpectralField rhs = rhs_u(f.phi, f.u, f.p, f.tr.basis());
  const SpectralField v = project_k2(test::random_field(10, 44, 2, 6));
  const double e = 1e-5;
  Deformation plus = f.u, minus = f.u;
  plus.u.coeffs += e * v.coeffs;
  minus.u.coeffs -= e * v.coeffs;
  const double fd = (energy(f.phi, plus, f.p, f.tr).total - energy(f.phi, minus, f.p, f.tr).total) / (2 * e);
  CHECK(fd == doctest::Approx(-inner(rhs, v)).epsilon(1e-7));
  CHECK(rhs.coeffs.head(4).cwiseAbs().maxCoeff() == 0.0);
  const SpectralField factored = rhs_u_factored(f.phi, f.u, f.p, f.tr.basis());
  CHECK((factored.coeffs - rhs.coeffs).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shared entropic evaluation reproduces the plain energy and step") {
  Fixture f;
  const EntropicEvaluation ev = evaluate_entropic(f.phi, f.p, f.tr);
  CHECK(energy(f.phi, f.u, f.p, f.tr.basis(), ev).total == doctest::Approx(energy(f.phi, f.u, f.p, f.tr).total).epsilon(1e-14));
  Stepper st(f.p, f.tr);
  const SimState s{0.0, 0, f.phi, f.u};
  const SimState a = st.step(s);
  const SimState b = st.step(s, ev);
  CHECK(a.phi.coeffs.coeffs == b.phi.coeffs.coeffs);
  CHECK(a.u.u.coeffs == b.u.u.coeffs);
}

TEST_CASE("one step conserves mass and the simplex and dissipates energy") {
  Fixture f;
  Stepper st(f.p, f.tr);
  SimState s{0.0, 0, f.phi, f.u};
  for (int n = 0; n < 20; ++n) {
    StepReport rep;
    const double e0 = energy(s.phi, s.u, f.p, f.tr).total;
    SimState next = st.step(s, &rep);
    const double e1 = energy(next.phi, next.u, f.p, f.tr).total;
    CHECK(e1 <= e0 + 1e-12);
    CHECK(rep.diss_phi >= 0.0);
    CHECK(rep.diss_u >= 0.0);
    CHECK(next.step == s.step + 1);
    CHECK(next.t == doctest::Approx(s.t + f.p.dt));
    s = std::move(next);
  }
  CHECK((s.phi.coeffs.coeffs.row(0) - f.phi.coeffs.coeffs.row(0)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(s.u.k2_leak() == 0.0);
  const Eigen::MatrixXd g = s.phi.grid(f.tr);
  CHECK((g.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-13);
}

TEST_CASE("the scheme converges at first order in dt") {
  ModelParams p = ModelParams::defaults();
  SphereTransform tr(8, 1.0);
  InitOptions io;
  io.amplitude = 0.15;
  const SimState start{0.0, 0, init_phase(p, tr, io).phi, random_deformation(tr.basis(), 4, 0.1, 5)};
  const double t_end = 0.01;
  auto solve = [&](double dt) {
    ModelParams q = p;
    q.dt = dt;
    q.stabilization = q.auto_stabilization();
    Stepper st(q, tr);
    SimState s = start;
    const auto n = static_cast<int>(std::lround(t_end / dt));
    for (int k = 0; k < n; ++k) s = st.step(s);
    Eigen::VectorXd out(s.phi.coeffs.coeffs.size() + s.u.u.coeffs.size());
    out << s.phi.coeffs.coeffs.reshaped(), s.u.u.coeffs;
    return out;
  };
  // dt S must be small for the asymptotic regime; S = 50 here.
  const Eigen::VectorXd a = solve(1e-4), b = solve(5e-5), c = solve(2.5e-5);
  const double rate = std::log2((a - b).norm() / (b - c).norm());
  CHECK(rate >= 0.8);
  CHECK(rate <= 1.2);
}

TEST_CASE("dissipation residual arithmetic") {
  const std::vector<EnergyRecord> h = {{10.0, 0, 0}, {9.0, 400.0, 100.0}, {8.5, 300.0, 0.0}};
  const std::vector<double> r = dissipation_residual(h, 1e-3);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(-1.0 + 0.5));
  CHECK(r[1] == doctest::Approx(-0.5 + 0.3));
}

TEST_CASE("rhs_phase is -lambda_l L w per mode") {
  const HarmonicBasis basis = HarmonicBasis::build(6, 1.0);
  VectorSpectralField w = VectorSpectralField::zero(6, 3);
  for (int c = 0; c < 3; ++c) w.coeffs.col(c) = test::random_field(6, 60 + c).coeffs;
  const Mobility m = projector_mobility(3);
  const VectorSpectralField r = rhs_phase(w, m, basis);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < w.coeffs.rows(); ++k) {
    const Eigen::VectorXd ref = -basis.mode_eigenvalues()(k) * m.matrix() * w.coeffs.row(k).transpose();
    worst = std::max(worst, (ref - r.coeffs.row(k).transpose()).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("steady residual vanishes only at stationary states") {
  Fixture f;
  const PhaseField hom = homogeneous_phase(f.p, f.tr.basis());
  CHECK(steady_residual(hom, Deformation::zero(10), f.p, f.tr).total < 1e-12);
  CHECK(steady_residual(f.phi, f.u, f.p, f.tr).total > 1e-3);
}

TEST_CASE("continuous-dependence distance and twin runs") {
  Fixture f;
  const SimState s{0.0, 0, f.phi, f.u};
  CHECK(contdep_distance(s, s, f.p.mobility, f.tr.basis()) == 0.0);
  Stepper st(f.p, f.tr);
  ContdepOptions o;
  o.t_final = 0.005;
  o.record_every = 10;
  const ContdepReport r = twin_run_contdep(st, s, 1e-8, o);
  CHECK(r.distance.front() == doctest::Approx(1e-8).epsilon(1e-10));
  CHECK(r.t.back() == doctest::Approx(0.005));
  CHECK(r.amplification > 0.0);
  CHECK(r.amplification < 10.0);
  VectorSpectralField bad = VectorSpectralField::zero(10, 3);
  bad.coeffs(0, 0) = 1e-3;
  CHECK_THROWS_AS(twin_run_contdep(st, s, bad, SpectralField::zero(10), o), ConstraintError);
}

TEST_CASE("exact mode reports nonpositive compositions") {
  Fixture f;
  PhaseField bad = f.phi;
  bad.coeffs.coeffs(0, 0) -= 5.0;
  bad.coeffs.coeffs(0, 1) += 5.0;
  CHECK_THROWS_AS(chemical_potential(bad, f.u, f.p, f.tr, EnergyMode::Exact), DomainError);
}

TEST_CASE("beta = 0 keeps u in equilibrium with the new phase field") {
  Fixture f;
  f.p.beta = 0.0;
  Stepper st(f.p, f.tr);
  SimState s{0.0, 0, f.phi, f.u};
  for (int k = 0; k < 3; ++k) s = st.step(s);
  const SpectralField r = rhs_u(s.phi, s.u, f.p, f.tr.basis());
  CHECK(r.coeffs.cwiseAbs().maxCoeff() < 1e-12);
}
