#include "mcps/dynamics.hpp"

#include <cmath>
#include <span>
#include <sstream>
#include <string>

#include <Eigen/QR>

#include "mcps/error.hpp"
#include "mcps/parallel.hpp"
#include "mcps/random.hpp"

namespace mcps {

namespace {

std::span<const double> column_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_shapes(const PhaseField& phi, const Deformation& u, const ModelParams& params, const HarmonicBasis& basis) {
  if (phi.coeffs.lmax != basis.lmax() || u.u.lmax != basis.lmax()) throw ShapeError("state lmax does not match basis");
  if (phi.components() != params.components()) throw ShapeError("phase field has the wrong number of components");
}

// (b/eps) psi'(phi) on the grid, column per component.
Eigen::MatrixXd entropic_grid(const Eigen::MatrixXd& phi_grid, const ModelParams& params, EnergyMode mode) {
  const Entropy entropy = params.entropy();
  const double scale = params.b / params.epsilon;
  Eigen::MatrixXd out(phi_grid.rows(), phi_grid.cols());
  for (Eigen::Index i = 0; i < phi_grid.cols(); ++i) {
    for (Eigen::Index p = 0; p < phi_grid.rows(); ++p) {
      const double s = phi_grid(p, i);
      if (mode == EnergyMode::Exact) {
        if (!(s > 0.0)) {
          std::ostringstream msg;
          msg << "exact entropy: component " << i << " is " << s << " at grid point " << p;
          throw DomainError(msg.str());
        }
        out(p, i) = scale * entropy.derivative(s);
      } else {
        out(p, i) = scale * entropy.regularized_derivative(s, params.h);
      }
    }
  }
  return out;
}

// Linear part of mu per mode (rows), before P.
Eigen::MatrixXd linear_potential(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                                 const HarmonicBasis& basis) {
  const Eigen::MatrixXd& c = phi.coeffs.coeffs;
  const Eigen::VectorXd& lam = basis.mode_eigenvalues();
  const double r2 = params.radius * params.radius;
  const Eigen::RowVectorXd lambda_row = params.lambda.transpose();
  Eigen::MatrixXd out = -(params.b / params.epsilon) * c * params.interaction.matrix();  // A symmetric
  for (Eigen::Index k = 0; k < c.rows(); ++k) {
    const double s = c.row(k).dot(lambda_row);
    out.row(k) += params.b * params.epsilon * lam(k) * c.row(k) + params.kappa * s * lambda_row +
                  (2.0 * params.kappa / r2 - params.kappa * lam(k)) * u.u.coeffs(k) * lambda_row;
  }
  return out;
}

void apply_projector_rows(Eigen::MatrixXd& m) { m.colwise() -= m.rowwise().mean(); }

}  // namespace

ChemicalPotential chemical_potential(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                                     const SphereTransform& transform, EnergyMode mode) {
  const HarmonicBasis& basis = transform.basis();
  check_shapes(phi, u, params, basis);
  const Eigen::MatrixXd phi_grid = transform.synthesis(phi.coeffs);
  const Eigen::MatrixXd ent = entropic_grid(phi_grid, params, mode);
  const VectorSpectralField lin{basis.lmax(), linear_potential(phi, u, params, basis)};

  ChemicalPotential out;
  out.mu_grid = ent + transform.synthesis(lin);
  out.w = transform.analysis(ent);
  out.w.coeffs += lin.coeffs;
  apply_projector_rows(out.w.coeffs);
  out.mean_w = out.w.coeffs.row(0).transpose() / std::sqrt(basis.area());
  return out;
}

VectorSpectralField rhs_phase(const VectorSpectralField& w, const Mobility& mobility, const HarmonicBasis& basis) {
  if (w.lmax != basis.lmax()) throw ShapeError("rhs_phase: lmax mismatch");
  if (w.components() != mobility.size()) throw ShapeError("rhs_phase: component mismatch");
  VectorSpectralField out{w.lmax, w.coeffs * mobility.matrix()};  // L symmetric
  out.coeffs.array().colwise() *= -basis.mode_eigenvalues().array();
  return out;
}

SpectralField rhs_u_unprojected(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                                const HarmonicBasis& basis) {
  check_shapes(phi, u, params, basis);
  const double k = params.kappa;
  const double r2 = params.radius * params.radius;
  const Eigen::VectorXd& lam = basis.mode_eigenvalues();
  Eigen::VectorXd s = phi.coeffs.coeffs * params.lambda;
  s(0) -= params.lambda.dot(params.alpha) * std::sqrt(basis.area());
  SpectralField out = SpectralField::zero(basis.lmax());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double l = lam(i);
    const double uu = u.u.coeffs(i);
    out.coeffs(i) = -k * l * l * uu - (params.sigma - 2.0 * k / r2) * l * uu + 2.0 * params.sigma * uu / r2 +
                    k * l * s(i) - 2.0 * k * s(i) / r2;
  }
  return out;
}

SpectralField rhs_u(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                    const HarmonicBasis& basis) {
  SpectralField out = rhs_u_unprojected(phi, u, params, basis);
  const double scale = std::max(1.0, out.coeffs.cwiseAbs().maxCoeff());
  const double leak = out.coeffs.head(4).cwiseAbs().maxCoeff();
  if (leak > 1e-9 * scale) {
    throw ConstraintError("rhs_u: degree 0/1 content " + std::to_string(leak) + " is not round-off");
  }
  return project_k2(std::move(out));
}

SpectralField rhs_u_factored(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                             const HarmonicBasis& basis) {
  check_shapes(phi, u, params, basis);
  const double k = params.kappa;
  const double r2 = params.radius * params.radius;
  const Eigen::VectorXd& lam = basis.mode_eigenvalues();
  Eigen::VectorXd s = phi.coeffs.coeffs * params.lambda;
  s(0) -= params.lambda.dot(params.alpha) * std::sqrt(basis.area());
  SpectralField out = SpectralField::zero(basis.lmax());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double inner_term = lam(i) * u.u.coeffs(i) + params.sigma / k * u.u.coeffs(i) - s(i);
    out.coeffs(i) = (-k * lam(i) + 2.0 * k / r2) * inner_term;
  }
  return project_k2(std::move(out));
}

namespace {

// Everything except the entropy integral, which is passed in.
EnergyParts assemble_energy(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                            const HarmonicBasis& basis, double entropic) {
  const double k = params.kappa;
  const double r2 = params.radius * params.radius;
  const Eigen::VectorXd& lam = basis.mode_eigenvalues();
  const Eigen::MatrixXd& c = phi.coeffs.coeffs;
  const Eigen::VectorXd s = c * params.lambda;
  const Eigen::VectorXd& uc = u.u.coeffs;

  EnergyParts e;
  for (Eigen::Index i = 0; i < uc.size(); ++i) {
    const double l = lam(i);
    e.helfrich += 0.5 * k * l * l * uc(i) * uc(i) + 0.5 * (params.sigma - 2.0 * k / r2) * l * uc(i) * uc(i) -
                  params.sigma * uc(i) * uc(i) / r2 - k * l * s(i) * uc(i) + 2.0 * k * uc(i) * s(i) / r2 +
                  0.5 * k * s(i) * s(i);
  }

  double gradient = 0.0;
  for (Eigen::Index i = 0; i < c.rows(); ++i) gradient += lam(i) * c.row(i).squaredNorm();
  const double quadratic = (c * params.interaction.matrix()).cwiseProduct(c).sum();
  e.cahn_hilliard = params.b * (0.5 * params.epsilon * gradient + (entropic - 0.5 * quadratic) / params.epsilon);
  e.total = e.helfrich + e.cahn_hilliard;
  return e;
}

}  // namespace

EnergyParts energy(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                   const SphereTransform& transform, EnergyMode mode) {
  const HarmonicBasis& basis = transform.basis();
  check_shapes(phi, u, params, basis);
  if (mode == EnergyMode::Regularized) {
    return assemble_energy(phi, u, params, basis, evaluate_entropic(phi, params, transform).integral);
  }
  const Eigen::MatrixXd grid = transform.synthesis(phi.coeffs);
  const Entropy entropy = params.entropy();
  Eigen::VectorXd density = Eigen::VectorXd::Zero(grid.rows());
  for (Eigen::Index p = 0; p < grid.rows(); ++p) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < grid.cols(); ++i) {
      const double v = grid(p, i);
      if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << "exact energy: component " << i << " is " << v << " at grid point " << p;
        throw DomainError(msg.str());
      }
      acc += entropy.value(v);
    }
    density(p) = acc;
  }
  return assemble_energy(phi, u, params, basis, transform.integrate(column_span(density)));
}

EnergyParts energy(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                   const HarmonicBasis& basis, const EntropicEvaluation& entropic) {
  check_shapes(phi, u, params, basis);
  return assemble_energy(phi, u, params, basis, entropic.integral);
}

EntropicEvaluation evaluate_entropic(const PhaseField& phi, const ModelParams& params,
                                     const SphereTransform& transform) {
  const Entropy entropy = params.entropy();
  const double scale = params.b / params.epsilon;
  EntropicEvaluation out;
  out.phi = transform.synthesis(phi.coeffs);
  out.slope.resize(out.phi.rows(), out.phi.cols());
  Eigen::VectorXd density = Eigen::VectorXd::Zero(out.phi.rows());
  for (Eigen::Index p = 0; p < out.phi.rows(); ++p) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < out.phi.cols(); ++i) {
      const Entropy::ValueAndSlope vs = entropy.regularized_with_slope(out.phi(p, i), params.h);
      acc += vs.value;
      out.slope(p, i) = scale * vs.slope;
    }
    density(p) = acc;
  }
  out.integral = transform.integrate(column_span(density));
  return out;
}

// ---------------------------------------------------------------------------

Stepper::Stepper(ModelParams params, const SphereTransform& transform)
    : params_(std::move(params)), transform_(&transform) {
  params_.validate();
  const HarmonicBasis& basis = transform.basis();
  if (std::abs(basis.radius() - params_.radius) > 1e-14 * params_.radius) {
    throw InvalidParameter("stepper: transform radius differs from params.radius");
  }
  const int n = params_.components();
  const int lmax = basis.lmax();
  const double dt = params_.dt;
  const double k = params_.kappa;
  const double r2 = params_.radius * params_.radius;
  const Eigen::MatrixXd& mob = params_.mobility.matrix();
  proj_ = tsigma_projector(n);
  plambda_ = proj_ * params_.lambda;
  const Eigen::MatrixXd base = params_.stabilization * proj_ -
                               (params_.b / params_.epsilon) * proj_ * params_.interaction.matrix() +
                               k * plambda_ * params_.lambda.transpose();
  lu_.resize(static_cast<std::size_t>(lmax) + 1);
  wmat_.resize(static_cast<std::size_t>(lmax) + 1);
  wcol_.resize(static_cast<std::size_t>(lmax) + 1);
  wmat_[0] = base;
  wcol_[0] = (2.0 * k / r2) * plambda_;
  for (int l = 1; l <= lmax; ++l) {
    const double lam = basis.eigenvalue(l);
    const auto ul = static_cast<std::size_t>(l);
    wmat_[ul] = params_.b * params_.epsilon * lam * proj_ + base;
    wcol_[ul] = (2.0 * k / r2 - k * lam) * plambda_;
    const int size = l == 1 ? n : n + 1;
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(size, size);
    sys.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) + dt * lam * mob * wmat_[ul];
    if (l >= 2) {
      const double dl = k * lam * lam + (params_.sigma - 2.0 * k / r2) * lam - 2.0 * params_.sigma / r2;
      sys.topRightCorner(n, 1) = dt * lam * mob * wcol_[ul];
      sys.bottomLeftCorner(1, n) = -(k * lam - 2.0 * k / r2) * params_.lambda.transpose();
      sys(n, n) = params_.beta / dt + dl;
    }
    lu_[ul].compute(sys);
    const double rc = lu_[ul].rcond();
    if (!(rc > 1e-13)) {
      std::ostringstream msg;
      msg << "stepper: system for degree " << l << " is singular (rcond estimate " << rc << ")";
      throw InvalidParameter(msg.str());
    }
  }
}

SimState Stepper::step(const SimState& state, StepReport* report) const {
  check_shapes(state.phi, state.u, params_, transform_->basis());
  return step(state, evaluate_entropic(state.phi, params_, *transform_), report);
}

SimState Stepper::step(const SimState& state, const EntropicEvaluation& entropic, StepReport* report) const {
  const SphereTransform& tr = *transform_;
  const HarmonicBasis& basis = tr.basis();
  check_shapes(state.phi, state.u, params_, basis);
  const int n = params_.components();
  const int lmax = basis.lmax();
  const double dt = params_.dt;
  const Eigen::MatrixXd& mob = params_.mobility.matrix();
  const Eigen::MatrixXd& old = state.phi.coeffs.coeffs;
  const Eigen::VectorXd& uold = state.u.u.coeffs;

  const Eigen::MatrixXd& grid = entropic.phi;
  Eigen::MatrixXd explicit_part = tr.analysis(entropic.slope).coeffs;
  apply_projector_rows(explicit_part);

  SimState next;
  next.t = static_cast<double>(state.step + 1) * dt;
  next.step = state.step + 1;
  next.phi.coeffs = VectorSpectralField::zero(lmax, n);
  next.u = Deformation::zero(lmax);
  Eigen::MatrixXd& pnew = next.phi.coeffs.coeffs;
  Eigen::VectorXd& qnew = next.u.u.coeffs;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(old.rows(), n);

  // Degree 0: frozen; S terms cancel.
  pnew.row(0) = old.row(0);
  w.row(0) = (wmat_[0] * old.row(0).transpose() - params_.stabilization * proj_ * old.row(0).transpose() +
              explicit_part.row(0).transpose())
                 .transpose();

  parallel_for(static_cast<std::size_t>(lmax), [&](std::size_t idx) {
    const int l = static_cast<int>(idx) + 1;
    const auto ul = static_cast<std::size_t>(l);
    const double lam = basis.eigenvalue(l);
    const int size = l == 1 ? n : n + 1;
    const int first = l * l;
    const int count = 2 * l + 1;
    Eigen::MatrixXd rhs(size, count);
    Eigen::MatrixXd r(n, count);
    for (int j = 0; j < count; ++j) {
      const Eigen::VectorXd pold = old.row(first + j).transpose();
      r.col(j) = -params_.stabilization * (proj_ * pold) + explicit_part.row(first + j).transpose();
      rhs.col(j).head(n) = pold - dt * lam * (mob * r.col(j));
      if (l >= 2) rhs(n, j) = params_.beta / dt * uold(first + j);
    }
    const Eigen::MatrixXd sol = lu_[ul].solve(rhs);
    for (int j = 0; j < count; ++j) {
      // The increment is -dt lambda L w, in T Sigma; drop its round-off along e.
      const Eigen::VectorXd pold = old.row(first + j).transpose();
      const Eigen::VectorXd p = pold + project_tsigma(sol.col(j).head(n) - pold);
      const double q = l >= 2 ? sol(n, j) : 0.0;
      pnew.row(first + j) = p.transpose();
      qnew(first + j) = q;
      w.row(first + j) = (wmat_[ul] * p + wcol_[ul] * q + r.col(j)).transpose();
    }
  });

  if (report != nullptr) {
    const Eigen::VectorXd& lam = basis.mode_eigenvalues();
    double diss = 0.0;
    for (Eigen::Index k = 1; k < w.rows(); ++k) diss += lam(k) * w.row(k).dot(w.row(k) * mob);
    const Eigen::VectorXd du = (qnew - uold) / dt;
    report->w = VectorSpectralField{lmax, w};
    report->diss_phi = diss;
    report->diss_u = params_.beta * du.squaredNorm();
    report->min_phi = grid.minCoeff();
    report->max_phi = grid.maxCoeff();
    report->breakdown = report->min_phi < 1e-14 || report->max_phi > 1.0 - 1e-14;
  }
  return next;
}

std::vector<double> dissipation_residual(const std::vector<EnergyRecord>& history, double dt) {
  std::vector<double> out;
  for (std::size_t i = 1; i < history.size(); ++i) {
    out.push_back(history[i].energy - history[i - 1].energy + dt * (history[i].diss_u + history[i].diss_phi));
  }
  return out;
}

SteadyResidual steady_residual(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                               const SphereTransform& transform, SteadyMode mode) {
  const ChemicalPotential cp = chemical_potential(
      phi, u, params, transform, mode == SteadyMode::Exact ? EnergyMode::Exact : EnergyMode::Regularized);
  SteadyResidual r;
  r.phase = cp.w.coeffs.bottomRows(cp.w.coeffs.rows() - 1).norm();
  r.shape = rhs_u_unprojected(phi, u, params, transform.basis()).coeffs.norm();
  r.total = std::hypot(r.phase, r.shape);
  return r;
}

// ---------------------------------------------------------------------------

double contdep_distance(const SimState& a, const SimState& b, const Mobility& mobility, const HarmonicBasis& basis) {
  VectorSpectralField dphi{a.phi.coeffs.lmax, a.phi.coeffs.coeffs - b.phi.coeffs.coeffs};
  // Degree 0 cancels exactly; clear round-off so the admissibility check sees zero.
  dphi.coeffs.row(0).setZero();
  return hminus1_norm_squared(dphi, mobility, basis) + (a.u.u.coeffs - b.u.u.coeffs).squaredNorm();
}

namespace {

void fit_log_quadratic(ContdepReport& rep) {
  std::vector<double> ts;
  std::vector<double> ys;
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    if (rep.distance[i] > 0.0) {
      ts.push_back(rep.t[i]);
      ys.push_back(std::log(rep.distance[i]));
    }
  }
  if (ts.size() < 3) return;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(ts.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(ts.size()));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a(r, 0) = 1.0;
    a(r, 1) = ts[i];
    a(r, 2) = ts[i] * ts[i];
    y(r) = ys[i];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  rep.fit_c1 = c(1);
  rep.fit_c2 = c(2);
  rep.fit_rms = std::sqrt((a * c - y).squaredNorm() / static_cast<double>(ts.size()));
}

}  // namespace

ContdepReport twin_run_contdep(const Stepper& stepper, const SimState& base, const VectorSpectralField& dphi,
                               const SpectralField& du, const ContdepOptions& options) {
  const HarmonicBasis& basis = stepper.transform().basis();
  const ModelParams& params = stepper.params();
  if (dphi.lmax != basis.lmax() || du.lmax != basis.lmax()) throw ShapeError("contdep: lmax mismatch");
  const double scale = std::max(1.0, dphi.coeffs.cwiseAbs().maxCoeff());
  if (dphi.coeffs.row(0).cwiseAbs().maxCoeff() > 1e-14 * scale ||
      dphi.coeffs.rowwise().sum().cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ConstraintError("contdep: phase perturbation must be mean-free and T Sigma-valued");
  }
  if (du.coeffs.head(4).cwiseAbs().maxCoeff() != 0.0) {
    throw ConstraintError("contdep: deformation perturbation must lie in K2");
  }
  if (options.record_every < 1) throw InvalidParameter("contdep: record_every must be >= 1");

  SimState a = base;
  SimState b = base;
  b.phi.coeffs.coeffs += dphi.coeffs;
  b.u.u.coeffs += du.coeffs;

  ContdepReport rep;
  const auto steps = static_cast<std::uint64_t>(std::llround(options.t_final / params.dt));
  rep.t.push_back(0.0);
  rep.distance.push_back(contdep_distance(a, b, params.mobility, basis));
  for (std::uint64_t s = 1; s <= steps; ++s) {
    a = stepper.step(a);
    b = stepper.step(b);
    if (s % static_cast<std::uint64_t>(options.record_every) == 0 || s == steps) {
      rep.t.push_back(static_cast<double>(s) * params.dt);
      rep.distance.push_back(contdep_distance(a, b, params.mobility, basis));
    }
  }
  rep.amplification = rep.distance.front() > 0.0 ? rep.distance.back() / rep.distance.front() : 0.0;
  fit_log_quadratic(rep);
  return rep;
}

ContdepReport twin_run_contdep(const Stepper& stepper, const SimState& base, double size,
                               const ContdepOptions& options) {
  if (!(size >= 0.0)) throw InvalidParameter("contdep: perturbation size must be non-negative");
  const HarmonicBasis& basis = stepper.transform().basis();
  const ModelParams& params = stepper.params();
  const int n = params.components();
  const int l_init = std::min(options.l_init, basis.lmax());
  CounterRng rng(options.seed, /*stream=*/3);
  VectorSpectralField dphi = VectorSpectralField::zero(basis.lmax(), n);
  for (int l = 1; l <= l_init; ++l) {
    for (int m = -l; m <= l; ++m) {
      Eigen::VectorXd c(n);
      for (int i = 0; i < n; ++i) c(i) = rng.uniform(-1.0, 1.0);
      dphi.coeffs.row(static_cast<Eigen::Index>(mode_index(l, m))) = project_tsigma(c).transpose();
    }
  }
  SpectralField du = random_deformation(basis, std::max(2, l_init), 1.0, options.seed ^ 0x5bd1e995ULL).u;
  const double d0 = hminus1_norm_squared(dphi, params.mobility, basis) + du.coeffs.squaredNorm();
  const double factor = size > 0.0 ? std::sqrt(size / d0) : 0.0;
  dphi.coeffs *= factor;
  du.coeffs *= factor;
  return twin_run_contdep(stepper, base, dphi, du, options);
}

}  // namespace mcps
