#pragma once

// Chemical potential, right-hand sides, energies and the stabilized IMEX
// stepper for the coupled phase / deformation system.

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "mcps/fields.hpp"

namespace mcps {

/// Regularized uses psi_h (defined for every value); Exact uses psi and
/// requires phi > 0 on the grid.
enum class EnergyMode { Regularized, Exact };

struct ChemicalPotential {
  Eigen::MatrixXd mu_grid;  ///< points x N
  VectorSpectralField w;    ///< P mu
  Eigen::VectorXd mean_w;   ///< spatial mean of each w_i
};

/// mu = (b/eps)(psi'(phi) - A phi) + 2 kappa u Lambda / R^2 - b eps Lap phi
///      + kappa (Lambda.phi) Lambda + kappa Lap(u) Lambda.
/// Throws DomainError naming component and grid point in exact mode.
ChemicalPotential chemical_potential(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                                     const SphereTransform& transform, EnergyMode mode = EnergyMode::Regularized);

/// div(L grad w) per mode: -lambda_l L w_k.
VectorSpectralField rhs_phase(const VectorSpectralField& w, const Mobility& mobility, const HarmonicBasis& basis);

/// Right side of beta u_t before any projection onto K2.
SpectralField rhs_u_unprojected(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                                const HarmonicBasis& basis);
/// Same, after checking that the degree 0/1 content is round-off and zeroing
/// it. Throws ConstraintError if the leak exceeds 1e-9 relative.
SpectralField rhs_u(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                    const HarmonicBasis& basis);
/// (kappa Lap + 2 kappa/R^2)(-Lap u + (sigma/kappa) u - Lambda.(phi - alpha)).
SpectralField rhs_u_factored(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                             const HarmonicBasis& basis);

struct EnergyParts {
  double helfrich = 0.0;
  double cahn_hilliard = 0.0;
  double total = 0.0;
};

EnergyParts energy(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                   const SphereTransform& transform, EnergyMode mode = EnergyMode::Regularized);

/// Regularized entropy data of one phase field on the grid, shared by the
/// energy of a state and the step leaving it.
struct EntropicEvaluation {
  Eigen::MatrixXd phi;    ///< grid values, points x N
  Eigen::MatrixXd slope;  ///< (b/eps) psi_h'(phi)
  double integral = 0.0;  ///< integral of sum_i psi_h(phi_i)
};
EntropicEvaluation evaluate_entropic(const PhaseField& phi, const ModelParams& params,
                                     const SphereTransform& transform);
/// Regularized energy from a precomputed evaluation of phi.
EnergyParts energy(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                   const HarmonicBasis& basis, const EntropicEvaluation& entropic);

struct SimState {
  double t = 0.0;
  std::uint64_t step = 0;
  PhaseField phi;
  Deformation u;
};

/// Per-step byproducts of Stepper::step.
struct StepReport {
  VectorSpectralField w;       ///< the scheme's w at the new level
  double diss_phi = 0.0;       ///< (L grad w, grad w)
  double diss_u = 0.0;         ///< beta ||(u_new - u_old)/dt||^2
  double min_phi = 0.0;        ///< grid extrema of the old state
  double max_phi = 0.0;
  bool breakdown = false;      ///< a grid value left [1e-14, 1 - 1e-14]
};

/// First-order IMEX step. Per mode of degree l the unknowns are p (the new
/// phi coefficients) and q (the new u coefficient):
///   p = phi_n - dt lambda L w,
///   w = b eps lambda P p + S P(p - phi_n) - (b/eps) P A p + kappa P Lambda (Lambda.p)
///       + (2 kappa/R^2 - kappa lambda) q P Lambda + P[(b/eps) psi_h'(phi_n)]_k,
///   beta (q - u_n)/dt = -D_l q + (kappa lambda - 2 kappa/R^2) Lambda.p,
/// with D_l = kappa lambda^2 + (sigma - 2 kappa/R^2) lambda - 2 sigma/R^2.
/// Degree 0 is frozen; q = 0 on degrees 0 and 1. The system matrix only
/// depends on l and is factorized once per degree.
class Stepper {
 public:
  /// Throws InvalidParameter if a per-degree matrix is numerically singular.
  Stepper(ModelParams params, const SphereTransform& transform);

  SimState step(const SimState& state, StepReport* report = nullptr) const;
  /// Same, reusing the entropic evaluation of state.phi.
  SimState step(const SimState& state, const EntropicEvaluation& entropic, StepReport* report = nullptr) const;

  const ModelParams& params() const noexcept { return params_; }
  const SphereTransform& transform() const noexcept { return *transform_; }

 private:
  ModelParams params_;
  const SphereTransform* transform_;
  Eigen::MatrixXd proj_;
  Eigen::VectorXd plambda_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;  // index l
  std::vector<Eigen::MatrixXd> wmat_;                     // M_l
  std::vector<Eigen::VectorXd> wcol_;                     // c_l
};

/// One entry per completed step n -> n+1.
struct EnergyRecord {
  double energy = 0.0;    ///< E at the new level
  double diss_phi = 0.0;
  double diss_u = 0.0;
};

/// r_n = E^{n+1} - E^n + dt (diss_u + diss_phi). history[0] holds E^0 (its
/// dissipation entries are ignored); the result has history.size() - 1 entries.
std::vector<double> dissipation_residual(const std::vector<EnergyRecord>& history, double dt);

enum class SteadyMode { Regularized, Exact };

struct SteadyResidual {
  double phase = 0.0;  ///< ||w - mean(w)||
  double shape = 0.0;  ///< ||unprojected rhs_u||
  double total = 0.0;  ///< root-sum-square
};

/// Both residual fields of the stationary system. The forcing f is the mean
/// of the phase equation's left side, so the phase residual is w minus its
/// mean.
SteadyResidual steady_residual(const PhaseField& phi, const Deformation& u, const ModelParams& params,
                               const SphereTransform& transform, SteadyMode mode = SteadyMode::Regularized);

struct ContdepOptions {
  double t_final = 0.5;
  int record_every = 10;
  int l_init = 4;
  std::uint64_t seed = 7;
};

struct ContdepReport {
  std::vector<double> t;
  std::vector<double> distance;  ///< D(t)
  double amplification = 0.0;    ///< D(T)/D(0)
  /// Quadratic fit log D = c0 + c1 t + c2 t^2.
  double fit_c1 = 0.0;
  double fit_c2 = 0.0;
  double fit_rms = 0.0;
};

/// D = ||dphi||^2_{-1,L} + ||du||^2 between two states.
double contdep_distance(const SimState& a, const SimState& b, const Mobility& mobility, const HarmonicBasis& basis);

/// Integrates `base` and a perturbed copy with D(0) = size and reports D(t).
/// Throws ConstraintError if the perturbation is inadmissible (only possible
/// through a user-supplied perturbation).
ContdepReport twin_run_contdep(const Stepper& stepper, const SimState& base, double size,
                               const ContdepOptions& options);
/// Same with an explicit perturbation (dphi T Sigma-valued and mean-free,
/// du in K2), used as given.
ContdepReport twin_run_contdep(const Stepper& stepper, const SimState& base, const VectorSpectralField& dphi,
                               const SpectralField& du, const ContdepOptions& options);

}  // namespace mcps
