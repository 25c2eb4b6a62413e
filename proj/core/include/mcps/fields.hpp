#pragma once

// Model parameters and the constrained state containers: compositions phi on
// the Gibbs simplex with fixed means, deformations u in K2, the projection P
// onto the tangent space T Sigma = {sum eta_i = 0}, and the mobility metric.

#include <cstdint>

#include <Eigen/Core>

#include "mcps/potential.hpp"
#include "mcps/sphere_spectral.hpp"

namespace mcps {

/// P v = v - mean(v) e.
Eigen::VectorXd project_tsigma(const Eigen::VectorXd& v);
/// The matrix of P, I - ee^T/N.
Eigen::MatrixXd tsigma_projector(int n);
/// Orthonormal basis of T Sigma as the columns of an N x (N-1) matrix.
Eigen::MatrixXd tsigma_basis(int n);
/// P applied to every mode (row) of a vector field.
VectorSpectralField project_tsigma(const VectorSpectralField& f);

/// Constant mobility matrix, symmetric with zero row sums and coercive on
/// T Sigma with constant l0 = coercivity().
class Mobility {
 public:
  const Eigen::MatrixXd& matrix() const noexcept { return l_; }
  double coercivity() const noexcept { return l0_; }
  /// Inverse of L restricted to T Sigma, extended by zero along e.
  const Eigen::MatrixXd& restricted_inverse() const noexcept { return inverse_; }
  int size() const noexcept { return static_cast<int>(l_.rows()); }

 private:
  friend Mobility validate_mobility(const Eigen::MatrixXd& raw);
  Eigen::MatrixXd l_;
  Eigen::MatrixXd inverse_;
  double l0_ = 0.0;
};

/// Throws ValidationError naming the violated condition (shape, symmetry,
/// row sums above 1e-12, or l0 <= 0).
Mobility validate_mobility(const Eigen::MatrixXd& raw);
/// L = I - ee^T/N, with l0 = 1.
Mobility projector_mobility(int n);

struct ModelParams {
  double kappa = 1.0;
  double sigma = 1.0;
  double b = 0.01;
  double epsilon = 0.2;
  double beta = 1.0;
  double radius = 1.0;
  Eigen::VectorXd lambda;  ///< spontaneous-curvature couplings
  InteractionMatrix interaction = InteractionMatrix::uniform_off_diagonal(3, 3.5);
  Eigen::VectorXd alpha;   ///< mean composition
  Mobility mobility = projector_mobility(3);
  double h = 1e-3;            ///< Yosida parameter
  double stabilization = 0.0; ///< S; see auto_stabilization()
  double dt = 1e-4;
  YosidaDomain yosida = YosidaDomain::UnitInterval;

  int components() const noexcept { return static_cast<int>(alpha.size()); }
  /// b / (epsilon h), the Lipschitz constant of (b/eps) psi_h'.
  double auto_stabilization() const noexcept { return b / (epsilon * h); }
  Entropy entropy() const { return Entropy(yosida); }

  /// Throws InvalidParameter naming the first violated invariant.
  void validate() const;

  /// N = 3, alpha = (0.4, 0.35, 0.25), A = 3.5 (ee^T - I), L = projector,
  /// S = auto.
  static ModelParams defaults();
};

/// phi as N spectral components on one basis.
struct PhaseField {
  VectorSpectralField coeffs;

  int components() const noexcept { return coeffs.components(); }
  /// Grid values (points x N).
  Eigen::MatrixXd grid(const SphereTransform& transform) const { return transform.synthesis(coeffs); }
};

/// u in K2: degree 0 and 1 coefficients are zero.
struct Deformation {
  SpectralField u;

  static Deformation zero(int lmax) { return {SpectralField::zero(lmax)}; }
  /// Largest |coefficient| among degrees 0 and 1.
  double k2_leak() const { return u.coeffs.head(4).cwiseAbs().maxCoeff(); }
};

/// The homogeneous composition phi = alpha.
PhaseField homogeneous_phase(const ModelParams& params, const HarmonicBasis& basis);

struct InitOptions {
  double amplitude = 0.1;
  int l_init = 4;
  double margin = 0.05;
  std::uint64_t seed = 1;
};

struct InitResult {
  PhaseField phi;
  /// Factor applied to the requested amplitude to respect the margin (1 if none).
  double applied_scale = 1.0;
};

/// phi = alpha + amplitude * delta, delta a random T Sigma-valued combination
/// of degrees 1..l_init normalized to unit max norm on the grid. The
/// amplitude shrinks (never clips) until min phi >= margin.
InitResult init_phase(const ModelParams& params, const SphereTransform& transform, const InitOptions& options);

/// Random K2 deformation with degrees 2..l_init and unit L2 norm (times amplitude).
Deformation random_deformation(const HarmonicBasis& basis, int l_init, double amplitude, std::uint64_t seed);

/// Solves -div(L grad f) = g for mean-free, T Sigma-valued g; throws
/// ConstraintError otherwise (tolerance 1e-10).
VectorSpectralField weighted_inv_laplacian(const VectorSpectralField& g, const Mobility& mobility,
                                           const HarmonicBasis& basis);
/// ||g||^2_{-1,L} = <g, (-Delta_L)^{-1} g>.
double hminus1_norm_squared(const VectorSpectralField& g, const Mobility& mobility, const HarmonicBasis& basis);

}  // namespace mcps
