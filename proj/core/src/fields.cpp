#include "mcps/fields.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "mcps/error.hpp"
#include "mcps/random.hpp"

namespace mcps {

Eigen::VectorXd project_tsigma(const Eigen::VectorXd& v) {
  return v.array() - v.mean();
}

Eigen::MatrixXd tsigma_projector(int n) {
  return Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
}

Eigen::MatrixXd tsigma_basis(int n) {
  // Complete e/sqrt(N) to an orthonormal basis; drop the first column.
  Eigen::MatrixXd seed = Eigen::MatrixXd::Identity(n, n);
  seed.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(seed);
  const Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - 1);
}

VectorSpectralField project_tsigma(const VectorSpectralField& f) {
  VectorSpectralField out = f;
  out.coeffs.colwise() -= f.coeffs.rowwise().mean();
  return out;
}

Mobility validate_mobility(const Eigen::MatrixXd& raw) {
  if (raw.rows() != raw.cols()) throw ValidationError("mobility: matrix must be square");
  const auto n = static_cast<int>(raw.rows());
  if (n < 2) throw ValidationError("mobility: need N >= 2");
  const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
  if ((raw - raw.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ValidationError("mobility: matrix is not symmetric");
  }
  const double row_sum = raw.rowwise().sum().cwiseAbs().maxCoeff();
  if (row_sum > 1e-12) {
    std::ostringstream msg;
    msg << "mobility: row sums must vanish (max |row sum| = " << row_sum << ")";
    throw ValidationError(msg.str());
  }
  const Eigen::MatrixXd q = tsigma_basis(n);
  const Eigen::MatrixXd restricted = q.transpose() * raw * q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (restricted + restricted.transpose()));
  const double l0 = eig.eigenvalues().minCoeff();
  if (!(l0 > 1e-12 * scale)) {
    std::ostringstream msg;
    msg << "mobility: not positive definite on T Sigma (l0 = " << l0 << ")";
    throw ValidationError(msg.str());
  }
  Mobility m;
  m.l_ = 0.5 * (raw + raw.transpose());
  m.l0_ = l0;
  m.inverse_ = q * eig.operatorInverseSqrt() * eig.operatorInverseSqrt() * q.transpose();
  return m;
}

Mobility projector_mobility(int n) { return validate_mobility(tsigma_projector(n)); }

void ModelParams::validate() const {
  auto fail = [](const std::string& what) { throw InvalidParameter(what); };
  if (!(kappa > 0.0)) fail("kappa must be positive");
  if (!(sigma > 0.0)) fail("sigma must be positive");
  if (!(b > 0.0)) fail("b must be positive");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(beta >= 0.0)) fail("beta must be non-negative");
  if (!(radius > 0.0)) fail("radius must be positive");
  if (!(h > 0.0)) fail("h must be positive");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (!(stabilization >= 0.0)) fail("stabilization must be non-negative");
  const int n = components();
  if (n < 2) fail("need at least two components");
  if (lambda.size() != n) fail("lambda must have N entries");
  if (interaction.size() != n) fail("A must be N x N");
  if (mobility.size() != n) fail("mobility must be N x N");
  for (int i = 0; i < n; ++i) {
    if (!(alpha(i) > 0.0 && alpha(i) < 1.0)) fail("alpha entries must lie in (0, 1)");
  }
  if (std::abs(alpha.sum() - 1.0) > 1e-12) fail("alpha must sum to 1");
}

ModelParams ModelParams::defaults() {
  ModelParams p;
  p.lambda = Eigen::Vector3d(1.0, -0.5, 0.0);
  p.alpha = Eigen::Vector3d(0.4, 0.35, 0.25);
  p.stabilization = p.auto_stabilization();
  return p;
}

PhaseField homogeneous_phase(const ModelParams& params, const HarmonicBasis& basis) {
  PhaseField phi{VectorSpectralField::zero(basis.lmax(), params.components())};
  const double root_area = std::sqrt(basis.area());
  for (int i = 0; i < params.components(); ++i) phi.coeffs.coeffs(0, i) = params.alpha(i) * root_area;
  return phi;
}

InitResult init_phase(const ModelParams& params, const SphereTransform& transform, const InitOptions& options) {
  if (!(options.amplitude >= 0.0)) throw InvalidParameter("init: amplitude must be non-negative");
  if (options.l_init < 1 || options.l_init > transform.lmax()) {
    throw InvalidParameter("init: l_init must lie in [1, lmax]");
  }
  const HarmonicBasis& basis = transform.basis();
  const int n = params.components();
  InitResult result{homogeneous_phase(params, basis), 1.0};
  if (options.amplitude == 0.0) return result;

  CounterRng rng(options.seed, /*stream=*/1);
  VectorSpectralField delta = VectorSpectralField::zero(basis.lmax(), n);
  for (int l = 1; l <= options.l_init; ++l) {
    for (int m = -l; m <= l; ++m) {
      Eigen::VectorXd c(n);
      for (int i = 0; i < n; ++i) c(i) = rng.uniform(-1.0, 1.0);
      delta.coeffs.row(static_cast<Eigen::Index>(mode_index(l, m))) = project_tsigma(c).transpose();
    }
  }
  const Eigen::MatrixXd dgrid = transform.synthesis(delta);
  const double peak = dgrid.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) return result;
  double scale = options.amplitude / peak;
  // Largest s with alpha_i + s * min(delta_i) >= margin for every component.
  for (int i = 0; i < n; ++i) {
    const double dmin = dgrid.col(i).minCoeff();
    if (dmin < 0.0) {
      const double limit = (params.alpha(i) - options.margin) / (-dmin);
      if (limit < scale) scale = limit;
    }
  }
  if (!(scale > 0.0)) throw InvalidParameter("init: margin exceeds the smallest mean composition");
  result.applied_scale = scale / (options.amplitude / peak);
  result.phi.coeffs.coeffs.bottomRows(result.phi.coeffs.coeffs.rows() - 1) =
      scale * delta.coeffs.bottomRows(delta.coeffs.rows() - 1);
  return result;
}

Deformation random_deformation(const HarmonicBasis& basis, int l_init, double amplitude, std::uint64_t seed) {
  if (l_init < 2 || l_init > basis.lmax()) throw InvalidParameter("deformation: l_init must lie in [2, lmax]");
  CounterRng rng(seed, /*stream=*/2);
  Deformation d = Deformation::zero(basis.lmax());
  for (int l = 2; l <= l_init; ++l) {
    for (int m = -l; m <= l; ++m) d.u(l, m) = rng.uniform(-1.0, 1.0);
  }
  const double norm = d.u.coeffs.norm();
  if (norm > 0.0) d.u.coeffs *= amplitude / norm;
  return d;
}

namespace {

void check_admissible(const VectorSpectralField& g, const Mobility& mobility, const HarmonicBasis& basis) {
  if (g.lmax != basis.lmax()) throw ShapeError("weighted_inv_laplacian: lmax mismatch");
  if (g.components() != mobility.size()) throw ShapeError("weighted_inv_laplacian: component mismatch");
  const double scale = std::max(1.0, g.coeffs.cwiseAbs().maxCoeff());
  if (g.coeffs.row(0).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ConstraintError("weighted_inv_laplacian: argument has nonzero mean");
  }
  if (g.coeffs.rowwise().sum().cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ConstraintError("weighted_inv_laplacian: argument is not T Sigma-valued");
  }
}

}  // namespace

VectorSpectralField weighted_inv_laplacian(const VectorSpectralField& g, const Mobility& mobility,
                                           const HarmonicBasis& basis) {
  check_admissible(g, mobility, basis);
  VectorSpectralField f = VectorSpectralField::zero(g.lmax, g.components());
  const Eigen::MatrixXd& minv = mobility.restricted_inverse();
  for (Eigen::Index k = 1; k < g.coeffs.rows(); ++k) {
    const double lam = basis.mode_eigenvalues()(k);
    f.coeffs.row(k) = (minv * g.coeffs.row(k).transpose()).transpose() / lam;
  }
  return f;
}

double hminus1_norm_squared(const VectorSpectralField& g, const Mobility& mobility, const HarmonicBasis& basis) {
  const VectorSpectralField f = weighted_inv_laplacian(g, mobility, basis);
  return g.coeffs.cwiseProduct(f.coeffs).sum();
}

}  // namespace mcps
