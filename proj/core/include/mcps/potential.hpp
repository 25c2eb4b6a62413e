#pragma once

// Singular mixing entropy psi(s) = s ln s, its cubic C2 extension beyond s = 1,
// the Yosida-regularized family psi_h and the multi-well density
// Psi(v) = sum_i psi(v_i) - v.Av/2.

#include <utility>

#include <Eigen/Core>

namespace mcps {

/// Which maximal monotone operator the Yosida family regularizes.
///  * UnitInterval: T = psi' with domain (0, 1]; at s = 1 the graph is the
///    vertical ray [psi'(1), +inf). J_h maps R onto (0, 1] and psi_h is
///    quadratic, (s-1)^2/(2h), above s = 1 + h psi'(1).
///  * Extended: T = psi' of the cubic extension on (0, +inf). The extension
///    loses convexity past s = 4/3, so the lower bound on psi_h'' fails there.
enum class YosidaDomain { UnitInterval, Extended };

/// Coefficients of psi(s) = a s^3 + b s^2 + d s for s >= 1.
struct ExtensionCoefficients {
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;
};

/// C2 matching of a cubic through the origin to (psi, psi', psi'') at s = 1.
ExtensionCoefficients cubic_extension(double value, double slope, double curvature);

/// J_h(s) carried with its logarithm; the value underflows to 0 long before
/// the logarithm loses precision (e.g. s = -10, h = 0.01 gives ln r ~ -1001).
struct Resolvent {
  double value = 0.0;
  double log_value = 0.0;
};

class Entropy {
 public:
  /// Logarithmic entropy with zeta = 1 (psi'' = 1/s >= 1 on (0, 1]).
  explicit Entropy(YosidaDomain domain = YosidaDomain::UnitInterval);

  YosidaDomain domain() const noexcept { return domain_; }
  double zeta() const noexcept { return zeta_; }
  /// Exponent of the separation hypothesis; metadata only.
  double iota() const noexcept { return iota_; }
  const ExtensionCoefficients& extension() const noexcept { return ext_; }

  /// psi(s); +infinity for s < 0, psi(0) = 0.
  double value(double s) const;
  /// Throws DomainError for s <= 0.
  double derivative(double s) const;
  double second_derivative(double s) const;

  /// Unique r with r + h T(r) containing s. Throws InvalidParameter for
  /// h <= 0 or non-finite s, NumericalError if the iteration stalls.
  Resolvent resolvent(double s, double h) const;

  /// psi_h(s) = h/2 |T_h s|^2 + psi(J_h s).
  double regularized(double s, double h) const;
  /// psi_h'(s) = T_h(s) = (s - J_h s)/h.
  double regularized_derivative(double s, double h) const;
  /// psi_h''(s) = psi''(J)/(1 + h psi''(J)), or 1/h on the vertical ray.
  double regularized_second_derivative(double s, double h) const;

  struct ValueAndSlope {
    double value = 0.0;
    double slope = 0.0;
  };
  /// psi_h and psi_h' from a single resolvent solve.
  ValueAndSlope regularized_with_slope(double s, double h) const;

 private:
  double zeta_ = 1.0;
  double iota_ = 1.0;
  YosidaDomain domain_;
  ExtensionCoefficients ext_;
};

/// Symmetric N x N matrix with a positive largest eigenvalue.
class InteractionMatrix {
 public:
  /// Throws ValidationError if A is not symmetric or has no positive eigenvalue.
  explicit InteractionMatrix(Eigen::MatrixXd a);

  /// chi (ee^T - I).
  static InteractionMatrix uniform_off_diagonal(int n, double chi);

  const Eigen::MatrixXd& matrix() const noexcept { return a_; }
  double largest_eigenvalue() const noexcept { return lambda_max_; }
  int size() const noexcept { return static_cast<int>(a_.rows()); }

 private:
  Eigen::MatrixXd a_;
  double lambda_max_ = 0.0;
};

/// Psi(v) with the exact entropy; throws DomainError unless v > 0.
double multiwell(const Eigen::VectorXd& v, const InteractionMatrix& a, const Entropy& entropy);
/// Psi_h(v), defined for every v.
double multiwell_regularized(const Eigen::VectorXd& v, const InteractionMatrix& a, const Entropy& entropy, double h);

/// (psi'(v_i))_i and -Av separately. h <= 0 selects the exact entropy.
std::pair<Eigen::VectorXd, Eigen::VectorXd> multiwell_gradient(const Eigen::VectorXd& v, const InteractionMatrix& a,
                                                               const Entropy& entropy, double h);

}  // namespace mcps
