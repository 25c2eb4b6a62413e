#include "mcps/potential.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "mcps/error.hpp"

namespace mcps {

ExtensionCoefficients cubic_extension(double value, double slope, double curvature) {
  return {value - slope + 0.5 * curvature, -3.0 * value + 3.0 * slope - curvature,
          3.0 * value - 2.0 * slope + 0.5 * curvature};
}

Entropy::Entropy(YosidaDomain domain) : domain_(domain), ext_(cubic_extension(0.0, 1.0, 1.0)) {}

double Entropy::value(double s) const {
  if (std::isnan(s)) throw DomainError("psi: NaN argument");
  if (s < 0.0) return std::numeric_limits<double>::infinity();
  if (s == 0.0) return 0.0;
  if (s <= 1.0) return s * std::log(s);
  return ((ext_.a * s + ext_.b) * s + ext_.d) * s;
}

double Entropy::derivative(double s) const {
  if (!(s > 0.0)) throw DomainError("psi': argument " + std::to_string(s) + " is not positive");
  if (s <= 1.0) return std::log(s) + 1.0;
  return (3.0 * ext_.a * s + 2.0 * ext_.b) * s + ext_.d;
}

double Entropy::second_derivative(double s) const {
  if (!(s > 0.0)) throw DomainError("psi'': argument " + std::to_string(s) + " is not positive");
  if (s <= 1.0) return 1.0 / s;
  return 6.0 * ext_.a * s + 2.0 * ext_.b;
}

namespace {

constexpr int kMaxIterations = 200;

// Root t of exp(t) + h (t + 1) = s with t <= 0. The left side is increasing
// and convex in t, so safeguarded Newton inside [lo, hi] always terminates.
double solve_log_branch(double s, double h) {
  double lo = -(1.0 + std::abs(s) / h + 1.0 / h);
  double hi = 0.0;
  double t = 0.0;
  if (s > 0.0 && s < 1.0) t = std::log(s);  // exact for h -> 0
  for (int it = 0; it < kMaxIterations; ++it) {
    const double e = std::exp(t);
    const double f = e + h * (t + 1.0) - s;
    if (f > 0.0) hi = t; else lo = t;
    double next = t - f / (e + h);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double dt = next - t;
    t = next;
    if (std::abs(dt) <= 1e-15 * std::max(1.0, std::abs(t)) ||
        (std::abs(dt) * std::exp(std::max(t, t - dt)) < 1e-15 && std::abs(dt) < 1e-12)) {
      return t;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) return t;
  }
  throw NumericalError("resolvent: no convergence for s = " + std::to_string(s));
}

}  // namespace

Resolvent Entropy::resolvent(double s, double h) const {
  if (!(h > 0.0)) throw InvalidParameter("resolvent: h must be positive");
  if (!std::isfinite(s)) throw InvalidParameter("resolvent: argument must be finite");
  const double threshold = 1.0 + h;  // 1 + h psi'(1)
  if (s < threshold) {
    const double t = solve_log_branch(s, h);
    return {std::exp(t), t};
  }
  if (domain_ == YosidaDomain::UnitInterval) return {1.0, 0.0};

  // Cubic branch r >= 1: g(r) = r + h psi'(r) = s.
  auto g = [&](double r) { return r + h * derivative(r); };
  double lo = 1.0;
  double hi = std::max(1.0, s);
  for (int grow = 0; g(hi) < s; ++grow) {
    if (grow > 60 || 1.0 + h * second_derivative(hi) <= 0.0) {
      throw NumericalError("resolvent: extension is not monotone near s = " + std::to_string(s));
    }
    hi *= 2.0;
  }
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double f = g(r) - s;
    if (f > 0.0) hi = r; else lo = r;
    const double dg = 1.0 + h * second_derivative(r);
    double next = dg > 0.0 ? r - f / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double dr = next - r;
    r = next;
    if (std::abs(dr) < 1e-14 || hi - lo < 1e-14) return {r, std::log(r)};
  }
  throw NumericalError("resolvent: no convergence for s = " + std::to_string(s));
}

Entropy::ValueAndSlope Entropy::regularized_with_slope(double s, double h) const {
  const Resolvent j = resolvent(s, h);
  double t = 0.0;
  // On the logarithmic branch T_h s = psi'(J) exactly; avoids cancellation in (s - J)/h.
  if (s < 1.0 + h) {
    t = j.log_value + 1.0;
  } else if (domain_ == YosidaDomain::UnitInterval) {
    t = (s - 1.0) / h;
  } else {
    t = derivative(j.value);
  }
  const double psi_j = j.value <= 1.0 ? j.value * j.log_value : value(j.value);
  return {0.5 * h * t * t + psi_j, t};
}

double Entropy::regularized(double s, double h) const { return regularized_with_slope(s, h).value; }

double Entropy::regularized_derivative(double s, double h) const { return regularized_with_slope(s, h).slope; }

double Entropy::regularized_second_derivative(double s, double h) const {
  const Resolvent j = resolvent(s, h);
  if (s < 1.0 + h) return 1.0 / (j.value + h);
  if (domain_ == YosidaDomain::UnitInterval) return 1.0 / h;
  const double c = second_derivative(j.value);
  return c / (1.0 + h * c);
}

// ---------------------------------------------------------------------------

InteractionMatrix::InteractionMatrix(Eigen::MatrixXd a) : a_(std::move(a)) {
  if (a_.rows() != a_.cols() || a_.rows() < 1) throw ValidationError("interaction matrix must be square");
  if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw ValidationError("interaction matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_, Eigen::EigenvaluesOnly);
  lambda_max_ = eig.eigenvalues().maxCoeff();
  if (!(lambda_max_ > 0.0)) throw ValidationError("interaction matrix needs a positive eigenvalue");
}

InteractionMatrix InteractionMatrix::uniform_off_diagonal(int n, double chi) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, chi);
  a.diagonal().setZero();
  return InteractionMatrix(std::move(a));
}

double multiwell(const Eigen::VectorXd& v, const InteractionMatrix& a, const Entropy& entropy) {
  if (v.size() != a.size()) throw ShapeError("multiwell: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0)) throw DomainError("multiwell: component " + std::to_string(i) + " is not positive");
    s += entropy.value(v(i));
  }
  return s - 0.5 * v.dot(a.matrix() * v);
}

double multiwell_regularized(const Eigen::VectorXd& v, const InteractionMatrix& a, const Entropy& entropy,
                             double h) {
  if (v.size() != a.size()) throw ShapeError("multiwell: dimension mismatch");
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += entropy.regularized(v(i), h);
  return s - 0.5 * v.dot(a.matrix() * v);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> multiwell_gradient(const Eigen::VectorXd& v, const InteractionMatrix& a,
                                                               const Entropy& entropy, double h) {
  if (v.size() != a.size()) throw ShapeError("multiwell: dimension mismatch");
  Eigen::VectorXd entropic(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    entropic(i) = h > 0.0 ? entropy.regularized_derivative(v(i), h) : entropy.derivative(v(i));
  }
  return {entropic, -(a.matrix() * v)};
}

}  // namespace mcps
