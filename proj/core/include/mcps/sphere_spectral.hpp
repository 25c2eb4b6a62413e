#pragma once

// Real spherical harmonics on the sphere of radius R: basis, Gauss-Legendre
// quadrature grid, analysis/synthesis and the diagonal operators built on them.
//
// Conventions
//   * Harmonics are orthonormal in L2 of the sphere of radius R, so a
//     coefficient carries units of (field x length) and Parseval reads
//     sum(a^2) = integral of f^2.
//   * Mode (l, m), -l <= m <= l, lives at index l*l + l + m. Positive m is the
//     cos(m*lon) harmonic, negative m the sin(|m|*lon) one.
//   * No Condon-Shortley phase. Degree 1 is (y, z, x)/R up to normalization.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mcps {

constexpr std::size_t mode_count(int lmax) {
  return static_cast<std::size_t>(lmax + 1) * static_cast<std::size_t>(lmax + 1);
}

constexpr std::size_t mode_index(int l, int m) {
  return static_cast<std::size_t>(l * l + l + m);
}

class HarmonicBasis {
 public:
  /// Throws InvalidParameter for lmax < 2 or radius <= 0.
  static HarmonicBasis build(int lmax, double radius);

  int lmax() const noexcept { return lmax_; }
  double radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return mode_count(lmax_); }
  double area() const noexcept;

  /// l(l+1)/R^2, the eigenvalue of -Laplace-Beltrami on degree l.
  double eigenvalue(int l) const { return degree_eigenvalues_.at(static_cast<std::size_t>(l)); }

  /// Eigenvalue per mode index.
  const Eigen::VectorXd& mode_eigenvalues() const noexcept { return mode_eigenvalues_; }

  int degree_of(std::size_t k) const { return degree_.at(k); }
  int order_of(std::size_t k) const { return order_.at(k); }

 private:
  HarmonicBasis() = default;

  int lmax_ = 0;
  double radius_ = 0.0;
  std::vector<double> degree_eigenvalues_;
  Eigen::VectorXd mode_eigenvalues_;
  std::vector<int> degree_;
  std::vector<int> order_;
};

/// Gauss-Legendre in cos(colatitude) times equispaced longitudes, weights
/// scaled to the area 4 pi R^2.
class QuadratureGrid {
 public:
  QuadratureGrid(int nlat, int nlon, double radius);

  /// nlat = 2(lmax+1), nlon = 4(lmax+1).
  static QuadratureGrid for_basis(const HarmonicBasis& basis);

  int nlat() const noexcept { return nlat_; }
  int nlon() const noexcept { return nlon_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nlat_) * static_cast<std::size_t>(nlon_);
  }
  double radius() const noexcept { return radius_; }

  double colatitude(int j) const { return theta_.at(static_cast<std::size_t>(j)); }
  double cos_colatitude(int j) const { return x_.at(static_cast<std::size_t>(j)); }
  double longitude(int k) const;

  /// Area weight of every point on latitude row j.
  double weight(int j) const { return row_weight_.at(static_cast<std::size_t>(j)); }
  double total_weight() const;

  /// Flat index of (latitude j, longitude k); row-major in latitude.
  std::size_t index(int j, int k) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nlon_) + static_cast<std::size_t>(k);
  }

 private:
  int nlat_;
  int nlon_;
  double radius_;
  std::vector<double> theta_;
  std::vector<double> x_;
  std::vector<double> row_weight_;
};

/// Coefficients of a scalar field, indexed by mode_index(l, m).
struct SpectralField {
  int lmax = 0;
  Eigen::VectorXd coeffs;

  static SpectralField zero(int lmax) { return {lmax, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mode_count(lmax)))}; }

  double& operator()(int l, int m) { return coeffs(static_cast<Eigen::Index>(mode_index(l, m))); }
  double operator()(int l, int m) const { return coeffs(static_cast<Eigen::Index>(mode_index(l, m))); }
};

/// N scalar fields sharing a basis: rows are modes, columns components.
struct VectorSpectralField {
  int lmax = 0;
  Eigen::MatrixXd coeffs;

  static VectorSpectralField zero(int lmax, int components) {
    return {lmax, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(mode_count(lmax)), components)};
  }
  int components() const noexcept { return static_cast<int>(coeffs.cols()); }
  SpectralField component(int i) const { return {lmax, coeffs.col(i)}; }
};

/// Precomputed Legendre and Fourier tables for one (basis, grid) pair.
class SphereTransform {
 public:
  /// Throws ShapeError if the grid violates the oversampling rule.
  SphereTransform(HarmonicBasis basis, QuadratureGrid grid);
  SphereTransform(int lmax, double radius);

  const HarmonicBasis& basis() const noexcept { return basis_; }
  const QuadratureGrid& grid() const noexcept { return grid_; }
  int lmax() const noexcept { return basis_.lmax(); }

  SpectralField analysis(std::span<const double> values) const;
  Eigen::VectorXd synthesis(const SpectralField& field) const;

  /// Column-wise transforms of an (points x N) grid array.
  VectorSpectralField analysis(const Eigen::MatrixXd& values) const;
  Eigen::MatrixXd synthesis(const VectorSpectralField& field) const;

  /// Quadrature of grid values over the sphere.
  double integrate(std::span<const double> values) const;

  /// Field and its partial derivatives in (colatitude, longitude) on the grid.
  struct Derivatives {
    Eigen::VectorXd value;
    Eigen::VectorXd d_theta;
    Eigen::VectorXd d_phi;
    Eigen::VectorXd d_theta_theta;
    Eigen::VectorXd d_theta_phi;
    Eigen::VectorXd d_phi_phi;
  };
  Derivatives synthesis_with_derivatives(const SpectralField& field) const;

  /// Value of the real harmonic (l, m) at grid latitude j and longitude k.
  double harmonic(int l, int m, int j, int k) const;

 private:
  std::size_t tri(int l, int m) const noexcept {
    return static_cast<std::size_t>(l * (l + 1) / 2 + m);
  }
  void check_field(int lmax) const;

  HarmonicBasis basis_;
  QuadratureGrid grid_;
  std::size_t ntri_ = 0;
  // [lat][tri(l,m)], including the 1/R and sqrt(2) (m > 0) factors.
  std::vector<double> plm_;
  std::vector<double> dplm_;
  std::vector<double> d2plm_;
  // [m][k]
  std::vector<double> cos_;
  std::vector<double> sin_;
};

// Diagonal operators. All of them act on coefficients only.

SpectralField laplace_beltrami(const SpectralField& f, const HarmonicBasis& basis);
VectorSpectralField laplace_beltrami(const VectorSpectralField& f, const HarmonicBasis& basis);

/// Zeroes the degree-0 coefficient.
SpectralField project_mean_free(SpectralField f);
/// Zeroes degrees 0 and 1 (orthogonal complement of span{1, nu_1, nu_2, nu_3}).
SpectralField project_k2(SpectralField f);

double inner(const SpectralField& f, const SpectralField& g);
double l2_norm(const SpectralField& f);
/// ||grad f||; sum of lambda_l a^2 under the root.
double h1_seminorm(const SpectralField& f, const HarmonicBasis& basis);
/// ||Laplacian f||.
double h2_seminorm(const SpectralField& f, const HarmonicBasis& basis);

/// Field equal to c everywhere.
SpectralField constant_field(double c, const HarmonicBasis& basis);
double mean_value(const SpectralField& f, const HarmonicBasis& basis);

/// Zero-pads or truncates to a new maximum degree.
SpectralField resized(const SpectralField& f, int lmax);
VectorSpectralField resized(const VectorSpectralField& f, int lmax);

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace mcps
