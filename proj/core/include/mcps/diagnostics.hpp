#pragma once

// Separation monitoring, De Giorgi level-set bookkeeping, the recursive decay
// lemma and an empirical probe of the L^p / H^1 embedding constant.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mcps/fields.hpp"

namespace mcps {

struct SeparationReport {
  double t = 0.0;
  double delta_min = 0.0;  ///< min_i min_x phi_i
  double delta_max = 0.0;  ///< max_i max_x phi_i
  Eigen::VectorXd component_min;
  Eigen::VectorXd component_max;
  /// min(delta_min, (1 - delta_max)/(N - 1)): the largest delta with
  /// delta <= phi <= 1 - (N-1) delta.
  double sep_delta = 0.0;
  bool breakdown = false;  ///< delta_min <= 0 or delta_max >= 1
  bool separated(double threshold) const { return sep_delta > threshold; }
};

/// Extrema over the quadrature grid.
SeparationReport separation_monitor(const PhaseField& phi, const SphereTransform& transform, double t = 0.0);
/// Same from grid values (points x N).
SeparationReport separation_monitor(const Eigen::MatrixXd& grid, double t = 0.0);

struct LevelSetMeasures {
  double delta = 0.0;
  std::vector<double> levels;  ///< k_n = delta + delta / 2^n
  /// measure[n][i] = |{x : phi_i(x) <= k_n}|
  std::vector<std::vector<double>> measure;
};

/// Quadrature sums of indicators. Throws InvalidParameter unless 0 < delta < 1/N.
LevelSetMeasures level_set_measures(const Eigen::MatrixXd& grid, const QuadratureGrid& quadrature, double delta,
                                    int n_max);

struct DeGiorgiResult {
  double theta = 0.0;             ///< C^{-1/gamma} b^{-1/gamma^2}
  std::vector<double> log_y;      ///< ln y_n of the equality recursion
  std::vector<double> log_bound;  ///< ln(theta b^{-n/gamma})
  bool bound_holds = false;       ///< y_n <= theta b^{-n/gamma} for every n
  bool tends_to_zero = false;
};

/// Runs y_{n+1} = C b^n y_n^{1+gamma}. The iteration is carried in the
/// normalized variable z_n = y_n / (theta b^{-n/gamma}), which satisfies
/// z_{n+1} = z_n^{1+gamma}; the raw recursion amplifies round-off by
/// (1+gamma)^n and loses the comparison at y_0 = theta. A y_0 within relative
/// 1e-12 of theta is treated as theta.
DeGiorgiResult degiorgi_decay(double y0, double c, double b, double gamma, int n_max);

struct SobolevProbe {
  std::vector<double> p;
  std::vector<double> constant;  ///< max_f ||f||_{L^p} / (sqrt(p) ||f||_{H^1})
};

/// Random band-limited fields with degrees 0..l_max and decaying spectra.
SobolevProbe sobolev_constant_probe(const SphereTransform& transform, const std::vector<double>& p_list, int samples,
                                    std::uint64_t seed);

/// ||f||_{L^p} by quadrature.
double lp_norm(const Eigen::VectorXd& grid_values, const SphereTransform& transform, double p);

}  // namespace mcps
