#include "mcps/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <span>

#include "mcps/error.hpp"
#include "mcps/random.hpp"

namespace mcps {

SeparationReport separation_monitor(const Eigen::MatrixXd& grid, double t) {
  if (grid.cols() < 2 || grid.rows() < 1) throw ShapeError("separation_monitor: need N >= 2 components");
  SeparationReport r;
  r.t = t;
  r.component_min = grid.colwise().minCoeff().transpose();
  r.component_max = grid.colwise().maxCoeff().transpose();
  r.delta_min = r.component_min.minCoeff();
  r.delta_max = r.component_max.maxCoeff();
  r.sep_delta = std::min(r.delta_min, (1.0 - r.delta_max) / static_cast<double>(grid.cols() - 1));
  r.breakdown = r.delta_min <= 0.0 || r.delta_max >= 1.0;
  return r;
}

SeparationReport separation_monitor(const PhaseField& phi, const SphereTransform& transform, double t) {
  return separation_monitor(phi.grid(transform), t);
}

LevelSetMeasures level_set_measures(const Eigen::MatrixXd& grid, const QuadratureGrid& quadrature, double delta,
                                    int n_max) {
  const auto n = grid.cols();
  if (static_cast<std::size_t>(grid.rows()) != quadrature.size()) throw ShapeError("level_set_measures: grid size");
  if (!(delta > 0.0 && delta < 1.0 / static_cast<double>(n))) {
    throw InvalidParameter("level_set_measures: delta must lie in (0, 1/N)");
  }
  if (n_max < 0) throw InvalidParameter("level_set_measures: n_max must be non-negative");
  LevelSetMeasures out;
  out.delta = delta;
  for (int k = 0; k <= n_max; ++k) {
    const double level = delta + delta / std::ldexp(1.0, k);
    out.levels.push_back(level);
    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < quadrature.nlat(); ++j) {
        int count = 0;
        for (int kk = 0; kk < quadrature.nlon(); ++kk) {
          if (grid(static_cast<Eigen::Index>(quadrature.index(j, kk)), i) <= level) ++count;
        }
        acc += count * quadrature.weight(j);
      }
      z[static_cast<std::size_t>(i)] = acc;
    }
    out.measure.push_back(std::move(z));
  }
  return out;
}

DeGiorgiResult degiorgi_decay(double y0, double c, double b, double gamma, int n_max) {
  if (!(c > 0.0) || !(b > 1.0) || !(gamma > 0.0) || !(y0 >= 0.0) || n_max < 0) {
    throw InvalidParameter("degiorgi_decay: need C > 0, b > 1, gamma > 0, y0 >= 0, n_max >= 0");
  }
  DeGiorgiResult r;
  const double log_theta = -std::log(c) / gamma - std::log(b) / (gamma * gamma);
  r.theta = std::exp(log_theta);
  r.bound_holds = true;
  // log z_n; z_0 = y0/theta. Within 1e-12 of the threshold counts as the
  // threshold, otherwise the round-off of theta itself grows like (1+gamma)^n.
  double log_z = y0 > 0.0 ? std::log(y0) - log_theta : -std::numeric_limits<double>::infinity();
  if (std::abs(log_z) <= 1e-12) log_z = 0.0;
  for (int k = 0; k <= n_max; ++k) {
    const double log_bound = log_theta - k * std::log(b) / gamma;
    r.log_bound.push_back(log_bound);
    r.log_y.push_back(log_bound + log_z);
    if (log_z > 0.0) r.bound_holds = false;
    log_z *= 1.0 + gamma;
  }
  // z_0 <= 1 keeps z_n <= 1 forever while the bound decays geometrically;
  // z_0 > 1 makes z_n grow doubly exponentially.
  r.tends_to_zero = y0 == 0.0 || std::log(y0) - log_theta <= 1e-12;
  return r;
}

double lp_norm(const Eigen::VectorXd& grid_values, const SphereTransform& transform, double p) {
  const Eigen::VectorXd pw = grid_values.array().abs().pow(p);
  return std::pow(transform.integrate(std::span<const double>(pw.data(), static_cast<std::size_t>(pw.size()))),
                  1.0 / p);
}

SobolevProbe sobolev_constant_probe(const SphereTransform& transform, const std::vector<double>& p_list, int samples,
                                    std::uint64_t seed) {
  for (double p : p_list) {
    if (!(p >= 2.0 && p <= 64.0)) throw InvalidParameter("sobolev probe: p must lie in [2, 64]");
  }
  const HarmonicBasis& basis = transform.basis();
  SobolevProbe out;
  out.p = p_list;
  out.constant.assign(p_list.size(), 0.0);
  CounterRng rng(seed, /*stream=*/4);
  for (int s = 0; s < samples; ++s) {
    SpectralField f = SpectralField::zero(basis.lmax());
    // Random spectral decay so both smooth and rough fields are sampled.
    const double decay = 0.5 + 2.5 * rng.uniform();
    for (int l = 0; l <= basis.lmax(); ++l) {
      const double amp = std::pow(1.0 + l, -decay);
      for (int m = -l; m <= l; ++m) f(l, m) = amp * rng.normal();
    }
    const Eigen::VectorXd g = transform.synthesis(f);
    const double h1 = std::sqrt(std::pow(l2_norm(f), 2) + std::pow(h1_seminorm(f, basis), 2));
    for (std::size_t i = 0; i < p_list.size(); ++i) {
      const double ratio = lp_norm(g, transform, p_list[i]) / (std::sqrt(p_list[i]) * h1);
      out.constant[i] = std::max(out.constant[i], ratio);
    }
  }
  return out;
}

}  // namespace mcps
