#pragma once

// Canham-Helfrich functionals on radial graphs r = R + rho u over the sphere,
// with finite-difference checks of their variations and of the second-order
// expansion of the constrained Lagrangian.

#include <vector>

#include "mcps/dynamics.hpp"

namespace mcps {

struct SurfaceFunctionals {
  double willmore = 0.0;  ///< W = 1/2 int H^2
  double area = 0.0;
  double volume = 0.0;
  double f1 = 0.0;        ///< -int H Lambda.phi
  double f2 = 0.0;        ///< int (b eps/2)|grad phi|^2 + (b/eps) Psi(phi) + kappa (Lambda.phi)^2/2
  double gauss = 0.0;     ///< int K, 4 pi for any embedded sphere
  double min_radius = 0.0;
  double mean_curvature_min = 0.0;
  double mean_curvature_max = 0.0;
};

/// Evaluates the functionals on r = R + rho u + dilation R. Fields are given
/// on `transform`'s basis or a coarser one (zero padded). phi is transported
/// by constant normal extension, i.e. it keeps its parameter-sphere values.
/// Throws EmbeddingError if r <= 0 somewhere on the grid.
class GeometryKernel {
 public:
  explicit GeometryKernel(const SphereTransform& transform) : transform_(&transform) {}

  SurfaceFunctionals evaluate(const SpectralField& u, double rho, const PhaseField& phi, const ModelParams& params,
                              EnergyMode mode = EnergyMode::Exact, double dilation = 0.0) const;

  const SphereTransform& transform() const noexcept { return *transform_; }

 private:
  const SphereTransform* transform_;
};

/// L_rho = kappa W + sigma A + (lambda0 + rho lambda1)(V - V0) + rho kappa F1 + rho^2 F2,
/// lambda0 = -2 sigma/R, V0 = 4 pi R^3/3.
double lagrangian(const SurfaceFunctionals& f, const ModelParams& params, double rho, double lambda1);

/// (2 kappa/R^2 + sigma) |Gamma_0|.
double taylor_c1(const ModelParams& params);
/// -(2 kappa/R) Lambda.alpha as printed (no area factor).
double taylor_c2_printed(const ModelParams& params);
/// kappa F1(Gamma_0) = -(2 kappa/R) |Gamma_0| Lambda.alpha.
double taylor_c2_area(const ModelParams& params);

struct VariationEntry {
  const char* name = "";
  double analytic = 0.0;
  double finite_difference = 0.0;  ///< at step rho_fd
  double error = 0.0;              ///< |fd - analytic| at rho_fd
  double error_half = 0.0;         ///< same at rho_fd / 2
  double scale = 1.0;              ///< normalization for relative reporting
};

struct VariationReport {
  std::vector<VariationEntry> entries;  ///< W', A', V', W'', A'', V'', F1'
};

/// Central differences in rho at rho = 0 against the closed-form first and
/// second variations. rho_first / rho_second are the steps for the two orders.
VariationReport variation_check(const GeometryKernel& kernel, const SpectralField& u, const PhaseField& phi,
                                const ModelParams& params, double rho_first = 1e-4, double rho_second = 1e-3);

struct TaylorPoint {
  double rho = 0.0;
  double lagrangian = 0.0;
  double residual = 0.0;            ///< |L - C1 - rho C2 - rho^2 E| with the printed C2, E
  double residual_corrected = 0.0;  ///< with the area factor in C2 and the sign-corrected coupling term
  double volume_defect = 0.0;       ///< V - V0
};

struct TaylorReport {
  std::vector<TaylorPoint> points;
  double c1 = 0.0;
  double c2_printed = 0.0;
  double c2_area = 0.0;
  double energy = 0.0;           ///< E(phi, u) as printed
  double energy_corrected = 0.0; ///< E with -2 kappa u Lambda.phi / R^2
  double slope = 0.0;            ///< least-squares slope of log residual vs log rho
  double slope_corrected = 0.0;
  double lambda1_slope = 0.0;    ///< slope of log |rho (V - V0)|, the lambda1 sensitivity
  int dropped = 0;               ///< rho values discarded for embedding failure
};

/// Evaluates L_rho on rho_list; E uses `mode` for Psi. Requires mean-free u.
TaylorReport taylor_check(const GeometryKernel& kernel, const SpectralField& u, const PhaseField& phi,
                          const ModelParams& params, const std::vector<double>& rho_list, double lambda1 = 1.0,
                          EnergyMode mode = EnergyMode::Exact);

/// n log-spaced values from lo to hi.
std::vector<double> logspace(double lo, double hi, int n);

}  // namespace mcps
