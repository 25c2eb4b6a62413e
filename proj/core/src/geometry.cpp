#include "mcps/geometry.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>

#include "mcps/error.hpp"

namespace mcps {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 combine(double a, const Vec3& x, double b, const Vec3& y) {
  return {a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]};
}
Vec3 add(const Vec3& x, const Vec3& y) { return {x[0] + y[0], x[1] + y[1], x[2] + y[2]}; }
double dot(const Vec3& x, const Vec3& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; }
Vec3 cross(const Vec3& x, const Vec3& y) {
  return {x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
}

double sphere_volume(double r) { return 4.0 * std::numbers::pi * r * r * r / 3.0; }

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return 0.0;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

SurfaceFunctionals GeometryKernel::evaluate(const SpectralField& u, double rho, const PhaseField& phi,
                                            const ModelParams& params, EnergyMode mode, double dilation) const {
  const SphereTransform& tr = *transform_;
  const QuadratureGrid& grid = tr.grid();
  const int lmax = tr.lmax();
  if (u.lmax > lmax || phi.coeffs.lmax > lmax) throw ShapeError("geometry: fields exceed the kernel's degree");
  if (phi.components() != params.components()) throw ShapeError("geometry: component mismatch");
  const double radius = params.radius;
  if (std::abs(grid.radius() - radius) > 1e-14 * radius) throw ShapeError("geometry: grid radius differs from params");

  const SphereTransform::Derivatives du = tr.synthesis_with_derivatives(resized(u, lmax));
  const int n = params.components();
  std::vector<SphereTransform::Derivatives> dphi;
  dphi.reserve(static_cast<std::size_t>(n));
  const VectorSpectralField phif = resized(phi.coeffs, lmax);
  for (int i = 0; i < n; ++i) dphi.push_back(tr.synthesis_with_derivatives(phif.component(i)));

  const Entropy entropy = params.entropy();
  const double base = radius * (1.0 + dilation);
  SurfaceFunctionals out;
  out.min_radius = std::numeric_limits<double>::infinity();
  out.mean_curvature_min = std::numeric_limits<double>::infinity();
  out.mean_curvature_max = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd v(n);
  Eigen::VectorXd vt(n);
  Eigen::VectorXd vp(n);

  for (int j = 0; j < grid.nlat(); ++j) {
    const double th = grid.colatitude(j);
    const double ct = std::cos(th);
    const double st = std::sin(th);
    // Parameter measure sin(theta) dtheta dlon for this row.
    const double dw = grid.weight(j) / (radius * radius);
    double row_w = 0.0, row_a = 0.0, row_v = 0.0, row_f1 = 0.0, row_f2 = 0.0, row_k = 0.0;
    for (int k = 0; k < grid.nlon(); ++k) {
      const auto p = static_cast<Eigen::Index>(grid.index(j, k));
      const double lon = grid.longitude(k);
      const double cp = std::cos(lon);
      const double sp = std::sin(lon);
      const double r = base + rho * du.value(p);
      if (!(r > 0.0)) {
        throw EmbeddingError("geometry: radial graph is not embedded (r = " + std::to_string(r) + ")");
      }
      out.min_radius = std::min(out.min_radius, r);
      const double rt = rho * du.d_theta(p);
      const double rp = rho * du.d_phi(p);
      const double rtt = rho * du.d_theta_theta(p);
      const double rtp = rho * du.d_theta_phi(p);
      const double rpp = rho * du.d_phi_phi(p);

      const Vec3 nn{st * cp, st * sp, ct};
      const Vec3 nt{ct * cp, ct * sp, -st};
      const Vec3 np{-st * sp, st * cp, 0.0};
      const Vec3 ntp{-ct * sp, ct * cp, 0.0};
      const Vec3 npp{-st * cp, -st * sp, 0.0};

      const Vec3 xt = combine(rt, nn, r, nt);
      const Vec3 xp = combine(rp, nn, r, np);
      const Vec3 xtt = combine(rtt - r, nn, 2.0 * rt, nt);  // n_tt = -n
      const Vec3 xtp = add(combine(rtp, nn, rt, np), combine(rp, nt, r, ntp));
      const Vec3 xpp = add(combine(rpp, nn, 2.0 * rp, np), Vec3{r * npp[0], r * npp[1], 0.0});

      const double e1 = dot(xt, xt);
      const double f1 = dot(xt, xp);
      const double g1 = dot(xp, xp);
      const Vec3 c = cross(xt, xp);
      const double jac = std::sqrt(dot(c, c));
      const Vec3 nu{c[0] / jac, c[1] / jac, c[2] / jac};
      const double e2 = dot(xtt, nu);
      const double f2 = dot(xtp, nu);
      const double g2 = dot(xpp, nu);
      const double det = jac * jac;
      const double h = -(e2 * g1 - 2.0 * f2 * f1 + g2 * e1) / det;
      const double gk = (e2 * g2 - f2 * f2) / det;
      const double da = jac / st * dw;
      out.mean_curvature_min = std::min(out.mean_curvature_min, h);
      out.mean_curvature_max = std::max(out.mean_curvature_max, h);

      double grad2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const auto& d = dphi[static_cast<std::size_t>(i)];
        v(i) = d.value(p);
        vt(i) = d.d_theta(p);
        vp(i) = d.d_phi(p);
        grad2 += (g1 * vt(i) * vt(i) - 2.0 * f1 * vt(i) * vp(i) + e1 * vp(i) * vp(i)) / det;
      }
      const double lphi = params.lambda.dot(v);
      const double psi = mode == EnergyMode::Exact ? multiwell(v, params.interaction, entropy)
                                                   : multiwell_regularized(v, params.interaction, entropy, params.h);

      row_w += 0.5 * h * h * da;
      row_a += da;
      row_v += r * r * r / 3.0 * dw;
      row_k += gk * da;
      row_f1 += -h * lphi * da;
      row_f2 += (0.5 * params.b * params.epsilon * grad2 + params.b / params.epsilon * psi +
                 0.5 * params.kappa * lphi * lphi) *
                da;
    }
    out.willmore += row_w;
    out.area += row_a;
    out.volume += row_v;
    out.gauss += row_k;
    out.f1 += row_f1;
    out.f2 += row_f2;
  }
  return out;
}

double lagrangian(const SurfaceFunctionals& f, const ModelParams& params, double rho, double lambda1) {
  const double lambda0 = -2.0 * params.sigma / params.radius;
  const double v0 = sphere_volume(params.radius);
  return params.kappa * f.willmore + params.sigma * f.area + (lambda0 + rho * lambda1) * (f.volume - v0) +
         rho * params.kappa * f.f1 + rho * rho * f.f2;
}

double taylor_c1(const ModelParams& params) {
  const double r2 = params.radius * params.radius;
  return (2.0 * params.kappa / r2 + params.sigma) * 4.0 * std::numbers::pi * r2;
}

double taylor_c2_printed(const ModelParams& params) {
  return -2.0 * params.kappa / params.radius * params.lambda.dot(params.alpha);
}

double taylor_c2_area(const ModelParams& params) {
  return taylor_c2_printed(params) * 4.0 * std::numbers::pi * params.radius * params.radius;
}

VariationReport variation_check(const GeometryKernel& kernel, const SpectralField& u, const PhaseField& phi,
                                const ModelParams& params, double rho_first, double rho_second) {
  const HarmonicBasis& basis = kernel.transform().basis();
  const SpectralField uf = resized(u, basis.lmax());
  const PhaseField phif{resized(phi.coeffs, basis.lmax())};
  const double radius = params.radius;
  const double r2 = radius * radius;
  const Eigen::VectorXd& lam = basis.mode_eigenvalues();
  const Eigen::VectorXd s = phif.coeffs.coeffs * params.lambda;
  const double mean_u = uf.coeffs(0) * std::sqrt(basis.area());

  double w2 = 0.0, a2 = 0.0, v2 = 0.0, f1p = 0.0, lap2 = 0.0, u2 = 0.0, ls2 = 0.0;
  for (Eigen::Index k = 0; k < uf.coeffs.size(); ++k) {
    const double a = uf.coeffs(k);
    w2 += (lam(k) * lam(k) - 2.0 * lam(k) / r2) * a * a;
    a2 += (lam(k) + 2.0 / r2) * a * a;
    v2 += 2.0 / radius * a * a;
    f1p += s(k) * (-lam(k) - 2.0 / r2) * a;
    lap2 += lam(k) * lam(k) * a * a;
    u2 += a * a;
  }
  // ||Lambda.phi|| from the grid, since it is not band-limited to u's degree.
  const Eigen::MatrixXd grid = kernel.transform().synthesis(phif.coeffs);
  const Eigen::VectorXd lphi2 = (grid * params.lambda).array().square();
  ls2 = kernel.transform().integrate(std::span<const double>(lphi2.data(), static_cast<std::size_t>(lphi2.size())));

  const double scale1 = std::sqrt(u2 * basis.area()) / radius;
  const double scale2 = lap2 + u2 / (r2 * r2);
  const double scale_f1 = std::sqrt(ls2) * (std::sqrt(lap2) + 2.0 * std::sqrt(u2) / r2);

  auto eval = [&](double rho) { return kernel.evaluate(uf, rho, phif, params); };
  struct Samples {
    SurfaceFunctionals minus, zero, plus;
  };
  auto sample = [&](double h) { return Samples{eval(-h), eval(0.0), eval(h)}; };

  const Samples s1 = sample(rho_first);
  const Samples s1h = sample(0.5 * rho_first);
  const Samples s2 = sample(rho_second);
  const Samples s2h = sample(0.5 * rho_second);

  auto first = [](double m, double p, double h) { return (p - m) / (2.0 * h); };
  auto second = [](double m, double z, double p, double h) { return (p - 2.0 * z + m) / (h * h); };

  VariationReport rep;
  auto push_first = [&](const char* name, double analytic, double scale, auto get) {
    VariationEntry e;
    e.name = name;
    e.analytic = analytic;
    e.finite_difference = first(get(s1.minus), get(s1.plus), rho_first);
    e.error = std::abs(e.finite_difference - analytic);
    e.error_half = std::abs(first(get(s1h.minus), get(s1h.plus), 0.5 * rho_first) - analytic);
    e.scale = std::max(std::abs(analytic), scale);
    rep.entries.push_back(e);
  };
  auto push_second = [&](const char* name, double analytic, double scale, auto get) {
    VariationEntry e;
    e.name = name;
    e.analytic = analytic;
    e.finite_difference = second(get(s2.minus), get(s2.zero), get(s2.plus), rho_second);
    e.error = std::abs(e.finite_difference - analytic);
    e.error_half = std::abs(second(get(s2h.minus), get(s2h.zero), get(s2h.plus), 0.5 * rho_second) - analytic);
    e.scale = std::max(std::abs(analytic), scale);
    rep.entries.push_back(e);
  };
  push_first("W'", 0.0, scale1, [](const SurfaceFunctionals& f) { return f.willmore; });
  push_first("A'", 2.0 / radius * mean_u, scale1, [](const SurfaceFunctionals& f) { return f.area; });
  push_first("V'", mean_u, scale1 * radius, [](const SurfaceFunctionals& f) { return f.volume; });
  push_second("W''", w2, scale2, [](const SurfaceFunctionals& f) { return f.willmore; });
  push_second("A''", a2, scale2 * r2, [](const SurfaceFunctionals& f) { return f.area; });
  push_second("V''", v2, scale2 * r2 * radius, [](const SurfaceFunctionals& f) { return f.volume; });
  push_first("F1'", f1p, scale_f1, [](const SurfaceFunctionals& f) { return f.f1; });
  return rep;
}

TaylorReport taylor_check(const GeometryKernel& kernel, const SpectralField& u, const PhaseField& phi,
                          const ModelParams& params, const std::vector<double>& rho_list, double lambda1,
                          EnergyMode mode) {
  const SphereTransform& tr = kernel.transform();
  const HarmonicBasis& basis = tr.basis();
  const SpectralField uf = resized(u, basis.lmax());
  const PhaseField phif{resized(phi.coeffs, basis.lmax())};
  const double scale = std::max(1.0, uf.coeffs.cwiseAbs().maxCoeff());
  if (std::abs(uf.coeffs(0)) > 1e-14 * scale) throw ConstraintError("taylor_check: u must have zero mean");

  TaylorReport rep;
  rep.c1 = taylor_c1(params);
  rep.c2_printed = taylor_c2_printed(params);
  rep.c2_area = taylor_c2_area(params);
  rep.energy = energy(phif, Deformation{uf}, params, tr, mode).total;
  const double coupling = uf.coeffs.dot(phif.coeffs.coeffs * params.lambda);  // int u Lambda.phi
  const double r2 = params.radius * params.radius;
  rep.energy_corrected = rep.energy - 4.0 * params.kappa / r2 * coupling;

  std::vector<double> rhos;
  std::vector<double> res;
  std::vector<double> res_c;
  std::vector<double> lam1;
  for (double rho : rho_list) {
    SurfaceFunctionals f;
    try {
      f = kernel.evaluate(uf, rho, phif, params, mode);
    } catch (const EmbeddingError&) {
      ++rep.dropped;
      continue;
    }
    TaylorPoint pt;
    pt.rho = rho;
    pt.lagrangian = lagrangian(f, params, rho, lambda1);
    pt.residual = std::abs(pt.lagrangian - rep.c1 - rho * rep.c2_printed - rho * rho * rep.energy);
    pt.residual_corrected = std::abs(pt.lagrangian - rep.c1 - rho * rep.c2_area - rho * rho * rep.energy_corrected);
    pt.volume_defect = f.volume - sphere_volume(params.radius);
    rep.points.push_back(pt);
    rhos.push_back(rho);
    res.push_back(pt.residual);
    res_c.push_back(pt.residual_corrected);
    lam1.push_back(std::abs(rho * pt.volume_defect));
  }
  rep.slope = fit_slope(rhos, res);
  rep.slope_corrected = fit_slope(rhos, res_c);
  rep.lambda1_slope = fit_slope(rhos, lam1);
  return rep;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw InvalidParameter("logspace: need n >= 2 and 0 < lo < hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  return out;
}

}  // namespace mcps
