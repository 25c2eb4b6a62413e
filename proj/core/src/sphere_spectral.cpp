#include "mcps/sphere_spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mcps/error.hpp"
#include "mcps/parallel.hpp"

namespace mcps {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ---------------------------------------------------------------------------
// HarmonicBasis

HarmonicBasis HarmonicBasis::build(int lmax, double radius) {
  if (lmax < 2) throw InvalidParameter("lmax must be >= 2, got " + std::to_string(lmax));
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidParameter("radius must be positive and finite");
  }
  HarmonicBasis b;
  b.lmax_ = lmax;
  b.radius_ = radius;
  const double r2 = radius * radius;
  b.degree_eigenvalues_.resize(static_cast<std::size_t>(lmax) + 1);
  for (int l = 0; l <= lmax; ++l) {
    b.degree_eigenvalues_[static_cast<std::size_t>(l)] = static_cast<double>(l) * (l + 1) / r2;
  }
  const std::size_t n = mode_count(lmax);
  b.mode_eigenvalues_.resize(static_cast<Eigen::Index>(n));
  b.degree_.resize(n);
  b.order_.resize(n);
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      const std::size_t k = mode_index(l, m);
      b.degree_[k] = l;
      b.order_[k] = m;
      b.mode_eigenvalues_(static_cast<Eigen::Index>(k)) = b.degree_eigenvalues_[static_cast<std::size_t>(l)];
    }
  }
  return b;
}

double HarmonicBasis::area() const noexcept { return 4.0 * kPi * radius_ * radius_; }

// ---------------------------------------------------------------------------
// Quadrature

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidParameter("gauss_legendre needs n >= 1");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

QuadratureGrid::QuadratureGrid(int nlat, int nlon, double radius)
    : nlat_(nlat), nlon_(nlon), radius_(radius) {
  if (nlat < 2 || nlon < 2) throw ShapeError("quadrature grid needs nlat, nlon >= 2");
  if (!(radius > 0.0)) throw InvalidParameter("radius must be positive");
  std::vector<double> nodes;
  std::vector<double> w;
  gauss_legendre(nlat, nodes, w);
  theta_.resize(static_cast<std::size_t>(nlat));
  x_.resize(static_cast<std::size_t>(nlat));
  row_weight_.resize(static_cast<std::size_t>(nlat));
  const double dlon = 2.0 * kPi / nlon;
  for (int j = 0; j < nlat; ++j) {
    // Colatitude ascending from the north pole.
    const auto src = static_cast<std::size_t>(nlat - 1 - j);
    const auto dst = static_cast<std::size_t>(j);
    x_[dst] = nodes[src];
    theta_[dst] = std::acos(nodes[src]);
    row_weight_[dst] = w[src] * dlon * radius * radius;
  }
}

QuadratureGrid QuadratureGrid::for_basis(const HarmonicBasis& basis) {
  return QuadratureGrid(2 * (basis.lmax() + 1), 4 * (basis.lmax() + 1), basis.radius());
}

double QuadratureGrid::longitude(int k) const { return 2.0 * kPi * k / nlon_; }

double QuadratureGrid::total_weight() const {
  double s = 0.0;
  for (double w : row_weight_) s += w * nlon_;
  return s;
}

// ---------------------------------------------------------------------------
// SphereTransform

SphereTransform::SphereTransform(int lmax, double radius)
    : SphereTransform(HarmonicBasis::build(lmax, radius),
                      QuadratureGrid::for_basis(HarmonicBasis::build(lmax, radius))) {}

SphereTransform::SphereTransform(HarmonicBasis basis, QuadratureGrid grid)
    : basis_(std::move(basis)), grid_(std::move(grid)) {
  const int lmax = basis_.lmax();
  if (grid_.nlat() < 2 * (lmax + 1) || grid_.nlon() < 4 * (lmax + 1)) {
    throw ShapeError("grid " + std::to_string(grid_.nlat()) + "x" + std::to_string(grid_.nlon()) +
                     " too coarse for lmax " + std::to_string(lmax));
  }
  if (std::abs(grid_.radius() - basis_.radius()) > 1e-14 * basis_.radius()) {
    throw ShapeError("grid and basis radii differ");
  }
  const double inv_r = 1.0 / basis_.radius();
  const double sqrt2 = std::numbers::sqrt2;
  ntri_ = static_cast<std::size_t>((lmax + 1) * (lmax + 2) / 2);
  const auto nlat = static_cast<std::size_t>(grid_.nlat());
  plm_.assign(nlat * ntri_, 0.0);
  dplm_.assign(nlat * ntri_, 0.0);
  d2plm_.assign(nlat * ntri_, 0.0);

  std::vector<double> p(ntri_);
  for (int j = 0; j < grid_.nlat(); ++j) {
    const double x = grid_.cos_colatitude(j);
    const double s = std::sin(grid_.colatitude(j));
    // Fully normalized associated Legendre functions (unit sphere), stable
    // three-term recurrence in l for each m.
    p[tri(0, 0)] = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 1; m <= lmax; ++m) {
      p[tri(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[tri(m - 1, m - 1)];
    }
    for (int m = 0; m < lmax; ++m) {
      p[tri(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * p[tri(m, m)];
    }
    for (int m = 0; m <= lmax; ++m) {
      for (int l = m + 2; l <= lmax; ++l) {
        const double ll = static_cast<double>(l) * l;
        const double mm = static_cast<double>(m) * m;
        const double a = std::sqrt((4.0 * ll - 1.0) / (ll - mm));
        const double lm1 = static_cast<double>(l - 1) * (l - 1);
        const double b = std::sqrt((lm1 - mm) / (4.0 * lm1 - 1.0));
        p[tri(l, m)] = a * (x * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
      }
    }
    const std::size_t row = static_cast<std::size_t>(j) * ntri_;
    const double cot = x / s;
    for (int l = 0; l <= lmax; ++l) {
      for (int m = 0; m <= l; ++m) {
        const double scale = inv_r * (m == 0 ? 1.0 : sqrt2);
        const double pl = p[tri(l, m)];
        const double plm1 = (l > m) ? p[tri(l - 1, m)] : 0.0;
        const double c = std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (static_cast<double>(l) * l - static_cast<double>(m) * m));
        const double dp = (l == 0) ? 0.0 : (l * x * pl - (l > m ? c * plm1 : 0.0)) / s;
        const double d2p = -cot * dp - (static_cast<double>(l) * (l + 1) - static_cast<double>(m) * m / (s * s)) * pl;
        plm_[row + tri(l, m)] = scale * pl;
        dplm_[row + tri(l, m)] = scale * dp;
        d2plm_[row + tri(l, m)] = scale * d2p;
      }
    }
  }

  const auto nlon = static_cast<std::size_t>(grid_.nlon());
  cos_.assign(static_cast<std::size_t>(lmax + 1) * nlon, 0.0);
  sin_.assign(static_cast<std::size_t>(lmax + 1) * nlon, 0.0);
  for (int m = 0; m <= lmax; ++m) {
    for (int k = 0; k < grid_.nlon(); ++k) {
      // Reduce m*k modulo nlon so the angle is exact in integer arithmetic.
      const long idx = (static_cast<long>(m) * k) % grid_.nlon();
      const double ang = 2.0 * kPi * static_cast<double>(idx) / grid_.nlon();
      cos_[static_cast<std::size_t>(m) * nlon + static_cast<std::size_t>(k)] = std::cos(ang);
      sin_[static_cast<std::size_t>(m) * nlon + static_cast<std::size_t>(k)] = std::sin(ang);
    }
  }
}

void SphereTransform::check_field(int lmax) const {
  if (lmax != basis_.lmax()) {
    throw ShapeError("field lmax " + std::to_string(lmax) + " does not match transform lmax " +
                     std::to_string(basis_.lmax()));
  }
}

SpectralField SphereTransform::analysis(std::span<const double> values) const {
  if (values.size() != grid_.size()) {
    throw ShapeError("analysis: expected " + std::to_string(grid_.size()) + " grid values, got " +
                     std::to_string(values.size()));
  }
  const int lmax = basis_.lmax();
  const int nlat = grid_.nlat();
  const auto nlon = static_cast<std::size_t>(grid_.nlon());
  const auto nm = static_cast<std::size_t>(lmax + 1);

  // Longitude sums per latitude row, rows are independent.
  std::vector<double> fc(static_cast<std::size_t>(nlat) * nm, 0.0);
  std::vector<double> fs(static_cast<std::size_t>(nlat) * nm, 0.0);
  parallel_for(static_cast<std::size_t>(nlat), [&](std::size_t j) {
    const double* row = values.data() + j * nlon;
    for (std::size_t m = 0; m < nm; ++m) {
      const double* c = cos_.data() + m * nlon;
      const double* s = sin_.data() + m * nlon;
      double ac = 0.0;
      double as = 0.0;
      for (std::size_t k = 0; k < nlon; ++k) {
        ac += row[k] * c[k];
        as += row[k] * s[k];
      }
      fc[j * nm + m] = ac * grid_.weight(static_cast<int>(j));
      fs[j * nm + m] = as * grid_.weight(static_cast<int>(j));
    }
  });

  SpectralField out = SpectralField::zero(lmax);
  // Legendre sums per order m, latitudes accumulated in ascending order.
  parallel_for(nm, [&](std::size_t mu) {
    const int m = static_cast<int>(mu);
    for (int l = m; l <= lmax; ++l) {
      double ac = 0.0;
      double as = 0.0;
      for (int j = 0; j < nlat; ++j) {
        const double pv = plm_[static_cast<std::size_t>(j) * ntri_ + tri(l, m)];
        ac += pv * fc[static_cast<std::size_t>(j) * nm + mu];
        as += pv * fs[static_cast<std::size_t>(j) * nm + mu];
      }
      out(l, m) = ac;
      if (m > 0) out(l, -m) = as;
    }
  });
  return out;
}

Eigen::VectorXd SphereTransform::synthesis(const SpectralField& field) const {
  check_field(field.lmax);
  const int lmax = basis_.lmax();
  const int nlat = grid_.nlat();
  const auto nlon = static_cast<std::size_t>(grid_.nlon());
  const auto nm = static_cast<std::size_t>(lmax + 1);
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid_.size()));
  parallel_for(static_cast<std::size_t>(nlat), [&](std::size_t j) {
    std::vector<double> cm(nm, 0.0);
    std::vector<double> sm(nm, 0.0);
    const double* prow = plm_.data() + j * ntri_;
    for (int m = 0; m <= lmax; ++m) {
      double ac = 0.0;
      double as = 0.0;
      for (int l = m; l <= lmax; ++l) {
        ac += field(l, m) * prow[tri(l, m)];
        if (m > 0) as += field(l, -m) * prow[tri(l, m)];
      }
      cm[static_cast<std::size_t>(m)] = ac;
      sm[static_cast<std::size_t>(m)] = as;
    }
    double* row = out.data() + j * nlon;
    for (std::size_t k = 0; k < nlon; ++k) row[k] = 0.0;
    for (std::size_t m = 0; m < nm; ++m) {
      const double* c = cos_.data() + m * nlon;
      const double* s = sin_.data() + m * nlon;
      for (std::size_t k = 0; k < nlon; ++k) row[k] += cm[m] * c[k] + sm[m] * s[k];
    }
  });
  return out;
}

VectorSpectralField SphereTransform::analysis(const Eigen::MatrixXd& values) const {
  VectorSpectralField out = VectorSpectralField::zero(basis_.lmax(), static_cast<int>(values.cols()));
  for (Eigen::Index i = 0; i < values.cols(); ++i) {
    const Eigen::VectorXd col = values.col(i);
    out.coeffs.col(i) = analysis(std::span<const double>(col.data(), static_cast<std::size_t>(col.size()))).coeffs;
  }
  return out;
}

Eigen::MatrixXd SphereTransform::synthesis(const VectorSpectralField& field) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(grid_.size()), field.components());
  for (int i = 0; i < field.components(); ++i) out.col(i) = synthesis(field.component(i));
  return out;
}

double SphereTransform::integrate(std::span<const double> values) const {
  if (values.size() != grid_.size()) throw ShapeError("integrate: grid size mismatch");
  const auto nlon = static_cast<std::size_t>(grid_.nlon());
  double total = 0.0;
  for (int j = 0; j < grid_.nlat(); ++j) {
    double row = 0.0;
    const double* v = values.data() + static_cast<std::size_t>(j) * nlon;
    for (std::size_t k = 0; k < nlon; ++k) row += v[k];
    total += row * grid_.weight(j);
  }
  return total;
}

SphereTransform::Derivatives SphereTransform::synthesis_with_derivatives(const SpectralField& field) const {
  check_field(field.lmax);
  const int lmax = basis_.lmax();
  const int nlat = grid_.nlat();
  const auto nlon = static_cast<std::size_t>(grid_.nlon());
  const auto nm = static_cast<std::size_t>(lmax + 1);
  const auto npts = static_cast<Eigen::Index>(grid_.size());
  Derivatives d{Eigen::VectorXd::Zero(npts), Eigen::VectorXd::Zero(npts), Eigen::VectorXd::Zero(npts),
                Eigen::VectorXd::Zero(npts), Eigen::VectorXd::Zero(npts), Eigen::VectorXd::Zero(npts)};
  parallel_for(static_cast<std::size_t>(nlat), [&](std::size_t j) {
    // Per order: cosine/sine amplitudes of P, dP/dtheta, d2P/dtheta2.
    std::vector<double> c0(nm), s0(nm), c1(nm), s1(nm), c2(nm), s2(nm);
    const std::size_t row = j * ntri_;
    for (int m = 0; m <= lmax; ++m) {
      double a0 = 0, b0 = 0, a1 = 0, b1 = 0, a2 = 0, b2 = 0;
      for (int l = m; l <= lmax; ++l) {
        const double cc = field(l, m);
        const double ss = m > 0 ? field(l, -m) : 0.0;
        const double p = plm_[row + tri(l, m)];
        const double dp = dplm_[row + tri(l, m)];
        const double d2p = d2plm_[row + tri(l, m)];
        a0 += cc * p;
        b0 += ss * p;
        a1 += cc * dp;
        b1 += ss * dp;
        a2 += cc * d2p;
        b2 += ss * d2p;
      }
      const auto mu = static_cast<std::size_t>(m);
      c0[mu] = a0;
      s0[mu] = b0;
      c1[mu] = a1;
      s1[mu] = b1;
      c2[mu] = a2;
      s2[mu] = b2;
    }
    for (std::size_t k = 0; k < nlon; ++k) {
      const auto idx = static_cast<Eigen::Index>(j * nlon + k);
      double v = 0, vt = 0, vp = 0, vtt = 0, vtp = 0, vpp = 0;
      for (std::size_t m = 0; m < nm; ++m) {
        const double c = cos_[m * nlon + k];
        const double s = sin_[m * nlon + k];
        const double md = static_cast<double>(m);
        v += c0[m] * c + s0[m] * s;
        vt += c1[m] * c + s1[m] * s;
        vtt += c2[m] * c + s2[m] * s;
        // d/dlon of cos(m lon) = -m sin, of sin(m lon) = m cos.
        vp += md * (-c0[m] * s + s0[m] * c);
        vtp += md * (-c1[m] * s + s1[m] * c);
        vpp += -md * md * (c0[m] * c + s0[m] * s);
      }
      d.value(idx) = v;
      d.d_theta(idx) = vt;
      d.d_phi(idx) = vp;
      d.d_theta_theta(idx) = vtt;
      d.d_theta_phi(idx) = vtp;
      d.d_phi_phi(idx) = vpp;
    }
  });
  return d;
}

double SphereTransform::harmonic(int l, int m, int j, int k) const {
  const int am = std::abs(m);
  const double p = plm_[static_cast<std::size_t>(j) * ntri_ + tri(l, am)];
  const auto nlon = static_cast<std::size_t>(grid_.nlon());
  const std::size_t at = static_cast<std::size_t>(am) * nlon + static_cast<std::size_t>(k);
  if (m == 0) return p;
  return m > 0 ? p * cos_[at] : p * sin_[at];
}

// ---------------------------------------------------------------------------
// Diagonal operators

SpectralField laplace_beltrami(const SpectralField& f, const HarmonicBasis& basis) {
  if (f.lmax != basis.lmax()) throw ShapeError("laplace_beltrami: lmax mismatch");
  return {f.lmax, -f.coeffs.cwiseProduct(basis.mode_eigenvalues())};
}

VectorSpectralField laplace_beltrami(const VectorSpectralField& f, const HarmonicBasis& basis) {
  if (f.lmax != basis.lmax()) throw ShapeError("laplace_beltrami: lmax mismatch");
  return {f.lmax, -(basis.mode_eigenvalues().asDiagonal() * f.coeffs)};
}

SpectralField project_mean_free(SpectralField f) {
  f.coeffs(0) = 0.0;
  return f;
}

SpectralField project_k2(SpectralField f) {
  f.coeffs.head(4).setZero();
  return f;
}

double inner(const SpectralField& f, const SpectralField& g) {
  if (f.lmax != g.lmax) throw ShapeError("inner: lmax mismatch");
  return f.coeffs.dot(g.coeffs);
}

double l2_norm(const SpectralField& f) { return f.coeffs.norm(); }

double h1_seminorm(const SpectralField& f, const HarmonicBasis& basis) {
  if (f.lmax != basis.lmax()) throw ShapeError("h1_seminorm: lmax mismatch");
  return std::sqrt(f.coeffs.cwiseAbs2().dot(basis.mode_eigenvalues()));
}

double h2_seminorm(const SpectralField& f, const HarmonicBasis& basis) {
  if (f.lmax != basis.lmax()) throw ShapeError("h2_seminorm: lmax mismatch");
  return f.coeffs.cwiseProduct(basis.mode_eigenvalues()).norm();
}

SpectralField constant_field(double c, const HarmonicBasis& basis) {
  SpectralField f = SpectralField::zero(basis.lmax());
  f.coeffs(0) = c * std::sqrt(basis.area());
  return f;
}

double mean_value(const SpectralField& f, const HarmonicBasis& basis) {
  return f.coeffs(0) / std::sqrt(basis.area());
}

SpectralField resized(const SpectralField& f, int lmax) {
  SpectralField out = SpectralField::zero(lmax);
  const auto n = static_cast<Eigen::Index>(std::min(mode_count(lmax), mode_count(f.lmax)));
  out.coeffs.head(n) = f.coeffs.head(n);
  return out;
}

VectorSpectralField resized(const VectorSpectralField& f, int lmax) {
  VectorSpectralField out = VectorSpectralField::zero(lmax, f.components());
  const auto n = static_cast<Eigen::Index>(std::min(mode_count(lmax), mode_count(f.lmax)));
  out.coeffs.topRows(n) = f.coeffs.topRows(n);
  return out;
}

}  // namespace mcps
