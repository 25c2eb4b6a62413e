#include "mcps/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>

#include "mcps/checkpoint.hpp"
#include "mcps/diagnostics.hpp"
#include "mcps/error.hpp"
#include "mcps/geometry.hpp"
#include "mcps/random.hpp"

namespace mcps {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Verdict below(std::string id, std::string description, double value, double limit) {
  return {std::move(id), std::move(description), value < limit, value, "< " + fmt(limit), false};
}

Verdict at_most(std::string id, std::string description, double value, double limit) {
  return {std::move(id), std::move(description), value <= limit, value, "<= " + fmt(limit), false};
}

Verdict at_least(std::string id, std::string description, double value, double limit) {
  return {std::move(id), std::move(description), value >= limit, value, ">= " + fmt(limit), false};
}

Verdict within(std::string id, std::string description, double value, double lo, double hi) {
  return {std::move(id), std::move(description), value >= lo && value <= hi, value,
          "in [" + fmt(lo) + ", " + fmt(hi) + "]", false};
}

Verdict flag(std::string id, std::string description, bool ok) {
  return {std::move(id), std::move(description), ok, ok ? 1.0 : 0.0, "true", false};
}

Verdict info(std::string id, std::string description, double value, std::string expectation = "-") {
  return {std::move(id), std::move(description), true, value, std::move(expectation), true};
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min()); }

RunConfig with_dt(RunConfig c, double dt) {
  c.params.dt = dt;
  if (c.auto_stabilization) c.params.stabilization = c.params.auto_stabilization();
  return c;
}

std::span<const double> span_of(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

void CheckReport::append(const CheckReport& other) {
  verdicts.insert(verdicts.end(), other.verdicts.begin(), other.verdicts.end());
}

std::vector<std::string> CheckReport::failures() const {
  std::vector<std::string> out;
  for (const auto& v : verdicts) {
    if (!v.informational && !v.passed) out.push_back(v.id);
  }
  return out;
}

void CheckReport::print(std::ostream& out) const {
  char buf[64];
  for (const auto& v : verdicts) {
    std::snprintf(buf, sizeof buf, "%.6g", v.value);
    out << (v.informational ? "INFO" : v.passed ? "PASS" : "FAIL") << ' ' << v.id << " value=" << buf
        << " expect=" << v.expectation << "  " << v.description << '\n';
  }
}

bool has_failure_with_prefix(const CheckReport& report, const std::string& prefix) {
  for (const auto& id : report.failures()) {
    if (id.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

RunTrace trace_run(const RunConfig& config, std::uint64_t steps, int record_every, int grid_every) {
  if (record_every < 1 || grid_every < 1) throw InvalidParameter("trace_run: cadences must be >= 1");
  Simulation sim(config);
  const HarmonicBasis& basis = sim.transform().basis();
  const double root_area = std::sqrt(basis.area());
  const Eigen::VectorXd& alpha = sim.params().alpha;
  RunTrace tr;
  tr.dt = sim.params().dt;
  tr.max_energy_increase = -std::numeric_limits<double>::infinity();

  auto observe = [&] {
    const SimState& s = sim.state();
    const Eigen::MatrixXd& g = sim.phi_grid();
    const Eigen::VectorXd mass = s.phi.coeffs.coeffs.row(0).transpose() / root_area;
    tr.max_mass_error = std::max(tr.max_mass_error, (mass - alpha).cwiseAbs().maxCoeff());
    tr.max_sum_violation = std::max(tr.max_sum_violation, (g.rowwise().sum().array() - 1.0).abs().maxCoeff());
    tr.max_u_leak = std::max(tr.max_u_leak, s.u.k2_leak());
    if (s.step % static_cast<std::uint64_t>(record_every) == 0 || s.step == steps) {
      tr.t.push_back(s.t);
      tr.min_phi.push_back(g.minCoeff());
      tr.energy.push_back(sim.current_energy().total);
    }
    if (s.step % static_cast<std::uint64_t>(grid_every) == 0 || s.step == steps) {
      tr.grid_t.push_back(s.t);
      tr.grids.push_back(g);
    }
  };
  observe();
  for (std::uint64_t n = 0; n < steps; ++n) {
    const double before = sim.current_energy().total;
    sim.advance();
    tr.max_energy_increase = std::max(tr.max_energy_increase, sim.current_energy().total - before);
    tr.max_abs_residual = std::max(tr.max_abs_residual, std::abs(sim.last_residual()));
    observe();
  }
  tr.steps = steps;
  tr.breakdowns = sim.breakdowns();
  return tr;
}

CheckReport check_constraints(const RunTrace& trace) {
  CheckReport r;
  const std::string n = " over " + std::to_string(trace.steps) + " steps";
  r.add(below("1.mass", "max_t |mean(phi_i) - alpha_i|" + n, trace.max_mass_error, 1e-12));
  r.add(below("1.simplex", "max_t ||sum_i phi_i - 1||_inf on the grid" + n, trace.max_sum_violation, 1e-11));
  r.add(below("1.k2", "max_t |u degree 0/1 coefficients|" + n, trace.max_u_leak, 1e-12));
  return r;
}

CheckReport check_energy_decay(const RunTrace& trace) {
  CheckReport r;
  r.add(at_most("2.decay", "max_n E^{n+1} - E^n with S = b/(eps h) over " + std::to_string(trace.steps) + " steps",
                trace.max_energy_increase, 1e-10));
  r.add(info("2.residual_max", "max_n |r_n| along the same run", trace.max_abs_residual));
  return r;
}

CheckReport check_separation(const RunTrace& trace, const RunConfig& config, double t_onset) {
  CheckReport r;
  const int n = config.params.components();
  double floor = std::numeric_limits<double>::infinity();
  bool all_positive = true;
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (trace.t[i] + 1e-12 < t_onset) continue;
    floor = std::min(floor, trace.min_phi[i]);
    if (!(trace.min_phi[i] > 0.0)) all_positive = false;
  }
  if (!std::isfinite(floor)) {
    r.add(flag("10.recorded", "run reaches t = " + fmt(t_onset), false));
    return r;
  }
  r.add(flag("10.positive", "min_i min_x phi_i(t) > 0 for every recorded t >= " + fmt(t_onset), all_positive));
  r.add({"10.floor", "separation floor over [" + fmt(t_onset) + ", T]", floor > 0.0, floor, "> 0", false});
  r.add(info("10.breakdowns", "steps with grid values outside [1e-14, 1 - 1e-14]", trace.breakdowns, "0"));
  if (!(floor > 0.0)) return r;

  const double delta = 0.5 * floor;
  if (!(delta < 1.0 / n)) {
    r.add(flag("10.delta", "delta = floor/2 below 1/N", false));
    return r;
  }
  SphereTransform tr(config.lmax, config.params.radius);
  const QuadratureGrid& grid = tr.grid();
  double z_end = 0.0;
  double z_onset = 0.0;
  double t_zero = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < trace.grids.size(); ++k) {
    const LevelSetMeasures m = level_set_measures(trace.grids[k], grid, delta, 0);
    const double z = *std::max_element(m.measure[0].begin(), m.measure[0].end());
    if (trace.grid_t[k] + 1e-12 >= t_onset && z_onset == 0.0 && std::isnan(t_zero)) z_onset = z;
    if (z == 0.0 && std::isnan(t_zero) && trace.grid_t[k] + 1e-12 >= t_onset) t_zero = trace.grid_t[k];
    if (z > 0.0) t_zero = std::numeric_limits<double>::quiet_NaN();
    if (k + 1 == trace.grids.size()) z_end = z;
  }
  r.add({"10.z0_end", "max_i z_{0,i}(T) with delta = floor/2", z_end == 0.0, z_end, "= 0", false});
  r.add(info("10.z0_onset", "max_i z_{0,i} at the first stored time >= onset", z_onset));
  r.add(info("10.t_zero", "time after which z_0 stays 0", t_zero));
  return r;
}

// ---------------------------------------------------------------------------

CheckReport check_energy_refinement(const RunConfig& config, double t_end) {
  auto max_residual = [&](double dt) {
    Simulation sim(with_dt(config, dt));
    const auto steps = static_cast<std::uint64_t>(std::llround(t_end / dt));
    double m = 0.0;
    for (std::uint64_t n = 0; n < steps; ++n) {
      sim.advance();
      m = std::max(m, std::abs(sim.last_residual()));
    }
    return m;
  };
  const double dt = config.params.dt;
  const double r1 = max_residual(dt);
  const double r2 = max_residual(0.5 * dt);
  CheckReport r;
  r.add(info("2.residual_dt", "max|r_n| at dt = " + fmt(dt) + " over [0, " + fmt(t_end) + "]", r1));
  r.add(info("2.residual_dt2", "max|r_n| at dt/2", r2));
  r.add(within("2.refinement", "max|r_n|(dt) / max|r_n|(dt/2)", r2 > 0.0 ? r1 / r2 : 0.0, 3.0, 5.0));
  return r;
}

CheckReport check_stationary(const RunConfig& config, const StationaryOptions& options) {
  CheckReport r;
  // Homogeneous state under several step sizes.
  {
    SphereTransform tr(config.lmax, config.params.radius);
    double worst = 0.0;
    for (double dt : {config.params.dt, 1e-2, 1.0}) {
      RunConfig c = with_dt(config, dt);
      Stepper stepper(c.params, tr);
      SimState s{0.0, 0, homogeneous_phase(c.params, tr.basis()), Deformation::zero(config.lmax)};
      for (int k = 0; k < 10; ++k) {
        SimState next = stepper.step(s);
        worst = std::max(worst, (next.phi.coeffs.coeffs - s.phi.coeffs.coeffs).cwiseAbs().maxCoeff());
        worst = std::max(worst, next.u.u.coeffs.cwiseAbs().maxCoeff());
        s = std::move(next);
      }
    }
    r.add(at_most("3.homogeneous", "max coefficient change per step from (alpha, 0), dt in {dt, 1e-2, 1}", worst,
                  1e-14));
  }
  // Converged run.
  RunConfig c = with_dt(config, options.dt);
  Simulation sim(c);
  double rate = std::numeric_limits<double>::infinity();
  std::uint64_t n = 0;
  while (n < options.max_steps && !(rate < options.rate_tolerance)) {
    const Eigen::MatrixXd before = sim.state().phi.coeffs.coeffs;
    sim.advance();
    rate = (sim.state().phi.coeffs.coeffs - before).norm() / options.dt;
    ++n;
  }
  r.add(below("3.converged", "||d_t phi|| after " + std::to_string(n) + " steps at dt = " + fmt(options.dt), rate,
              options.rate_tolerance));
  const SteadyResidual res = steady_residual(sim.state().phi, sim.state().u, sim.params(), sim.transform());
  r.add(below("3.steady", "steady residual of the converged state", res.total, 1e-6));
  r.add(info("3.steady_phase", "phase part", res.phase));
  r.add(info("3.steady_shape", "shape part", res.shape));
  return r;
}

CheckReport check_linear_decay(const RunConfig& config, const LinearDecayOptions& options) {
  CheckReport r;
  ModelParams p = config.params;
  p.lambda.setZero();
  p.dt = options.dt;
  if (config.auto_stabilization) p.stabilization = p.auto_stabilization();
  if (!(p.beta > 0.0)) {
    r.add(flag("4.beta", "linear decay oracle needs beta > 0", false));
    return r;
  }
  SphereTransform tr(options.lmax, p.radius);
  Stepper stepper(p, tr);
  const double r2 = p.radius * p.radius;
  const double d2 = 24.0 * p.kappa / (r2 * r2) + 4.0 * p.sigma / r2;
  SimState s{0.0, 0, homogeneous_phase(p, tr.basis()), Deformation::zero(options.lmax)};
  s.u.u(2, 0) = options.amplitude;
  const PhaseField phi0 = s.phi;

  SimState one = stepper.step(s);
  const double factor = 1.0 / (1.0 + p.dt * d2 / p.beta);
  r.add(at_most("4.implicit_euler", "|u1/u0 - 1/(1 + dt D2/beta)| relative",
                rel_diff(one.u.u(2, 0) / options.amplitude, factor), 1e-13));
  Eigen::VectorXd rest = one.u.u.coeffs;
  rest(static_cast<Eigen::Index>(mode_index(2, 0))) = 0.0;
  const double leak = std::max(rest.cwiseAbs().maxCoeff(),
                               (one.phi.coeffs.coeffs - phi0.coeffs.coeffs).cwiseAbs().maxCoeff());
  r.add(at_most("4.single_mode", "other coefficients after one step", leak, 1e-15));

  const auto steps = static_cast<std::uint64_t>(std::llround(options.t_final / options.dt));
  for (std::uint64_t n = 0; n < steps; ++n) s = stepper.step(s);
  const double exact = std::exp(-d2 * options.t_final / p.beta);
  r.add(at_most("4.exponential", "|u(T)/u0 - exp(-D2 T/beta)| relative at T = " + fmt(options.t_final) +
                                     ", dt = " + fmt(options.dt),
                rel_diff(s.u.u(2, 0) / options.amplitude, exact), 1e-3));
  return r;
}

CheckReport check_contdep(const RunConfig& config, const ContdepCheckOptions& options) {
  CheckReport r;
  SphereTransform tr(config.lmax, config.params.radius);
  Stepper stepper(config.params, tr);
  const SimState base = initial_state(config, tr);
  std::vector<ContdepReport> reps;
  const double t_final = options.run.t_final;
  for (double size : options.sizes) {
    reps.push_back(twin_run_contdep(stepper, base, size, options.run));
    const ContdepReport& c = reps.back();
    const std::string tag = fmt(size);
    r.add(info("5.amplification_" + tag, "D(T)/D(0) for D(0) = " + tag, c.amplification));
    // Fit f(t) = c1 t + c2 t^2 of log D(t)/D(0). Curvature while f still
    // decreases is multi-rate decay, not growth; only the rise after the
    // minimum t* counts as superlinear growth.
    double t_star = t_final;
    if (c.fit_c2 > 0.0) t_star = std::clamp(-c.fit_c1 / (2.0 * c.fit_c2), 0.0, t_final);
    const double excess = std::max(c.fit_c2, 0.0) * (t_final - t_star) * (t_final - t_star);
    r.add(at_most("5.growth_" + tag, "superlinear rise c2 (T - t*)^2 of the quadratic fit of log D after its minimum t*, "
                                     "D(0) = " + tag,
                  excess, 0.5));
    r.add(info("5.curvature_" + tag, "c2 T^2 of the same fit", c.fit_c2 * t_final * t_final));
    r.add(info("5.rate_" + tag, "linear coefficient c1 of log D", c.fit_c1));
    r.add(info("5.fit_rms_" + tag, "rms of the quadratic fit", c.fit_rms));
  }
  for (std::size_t i = 1; i < reps.size(); ++i) {
    const double a = reps[i - 1].amplification;
    const double b = reps[i].amplification;
    const double ratio = b > 0.0 ? std::max(a / b, b / a) : std::numeric_limits<double>::infinity();
    r.add(at_most("5.linear_response", "amplification ratio between D(0) = " + fmt(options.sizes[i - 1]) + " and " +
                                           fmt(options.sizes[i]) + " at T = " + fmt(t_final),
                  ratio, 2.0));
  }
  return r;
}

CheckReport check_geometry(const RunConfig& config, const GeometryCheckOptions& options) {
  CheckReport r;
  const ModelParams& p = config.params;
  SphereTransform small(options.lmax, p.radius);
  SphereTransform large(2 * options.lmax, p.radius);
  GeometryKernel kernel(large);
  const Deformation u = random_deformation(small.basis(), options.u_degree, options.u_amplitude, options.seed);
  InitOptions io;
  io.amplitude = options.phi_amplitude;
  io.l_init = std::min(4, options.lmax);
  io.seed = options.seed;
  const PhaseField phi = init_phase(p, small, io).phi;

  // Variations; a generic profile with degrees 0..4 (nonzero mean) exercises A' and V'.
  SpectralField generic = SpectralField::zero(options.lmax);
  {
    CounterRng rng(options.seed, /*stream=*/5);
    for (int l = 0; l <= std::min(4, options.lmax); ++l) {
      for (int m = -l; m <= l; ++m) generic(l, m) = rng.uniform(-1.0, 1.0);
    }
    generic.coeffs *= options.u_amplitude / generic.coeffs.norm();
  }
  const double rho_first = 1e-4;
  const double rho_second = 1e-3;
  for (const auto& [label, profile] : {std::pair<const char*, const SpectralField*>{"k2", &u.u},
                                      std::pair<const char*, const SpectralField*>{"generic", &generic}}) {
    const VariationReport vr = variation_check(kernel, *profile, phi, p, rho_first, rho_second);
    for (const VariationEntry& e : vr.entries) {
      const bool second_order = std::string(e.name).size() > 2 && e.name[2] == '\'';
      const double h = second_order ? rho_second : rho_first;
      const double floor = second_order ? 1e-8 : 1e-9;
      const double rel = e.error / e.scale;
      const bool converging = e.error_half <= 0.35 * e.error || rel <= floor;
      Verdict v;
      v.id = std::string("6.var.") + label + "." + e.name;
      v.description = std::string(e.name) + " central difference vs closed form, rho_fd = " + fmt(h) +
                      ", error halving ratio " + fmt(e.error > 0.0 ? e.error_half / e.error : 0.0);
      v.value = rel;
      v.expectation = "<= max(rho_fd^2, " + fmt(floor) + ") and O(rho_fd^2)";
      v.passed = rel <= std::max(h * h, floor) && converging;
      r.add(v);
    }
  }

  // Expansion constants.
  const SurfaceFunctionals f0 = kernel.evaluate(u.u, 0.0, phi, p);
  const double lambda1 = 1.0;
  const double c1 = lagrangian(f0, p, 0.0, lambda1);
  r.add(at_most("6.C1", "L_0 vs (2 kappa/R^2 + sigma)|Gamma_0|", rel_diff(c1, taylor_c1(p)), 1e-8));
  const double hc = 1e-5;
  const double c2 = (lagrangian(kernel.evaluate(u.u, hc, phi, p), p, hc, lambda1) -
                     lagrangian(kernel.evaluate(u.u, -hc, phi, p), p, -hc, lambda1)) /
                    (2.0 * hc);
  r.add(at_most("6.C2", "dL/drho at 0 vs -(2 kappa/R) Lambda.alpha as printed", rel_diff(c2, taylor_c2_printed(p)),
                1e-8));
  r.add(info("6.C2_area", "dL/drho at 0 vs kappa F1(Gamma_0) = -(2 kappa/R)|Gamma_0| Lambda.alpha, relative",
             rel_diff(c2, taylor_c2_area(p)), "<= 1e-8"));

  const TaylorReport t = taylor_check(kernel, u.u, phi, p, logspace(options.rho_lo, options.rho_hi, options.rho_count),
                                      lambda1);
  r.add(at_least("6.slope", "taylor residual slope over rho in [" + fmt(options.rho_lo) + ", " + fmt(options.rho_hi) +
                                "] with the printed C2 and E",
                 t.slope, 2.9));
  r.add(info("6.slope_corrected", "same with kappa F1(Gamma_0) and -2 kappa u Lambda.phi/R^2", t.slope_corrected,
             ">= 2.9"));
  r.add(at_least("6.lambda1", "slope of |rho lambda1 (V - V0)| (second-order insensitivity to lambda1)",
                 t.lambda1_slope, 2.9));
  r.add(at_most("6.dropped", "rho values dropped for embedding failure", t.dropped, 0));
  const SurfaceFunctionals fmax = kernel.evaluate(u.u, options.rho_hi, phi, p);
  r.add(below("6.gauss_bonnet", "|int K - 4 pi| at the largest rho", std::abs(fmax.gauss - 4.0 * kPi), 1e-6));
  return r;
}

CheckReport check_poincare(int lmax, double radius, int samples, std::uint64_t seed) {
  SphereTransform tr(lmax, radius);
  const HarmonicBasis& basis = tr.basis();
  const QuadratureGrid& grid = tr.grid();
  const double r2 = radius * radius;
  CounterRng rng(seed, /*stream=*/6);

  // L2, gradient and Laplacian norms squared by grid quadrature.
  auto norms = [&](const SpectralField& f) {
    const SphereTransform::Derivatives d = tr.synthesis_with_derivatives(f);
    const Eigen::VectorXd lap = tr.synthesis(laplace_beltrami(f, basis));
    Eigen::VectorXd g2(d.value.size());
    for (int j = 0; j < grid.nlat(); ++j) {
      const double s = std::sin(grid.colatitude(j));
      for (int k = 0; k < grid.nlon(); ++k) {
        const auto i = static_cast<Eigen::Index>(grid.index(j, k));
        g2(i) = (d.d_theta(i) * d.d_theta(i) + d.d_phi(i) * d.d_phi(i) / (s * s)) / r2;
      }
    }
    const Eigen::VectorXd f2 = d.value.array().square();
    const Eigen::VectorXd l2 = lap.array().square();
    return std::array<double, 3>{tr.integrate(span_of(f2)), tr.integrate(span_of(g2)), tr.integrate(span_of(l2))};
  };

  int violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    SpectralField f = SpectralField::zero(lmax);
    const double decay = rng.uniform(0.0, 3.0);
    for (int l = 2; l <= lmax; ++l) {
      for (int m = -l; m <= l; ++m) f(l, m) = std::pow(1.0 + l, -decay) * rng.normal();
    }
    const auto [a, g, d] = norms(f);
    const double first = a / (r2 / 6.0 * g);
    const double second = g / (r2 / 6.0 * d);
    worst = std::max({worst, first, second});
    if (first > 1.0 + 1e-12 || second > 1.0 + 1e-12) ++violations;
  }
  CheckReport r;
  r.add(at_most("7.chain", std::to_string(samples) + " random K2 fields violating int f^2 <= (R^2/6) int |grad f|^2 "
                                                     "<= (R^4/36) int (Lap f)^2",
                violations, 0));
  r.add(info("7.worst_ratio", "largest ratio in the chain", worst, "<= 1"));

  double eq = 0.0;
  for (int s = 0; s < 10; ++s) {
    SpectralField f = SpectralField::zero(lmax);
    for (int m = -2; m <= 2; ++m) f(2, m) = rng.normal();
    const auto [a, g, d] = norms(f);
    eq = std::max({eq, std::abs(a / (r2 / 6.0 * g) - 1.0), std::abs(a / (r2 * r2 / 36.0 * d) - 1.0)});
  }
  r.add(at_most("7.equality", "pure degree 2: relative gap in both inequalities", eq, 1e-10));
  return r;
}

CheckReport check_yosida(int samples, std::uint64_t seed) {
  const Entropy psi;
  CounterRng rng(seed, /*stream=*/7);
  const std::vector<double> ladder = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  CheckReport r;

  // (i) psi_h <= psi and psi_h increases to psi as h decreases.
  {
    int bad = 0;
    double gap = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double s = k < 3 ? std::array<double, 3>{0.1, 0.5, 0.9}[static_cast<std::size_t>(k)]
                             : rng.uniform(1e-6, 1.0);
      double prev = -std::numeric_limits<double>::infinity();
      for (double h : ladder) {
        const double v = psi.regularized(s, h);
        if (v > psi.value(s) + 1e-14 || v < prev - 1e-14) ++bad;
        prev = v;
      }
      gap = std::max(gap, psi.value(s) - prev);
    }
    r.add(at_most("8.i", "samples with psi_h > psi or psi_h not increasing as h decreases", bad, 0));
    r.add(info("8.i_gap", "max psi - psi_h at h = 1e-6", gap));
  }
  // (ii) Lipschitz constant 1/h.
  {
    int bad = 0;
    for (int k = 0; k < samples; ++k) {
      const double h = std::pow(10.0, rng.uniform(-6.0, -1.0));
      const double s1 = rng.uniform(-2.0, 2.0);
      const double s2 = rng.uniform(-2.0, 2.0);
      const double d1 = psi.regularized_derivative(s1, h);
      const double d2 = psi.regularized_derivative(s2, h);
      const double slack = 1e-12 * std::max({1.0, std::abs(d1), std::abs(d2)});
      if (std::abs(d1 - d2) > std::abs(s1 - s2) / h * (1.0 + 1e-12) + slack) ++bad;
    }
    r.add(at_most("8.ii", "pairs violating |psi_h'(s1) - psi_h'(s2)| <= |s1 - s2|/h", bad, 0));
  }
  // (iii) |psi_h'| increases to |psi'| on (0, 1].
  {
    int bad = 0;
    for (int k = 0; k < samples; ++k) {
      const double s = rng.uniform(1e-6, 1.0);
      const double target = std::abs(psi.derivative(s));
      double prev = 0.0;
      for (double h : ladder) {
        const double v = std::abs(psi.regularized_derivative(s, h));
        const double slack = 1e-12 * std::max(1.0, target);
        if (v > target + slack || v < prev - slack) ++bad;
        prev = v;
      }
    }
    r.add(at_most("8.iii", "samples with |psi_h'| above |psi'| or not increasing as h decreases", bad, 0));
  }
  // (iv) finite-difference psi_h'' >= zeta/(1+zeta) on [-2, 2].
  {
    const double bound = psi.zeta() / (1.0 + psi.zeta());
    double lowest = std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
      const double h = std::pow(10.0, rng.uniform(-3.0, 0.0));
      const double s = rng.uniform(-2.0, 2.0);
      const double d = 1e-2 * h;
      const double fd = (psi.regularized_derivative(s + d, h) - psi.regularized_derivative(s - d, h)) / (2.0 * d);
      lowest = std::min(lowest, fd);
    }
    r.add(at_least("8.iv", "min finite-difference psi_h'' over s in [-2, 2], h in [1e-3, 1]", lowest,
                   bound * (1.0 - 1e-6)));
  }
  // (v) uniform convergence of psi_h' on [0.05, 1].
  {
    std::vector<double> s(static_cast<std::size_t>(samples));
    for (auto& x : s) x = rng.uniform(0.05, 1.0);
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    double last = 0.0;
    for (double h : ladder) {
      double m = 0.0;
      for (double x : s) m = std::max(m, std::abs(psi.regularized_derivative(x, h) - psi.derivative(x)));
      if (m >= prev) decreasing = false;
      prev = m;
      last = m;
    }
    r.add(flag("8.v_monotone", "max over [0.05, 1] of |psi_h' - psi'| decreases along h = 1e-1..1e-6", decreasing));
    r.add(below("8.v_limit", "max over [0.05, 1] of |psi_h' - psi'| at h = 1e-6", last, 1e-4));
  }
  // Nonexpansive resolvent and monotone psi_h'.
  {
    int bad = 0;
    for (int k = 0; k < samples; ++k) {
      const double h = std::pow(10.0, rng.uniform(-6.0, -1.0));
      double s1 = rng.uniform(-2.0, 2.0);
      double s2 = rng.uniform(-2.0, 2.0);
      if (s1 > s2) std::swap(s1, s2);
      const double j1 = psi.resolvent(s1, h).value;
      const double j2 = psi.resolvent(s2, h).value;
      if (std::abs(j1 - j2) > std::abs(s1 - s2) + 1e-15 || j1 > j2) ++bad;
      if (psi.regularized_derivative(s1, h) > psi.regularized_derivative(s2, h) + 1e-12) ++bad;
    }
    r.add(at_most("8.resolvent", "pairs where J_h expands, J_h decreases or psi_h' decreases", bad, 0));
  }
  return r;
}

CheckReport check_degiorgi(int samples, int n_max, std::uint64_t seed) {
  CounterRng rng(seed, /*stream=*/8);
  int failures = 0;
  int not_decaying = 0;
  for (int k = 0; k < samples; ++k) {
    const double c = rng.uniform(0.1, 10.0);
    const double b = 1.0 + 7.0 * (1.0 - rng.uniform());  // (1, 8]
    const double gamma = 0.1 + 2.9 * (1.0 - rng.uniform());  // (0.1, 3]
    const double theta = degiorgi_decay(0.0, c, b, gamma, 0).theta;
    const DeGiorgiResult d = degiorgi_decay(theta, c, b, gamma, n_max);
    if (!d.bound_holds) ++failures;
    if (!d.tends_to_zero) ++not_decaying;
  }
  CheckReport r;
  r.add(at_most("9.bound", std::to_string(samples) + " random (C, b, gamma), y0 = theta: failures of y_n <= theta "
                                                     "b^(-n/gamma), n <= " + std::to_string(n_max),
                failures, 0));
  r.add(at_most("9.limit", "same draws not tending to zero", not_decaying, 0));
  const DeGiorgiResult ex = degiorgi_decay(0.5, 1.0, 2.0, 1.0, n_max);
  r.add(at_most("9.example", "C = 1, b = 2, gamma = 1: |theta - 1/2|", std::abs(ex.theta - 0.5), 1e-15));
  return r;
}

// ---------------------------------------------------------------------------

CheckReport selftest(const RunConfig& config) {
  CheckReport r;
  const ModelParams& p = config.params;
  const int n = p.components();
  auto near = [&](std::string id, std::string what, double value, double expected, double tol) {
    r.add(at_most(std::move(id), what + " (expected " + fmt(expected) + ")", std::abs(value - expected), tol));
  };

  // sphere_spectral
  {
    const HarmonicBasis b1 = HarmonicBasis::build(8, 1.0);
    const HarmonicBasis b2 = HarmonicBasis::build(8, 2.0);
    near("s.lambda0", "lambda_0", b1.eigenvalue(0), 0.0, 0.0);
    near("s.lambda1", "lambda_1 at R = 2", b2.eigenvalue(1), 0.5, 1e-15);
    bool rejected = false;
    try {
      HarmonicBasis::build(1, 1.0);
    } catch (const InvalidParameter&) {
      rejected = true;
    }
    r.add(flag("s.lmax_rejected", "lmax < 2 rejected", rejected));

    SphereTransform tr(8, 1.5);
    const HarmonicBasis& basis = tr.basis();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(tr.grid().size()));
    const SpectralField c = tr.analysis(span_of(Eigen::VectorXd(3.0 * ones)));
    near("s.constant", "constant field: largest coefficient beyond (0,0)", c.coeffs.tail(c.coeffs.size() - 1).cwiseAbs().maxCoeff(),
         0.0, 1e-12);
    SpectralField y32 = SpectralField::zero(8);
    y32(3, 2) = 1.0;
    const SpectralField back = tr.analysis(span_of(tr.synthesis(y32)));
    Eigen::VectorXd others = back.coeffs;
    others(static_cast<Eigen::Index>(mode_index(3, 2))) = 0.0;
    near("s.single_mode", "(3,2) harmonic: largest other coefficient", others.cwiseAbs().maxCoeff(), 0.0, 1e-12);
    near("s.lap_constant", "Laplacian of a constant", l2_norm(laplace_beltrami(constant_field(2.0, basis), basis)), 0.0,
         0.0);
    SpectralField nu1 = SpectralField::zero(8);
    nu1(1, 1) = 1.0;
    near("s.lap_degree1", "Laplacian of nu_1 over nu_1", laplace_beltrami(nu1, basis)(1, 1), -2.0 / (1.5 * 1.5), 1e-15);
    near("s.area", "integral of 1", tr.integrate(span_of(ones)), 4.0 * kPi * 1.5 * 1.5, 1e-12);
    near("s.odd", "integral of nu_1", tr.integrate(span_of(tr.synthesis(nu1))), 0.0, 1e-14);
    near("s.k2_nu1", "project_K2(nu_1)", l2_norm(project_k2(nu1)), 0.0, 0.0);
    SpectralField y2 = SpectralField::zero(8);
    y2(2, -1) = 0.7;
    near("s.k2_degree2", "project_K2(Y_2) - Y_2", l2_norm(SpectralField{8, project_k2(y2).coeffs - y2.coeffs}), 0.0, 0.0);
    SpectralField one_plus = y2;
    one_plus.coeffs += constant_field(1.0, basis).coeffs;
    near("s.mean_free", "project_mean_free(1 + Y_2) - Y_2",
         l2_norm(SpectralField{8, project_mean_free(one_plus).coeffs - y2.coeffs}), 0.0, 1e-16);
    const SpectralField cst = constant_field(2.0, basis);
    near("s.norm_constant", "||c|| for c = 2", l2_norm(cst), 2.0 * std::sqrt(basis.area()), 1e-13);
    near("s.h1_constant", "||grad c||", h1_seminorm(cst, basis), 0.0, 0.0);
    near("s.h2_constant", "||Lap c||", h2_seminorm(cst, basis), 0.0, 0.0);
  }
  // potential
  {
    const Entropy psi;
    near("p.psi1", "psi(1)", psi.value(1.0), 0.0, 0.0);
    near("p.dpsi1", "psi'(1)", psi.derivative(1.0), 1.0, 0.0);
    near("p.ddpsi1", "psi''(1)", psi.second_derivative(1.0), 1.0, 0.0);
    near("p.psi_inv_e", "psi(1/e)", psi.value(std::exp(-1.0)), -std::exp(-1.0), 1e-16);
    near("p.ext_a", "A_ext", psi.extension().a, -0.5, 0.0);
    near("p.ext_b", "B_ext", psi.extension().b, 2.0, 0.0);
    near("p.ext_d", "D_ext", psi.extension().d, -1.5, 0.0);
    r.add(flag("p.negative", "psi(s < 0) reported as +infinity", std::isinf(psi.value(-0.1))));
    bool domain = false;
    try {
      psi.derivative(0.0);
    } catch (const DomainError&) {
      domain = true;
    }
    r.add(flag("p.domain", "psi'(0) signals a domain error", domain));
    near("p.resolvent_fixed", "J_h(1 + h), h = 0.01", psi.resolvent(1.01, 0.01).value, 1.0, 1e-13);
    const InteractionMatrix zero_a = [&] {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
      a(0, 1) = a(1, 0) = 1e-300;  // positive eigenvalue required; negligible
      return InteractionMatrix(a);
    }();
    near("p.uniform", "Psi(1/3, 1/3, 1/3) with A ~ 0", multiwell(Eigen::Vector3d::Constant(1.0 / 3.0), zero_a, psi),
         -std::log(3.0), 1e-15);
  }
  // fields
  {
    near("f.pe", "|P e|", project_tsigma(Eigen::VectorXd::Ones(n)).norm(), 0.0, 1e-16);
    const Eigen::VectorXd v2 = project_tsigma(Eigen::Vector2d(1.0, 0.0));
    near("f.p2", "|P(1,0) - (1/2,-1/2)|", (v2 - Eigen::Vector2d(0.5, -0.5)).norm(), 0.0, 0.0);
    CounterRng rng(1, 9);
    double idem = 0.0;
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v(i) = rng.normal();
      idem = std::max(idem, (project_tsigma(project_tsigma(v)) - project_tsigma(v)).cwiseAbs().maxCoeff());
    }
    near("f.pp", "max |PPv - Pv| over 1000 vectors", idem, 0.0, 1e-15);
    auto rejects = [&](const Eigen::MatrixXd& l) {
      try {
        validate_mobility(l);
      } catch (const ValidationError&) {
        return true;
      }
      return false;
    };
    r.add(flag("f.mobility_eet", "L = ee^T rejected", rejects(Eigen::MatrixXd::Ones(n, n))));
    r.add(flag("f.mobility_zero", "L = 0 rejected", rejects(Eigen::MatrixXd::Zero(n, n))));
    near("f.mobility_projector", "l0 of the projector mobility", projector_mobility(n).coercivity(), 1.0, 1e-14);

    SphereTransform tr(config.lmax, p.radius);
    const HarmonicBasis& basis = tr.basis();
    InitOptions io = config.init;
    io.amplitude = 0.0;
    const PhaseField flat = init_phase(p, tr, io).phi;
    near("f.init_zero", "amplitude 0: |phi - alpha|",
         (flat.coeffs.coeffs - homogeneous_phase(p, basis).coeffs.coeffs).cwiseAbs().maxCoeff(), 0.0, 0.0);
    const PhaseField a = init_phase(p, tr, config.init).phi;
    const PhaseField b = init_phase(p, tr, config.init).phi;
    Eigen::VectorXd sum = a.coeffs.coeffs.rowwise().sum();
    sum(0) -= std::sqrt(basis.area());
    near("f.init_simplex", "coefficient norm of sum_i phi_i - 1", sum.norm(), 0.0, 1e-14);
    near("f.init_mass", "max |mean(phi_i) - alpha_i|",
         (a.coeffs.coeffs.row(0).transpose() / std::sqrt(basis.area()) - p.alpha).cwiseAbs().maxCoeff(), 0.0, 1e-14);
    r.add(flag("f.init_deterministic", "equal seeds give identical fields", a.coeffs.coeffs == b.coeffs.coeffs));
    bool mean_rejected = false;
    try {
      VectorSpectralField g = VectorSpectralField::zero(config.lmax, n);
      g.coeffs(0, 0) = 1.0;
      g.coeffs(0, 1) = -1.0;
      weighted_inv_laplacian(g, p.mobility, basis);
    } catch (const ConstraintError&) {
      mean_rejected = true;
    }
    r.add(flag("f.invlap_mean", "weighted inverse Laplacian rejects nonzero mean", mean_rejected));
  }
  // dynamics
  {
    SphereTransform tr(config.lmax, p.radius);
    const HarmonicBasis& basis = tr.basis();
    const PhaseField hom = homogeneous_phase(p, basis);
    const Deformation u0 = Deformation::zero(config.lmax);
    const ChemicalPotential cp = chemical_potential(hom, u0, p, tr);
    near("d.mu_constant", "homogeneous mu: max |w| beyond degree 0",
         cp.w.coeffs.bottomRows(cp.w.coeffs.rows() - 1).cwiseAbs().maxCoeff(), 0.0, 1e-13);

    ModelParams plain = p;
    plain.lambda.setZero();
    plain.interaction = InteractionMatrix([&] {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
      a(0, 1) = a(1, 0) = 1e-300;
      return a;
    }());
    InitOptions io = config.init;
    const PhaseField phi = init_phase(plain, tr, io).phi;
    const ChemicalPotential cp2 = chemical_potential(phi, u0, plain, tr);
    const Entropy psi = plain.entropy();
    const Eigen::MatrixXd grid = tr.synthesis(phi.coeffs);
    Eigen::MatrixXd mu = grid.unaryExpr([&](double s) { return plain.b / plain.epsilon * psi.regularized_derivative(s, plain.h); });
    mu -= plain.b * plain.epsilon * tr.synthesis(laplace_beltrami(phi.coeffs, basis));
    near("d.mu_decoupled", "Lambda = A = u = 0: mu vs (b/eps)psi_h' - b eps Lap phi", (cp2.mu_grid - mu).cwiseAbs().maxCoeff(),
         0.0, 1e-12);

    const VectorSpectralField wc{config.lmax, hom.coeffs.coeffs};
    near("d.rhs_phase_constant", "rhs_phase of constant w", rhs_phase(wc, p.mobility, basis).coeffs.cwiseAbs().maxCoeff(),
         0.0, 0.0);
    VectorSpectralField w1 = VectorSpectralField::zero(config.lmax, n);
    const Eigen::VectorXd cvec = project_tsigma(Eigen::VectorXd::LinSpaced(n, 1.0, 2.0));
    w1.coeffs.row(static_cast<Eigen::Index>(mode_index(3, 1))) = cvec.transpose();
    const VectorSpectralField rp = rhs_phase(w1, projector_mobility(n), basis);
    near("d.rhs_phase_mode", "single-mode w: |rhs + lambda_3 c|",
         (rp.coeffs.row(static_cast<Eigen::Index>(mode_index(3, 1))).transpose() + basis.eigenvalue(3) * cvec).norm(), 0.0,
         1e-14);
    near("d.rhs_u_hom", "rhs_u at (alpha, 0)", l2_norm(rhs_u(hom, u0, p, basis)), 0.0, 1e-14);
    near("d.rhs_u_factored_hom", "rhs_u_factored at (alpha, 0)", l2_norm(rhs_u_factored(hom, u0, p, basis)), 0.0, 1e-14);
    PhaseField deg1 = hom;
    deg1.coeffs.coeffs.row(static_cast<Eigen::Index>(mode_index(1, 0))) = 0.05 * cvec.transpose();
    near("d.rhs_u_degree1", "rhs_u_factored at l = 1 for degree-1 phi", rhs_u_factored(deg1, u0, p, basis).coeffs.segment(1, 3).norm(),
         0.0, 0.0);

    const EnergyParts e = energy(hom, u0, p, tr);
    const double area = basis.area();
    const double la = p.lambda.dot(p.alpha);
    near("d.energy_helfrich", "E_H at (alpha, 0)", e.helfrich, area * p.kappa * la * la / 2.0, 1e-13);
    near("d.energy_ch", "E_CH at (alpha, 0)", e.cahn_hilliard,
         p.b / p.epsilon * area * multiwell_regularized(p.alpha, p.interaction, p.entropy(), p.h), 1e-13);

    Stepper stepper(p, tr);
    SimState s{0.0, 0, hom, u0};
    StepReport rep;
    const SimState next = stepper.step(s, &rep);
    near("d.step_homogeneous", "one step from (alpha, 0): max change",
         (next.phi.coeffs.coeffs - hom.coeffs.coeffs).cwiseAbs().maxCoeff(), 0.0, 1e-14);
    const EnergyParts e1 = energy(next.phi, next.u, p, tr);
    const std::vector<double> res = dissipation_residual(
        {{e.total, 0.0, 0.0}, {e1.total, rep.diss_phi, rep.diss_u}}, p.dt);
    near("d.residual_homogeneous", "r_0 at (alpha, 0)", std::abs(res.at(0)), 0.0, 1e-13);
    near("d.steady_homogeneous", "steady residual at (alpha, 0)", steady_residual(hom, u0, p, tr).total, 0.0, 1e-12);

    ContdepOptions co;
    co.t_final = 20 * p.dt;
    co.record_every = 5;
    const ContdepReport cr = twin_run_contdep(stepper, s, 0.0, co);
    near("d.contdep_zero", "zero perturbation: max D(t)", *std::max_element(cr.distance.begin(), cr.distance.end()), 0.0,
         0.0);
  }
  // geometry
  {
    SphereTransform tr(8, p.radius);
    SphereTransform big(16, p.radius);
    GeometryKernel kernel(big);
    const PhaseField hom = homogeneous_phase(p, tr.basis());
    const SpectralField zero_u = SpectralField::zero(8);
    const double rad = p.radius;
    const SurfaceFunctionals f0 = kernel.evaluate(zero_u, 0.0, hom, p);
    near("g.willmore", "W of the sphere", f0.willmore, 8.0 * kPi, 1e-12);
    near("g.area", "A of the sphere", f0.area, 4.0 * kPi * rad * rad, 1e-12);
    near("g.volume", "V of the sphere", f0.volume, 4.0 * kPi * rad * rad * rad / 3.0, 1e-12);
    const double s = 0.1;
    const SurfaceFunctionals fd = kernel.evaluate(zero_u, 0.0, hom, p, EnergyMode::Exact, s);
    near("g.dilated_area", "A of the dilated sphere", fd.area, 4.0 * kPi * rad * rad * (1 + s) * (1 + s), 1e-12);
    near("g.dilated_volume", "V of the dilated sphere", fd.volume, 4.0 * kPi / 3.0 * std::pow(rad * (1 + s), 3), 1e-12);
    near("g.dilated_willmore", "W of the dilated sphere", fd.willmore, 8.0 * kPi, 1e-12);
    near("g.c1", "L_0 - C1", lagrangian(f0, p, 0.0, 1.0), taylor_c1(p), 1e-11);
    ModelParams flat = p;
    flat.lambda.setZero();
    near("g.c2_zero", "C2 with Lambda = 0", taylor_c2_printed(flat), 0.0, 0.0);
    const TaylorReport t = taylor_check(kernel, zero_u, hom, flat, logspace(1e-3, 1e-1, 5));
    double worst = 0.0;
    for (const auto& pt : t.points) worst = std::max(worst, pt.residual);
    near("g.taylor_homogeneous_flat", "phi = alpha, u = 0, Lambda = 0: max taylor residual", worst, 0.0, 1e-12);
    const TaylorReport tl = taylor_check(kernel, zero_u, hom, p, logspace(1e-3, 1e-1, 5));
    worst = 0.0;
    for (const auto& pt : tl.points) worst = std::max(worst, pt.residual);
    near("g.taylor_homogeneous", "phi = alpha, u = 0: max taylor residual with the printed C2", worst, 0.0, 1e-12);
    double corrected = 0.0;
    for (const auto& pt : tl.points) corrected = std::max(corrected, pt.residual_corrected);
    r.add(info("g.taylor_homogeneous_corrected", "same with kappa F1(Gamma_0) in C2", corrected, "<= 1e-12"));
  }
  // diagnostics
  {
    SphereTransform tr(config.lmax, p.radius);
    const SeparationReport sep = separation_monitor(homogeneous_phase(p, tr.basis()), tr);
    near("x.delta_min", "delta_min at phi = alpha", sep.delta_min, p.alpha.minCoeff(), 1e-14);
    near("x.delta_max", "delta_max at phi = alpha", sep.delta_max, p.alpha.maxCoeff(), 1e-14);
    const double delta = 0.1;
    const Eigen::MatrixXd high = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(tr.grid().size()), n, 2.5 * delta);
    const LevelSetMeasures m1 = level_set_measures(high, tr.grid(), delta, 5);
    double z = 0.0;
    for (const auto& row : m1.measure) z = std::max(z, *std::max_element(row.begin(), row.end()));
    near("x.levels_above", "phi > 2 delta: max z_n", z, 0.0, 0.0);
    const Eigen::MatrixXd at = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(tr.grid().size()), n, delta);
    const LevelSetMeasures m2 = level_set_measures(at, tr.grid(), delta, 5);
    double zmin = std::numeric_limits<double>::infinity();
    for (const auto& row : m2.measure) zmin = std::min(zmin, *std::min_element(row.begin(), row.end()));
    near("x.levels_at", "phi = delta: min z_n", zmin, tr.basis().area(), 1e-12);
    const DeGiorgiResult dg = degiorgi_decay(0.5, 1.0, 2.0, 1.0, 50);
    r.add(flag("x.degiorgi", "C = 1, b = 2, gamma = 1, y0 = 1/2: bound holds", dg.bound_holds));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(tr.grid().size()));
    const double area = tr.basis().area();
    near("x.sobolev_constant", "||1||_L4 / ||1||_H1 vs |Gamma|^(1/4 - 1/2)",
         lp_norm(ones, tr, 4.0) / std::sqrt(area), std::pow(area, 0.25 - 0.5), 1e-13);
    const SobolevProbe probe = sobolev_constant_probe(tr, {2.0}, 50, 1);
    r.add(at_most("x.sobolev_p2", "C(2) estimate", probe.constant[0], 1.0 / std::sqrt(2.0) + 1e-12));
  }
  // cli
  {
    RunConfig flat = config;
    flat.init.amplitude = 0.0;
    flat.u_amplitude = 0.0;
    Simulation sim(flat);
    const double e0 = sim.current_energy().total;
    double drift = 0.0;
    for (int k = 0; k < 20; ++k) {
      sim.advance();
      drift = std::max(drift, std::abs(sim.current_energy().total - e0));
    }
    near("c.flat_energy", "amplitude 0: max |E(t) - E(0)|", drift, 0.0, 1e-12);

    Simulation gen(config);
    for (int k = 0; k < 3; ++k) gen.advance();
    const auto path = std::filesystem::temp_directory_path() / ("mcps_selftest_" + std::to_string(config_hash(config)) + ".bin");
    save_checkpoint(path.string(), gen.state(), config_hash(config));
    const Checkpoint back = load_checkpoint(path.string());
    std::filesystem::remove(path);
    const bool same = back.state.t == gen.state().t && back.state.step == gen.state().step &&
                      back.state.phi.coeffs.coeffs == gen.state().phi.coeffs.coeffs &&
                      back.state.u.u.coeffs == gen.state().u.u.coeffs && back.config_hash == config_hash(config);
    r.add(flag("c.checkpoint", "checkpoint round trip is bitwise", same));
  }
  return r;
}

}  // namespace mcps
