#include "mcps/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mcps/checkpoint.hpp"
#include "mcps/diagnostics.hpp"
#include "mcps/error.hpp"

namespace mcps {

namespace fs = std::filesystem;

namespace {

void put(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (!s.empty()) s += ',';
  s += buf;
}

}  // namespace

std::string diagnostics_header(int components) {
  std::string h = "t,E_total,E_H,E_CH,diss_phi,diss_u,energy_residual";
  for (int i = 1; i <= components; ++i) h += ",mass_" + std::to_string(i);
  h += ",sum_violation,min_phi,max_phi,sep_delta,u_l01_leak";
  for (int i = 1; i <= components; ++i) h += ",mean_w_" + std::to_string(i);
  return h + ",steady_residual";
}

std::string format_row(const DiagnosticsRow& r) {
  std::string s;
  for (double v : {r.t, r.energy.total, r.energy.helfrich, r.energy.cahn_hilliard, r.diss_phi, r.diss_u,
                   r.energy_residual}) {
    put(s, v);
  }
  for (Eigen::Index i = 0; i < r.mass.size(); ++i) put(s, r.mass(i));
  for (double v : {r.sum_violation, r.min_phi, r.max_phi, r.sep_delta, r.u_l01_leak}) put(s, v);
  for (Eigen::Index i = 0; i < r.mean_w.size(); ++i) put(s, r.mean_w(i));
  put(s, r.steady_residual);
  return s;
}

SimState initial_state(const RunConfig& config, const SphereTransform& transform) {
  SimState s;
  s.phi = init_phase(config.params, transform, config.init).phi;
  s.u = config.u_amplitude > 0.0
            ? random_deformation(transform.basis(), config.init.l_init, config.u_amplitude, config.init.seed)
            : Deformation::zero(transform.lmax());
  return s;
}

Simulation::Simulation(const RunConfig& config)
    : transform_(std::make_unique<SphereTransform>(config.lmax, config.params.radius)),
      stepper_(std::make_unique<Stepper>(config.params, *transform_)) {
  state_ = initial_state(config, *transform_);
  entropic_ = evaluate_entropic(state_.phi, params(), *transform_);
  energy_ = energy(state_.phi, state_.u, params(), transform_->basis(), entropic_);
}

Simulation::Simulation(const RunConfig& config, SimState start)
    : transform_(std::make_unique<SphereTransform>(config.lmax, config.params.radius)),
      stepper_(std::make_unique<Stepper>(config.params, *transform_)),
      state_(std::move(start)) {
  if (state_.phi.coeffs.lmax != config.lmax || state_.phi.components() != config.params.components()) {
    throw ShapeError("simulation: start state does not match the configuration");
  }
  entropic_ = evaluate_entropic(state_.phi, params(), *transform_);
  energy_ = energy(state_.phi, state_.u, params(), transform_->basis(), entropic_);
}

void Simulation::advance() {
  StepReport report;
  SimState next = stepper_->step(state_, entropic_, &report);
  entropic_ = evaluate_entropic(next.phi, params(), *transform_);
  const EnergyParts e = energy(next.phi, next.u, params(), transform_->basis(), entropic_);
  diss_phi_ = report.diss_phi;
  diss_u_ = report.diss_u;
  residual_ = e.total - energy_.total + params().dt * (diss_phi_ + diss_u_);
  if (report.breakdown) ++breakdowns_;
  energy_ = e;
  state_ = std::move(next);
}

DiagnosticsRow Simulation::row() const {
  const HarmonicBasis& basis = transform_->basis();
  DiagnosticsRow r;
  r.t = state_.t;
  r.step = state_.step;
  r.energy = energy_;
  r.diss_phi = diss_phi_;
  r.diss_u = diss_u_;
  r.energy_residual = residual_;
  r.mass = state_.phi.coeffs.coeffs.row(0).transpose() / std::sqrt(basis.area());
  const Eigen::MatrixXd& grid = entropic_.phi;
  r.sum_violation = (grid.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const SeparationReport sep = separation_monitor(grid, state_.t);
  r.min_phi = sep.delta_min;
  r.max_phi = sep.delta_max;
  r.sep_delta = sep.sep_delta;
  r.u_l01_leak = state_.u.k2_leak();
  r.mean_w = chemical_potential(state_.phi, state_.u, params(), *transform_).mean_w;
  r.steady_residual = steady_residual(state_.phi, state_.u, params(), *transform_).total;
  return r;
}

void write_snapshot(std::ostream& out, const SimState& state, const SphereTransform& transform) {
  const QuadratureGrid& g = transform.grid();
  const Eigen::MatrixXd phi = state.phi.grid(transform);
  const Eigen::VectorXd u = transform.synthesis(state.u.u);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", state.t);
  out << "# t = " << buf << "\n# step = " << state.step << "\n# lmax = " << transform.lmax()
      << "\n# nlat = " << g.nlat() << "\n# nlon = " << g.nlon() << "\n# colatitude longitude u";
  for (int i = 1; i <= state.phi.components(); ++i) out << " phi_" << i;
  out << '\n';
  for (int j = 0; j < g.nlat(); ++j) {
    for (int k = 0; k < g.nlon(); ++k) {
      const auto p = static_cast<Eigen::Index>(g.index(j, k));
      std::string line;
      for (double v : {g.colatitude(j), g.longitude(k), u(p)}) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!line.empty()) line += ' ';
        line += buf;
      }
      for (Eigen::Index i = 0; i < phi.cols(); ++i) {
        std::snprintf(buf, sizeof buf, " %.17g", phi(p, i));
        line += buf;
      }
      out << line << '\n';
    }
  }
}

namespace {

// Keeps the header and the rows with t <= t_max.
std::vector<std::string> surviving_rows(const fs::path& csv, double t_max) {
  std::vector<std::string> keep;
  std::ifstream in(csv);
  if (!in) return keep;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (keep.empty()) {
      keep.push_back(line);
      continue;
    }
    const double t = std::strtod(line.c_str(), nullptr);
    if (t <= t_max) keep.push_back(line);
  }
  return keep;
}

}  // namespace

RunSummary run(const RunConfig& config, const RunOptions& options) {
  config.validate();
  const fs::path outdir(config.output.outdir);
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create output directory '" + outdir.string() + "': " + ec.message());

  const std::uint64_t hash = config_hash(config);
  std::unique_ptr<Simulation> sim;
  if (options.resume) {
    Checkpoint c = load_checkpoint(*options.resume);
    if (c.config_hash != hash) {
      throw ConfigError("--resume", "checkpoint was written by a different configuration");
    }
    sim = std::make_unique<Simulation>(config, std::move(c.state));
  } else {
    sim = std::make_unique<Simulation>(config);
  }

  {
    std::ofstream cfg(outdir / "config.ini");
    if (!cfg) throw IoError("cannot write '" + (outdir / "config.ini").string() + "'");
    cfg << to_ini(config);
  }

  const fs::path csv_path = outdir / "diagnostics.csv";
  const int n = config.params.components();
  std::vector<std::string> previous;
  if (options.resume) previous = surviving_rows(csv_path, sim->state().t);
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw IoError("cannot write '" + csv_path.string() + "'");
  if (previous.empty()) {
    csv << diagnostics_header(n) << '\n';
  } else {
    for (const auto& line : previous) csv << line << '\n';
  }

  RunSummary summary;
  summary.first_step = sim->state().step;
  const std::uint64_t total = config.total_steps();
  const auto every = [](std::uint64_t step, int k) { return k > 0 && step % static_cast<std::uint64_t>(k) == 0; };
  const auto snapshot = [&] {
    const fs::path p = outdir / ("snapshot_" + std::to_string(sim->state().step) + ".txt");
    std::ofstream out(p);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    write_snapshot(out, sim->state(), sim->transform());
  };

  if (!options.resume) {
    csv << format_row(sim->row()) << '\n';
    if (config.output.snapshot_every > 0) snapshot();
  }
  while (sim->state().step < total) {
    sim->advance();
    const std::uint64_t s = sim->state().step;
    if (every(s, config.output.diagnostics_every) || s == total) csv << format_row(sim->row()) << '\n';
    if (every(s, config.output.snapshot_every)) snapshot();
    if (every(s, config.output.checkpoint_every)) {
      save_checkpoint((outdir / ("checkpoint_" + std::to_string(s) + ".bin")).string(), sim->state(), hash);
    }
    if (!options.quiet && s % 1000 == 0) {
      std::cerr << "step " << s << "/" << total << "  t = " << sim->state().t
                << "  E = " << sim->current_energy().total << '\n';
    }
  }
  csv.flush();
  if (!csv) throw IoError("write to '" + csv_path.string() + "' failed");

  summary.final_checkpoint = (outdir / "checkpoint_final.bin").string();
  save_checkpoint(summary.final_checkpoint, sim->state(), hash);
  summary.last_step = sim->state().step;
  summary.t_final = sim->state().t;
  summary.breakdowns = sim->breakdowns();
  if (summary.breakdowns > 0 && !options.quiet) {
    std::cerr << "warning: " << summary.breakdowns << " steps left [1e-14, 1 - 1e-14] on the grid\n";
  }
  return summary;
}

}  // namespace mcps
