#pragma once

// Run orchestration: a Simulation wraps transform, stepper and state and
// produces one diagnostics row per recorded step; run() adds the output files.
//
// diagnostics.csv columns:
//   t, E_total, E_H, E_CH, diss_phi, diss_u, energy_residual, mass_1..N,
//   sum_violation, min_phi, max_phi, sep_delta, u_l01_leak, mean_w_1..N,
//   steady_residual
// energy_residual is r_n of the step that produced the row (0 on the first row).

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mcps/config.hpp"
#include "mcps/dynamics.hpp"

namespace mcps {

struct DiagnosticsRow {
  double t = 0.0;
  std::uint64_t step = 0;
  EnergyParts energy;
  double diss_phi = 0.0;
  double diss_u = 0.0;
  double energy_residual = 0.0;
  Eigen::VectorXd mass;        ///< mean of each phi_i
  double sum_violation = 0.0;  ///< max |sum_i phi_i - 1| on the grid
  double min_phi = 0.0;
  double max_phi = 0.0;
  double sep_delta = 0.0;
  double u_l01_leak = 0.0;
  Eigen::VectorXd mean_w;
  double steady_residual = 0.0;
};

std::string diagnostics_header(int components);
std::string format_row(const DiagnosticsRow& row);

/// Initial state from the [init] block.
SimState initial_state(const RunConfig& config, const SphereTransform& transform);

class Simulation {
 public:
  explicit Simulation(const RunConfig& config);
  /// Starts from an existing state (e.g. a checkpoint).
  Simulation(const RunConfig& config, SimState start);

  const SimState& state() const noexcept { return state_; }
  const Stepper& stepper() const noexcept { return *stepper_; }
  const SphereTransform& transform() const noexcept { return *transform_; }
  const ModelParams& params() const noexcept { return stepper_->params(); }

  /// One step; keeps the energy bookkeeping of that step.
  void advance();
  /// Full diagnostics of the current state.
  DiagnosticsRow row() const;

  /// Grid values of the current phi (points x N).
  const Eigen::MatrixXd& phi_grid() const noexcept { return entropic_.phi; }
  /// Regularized energy of the current state.
  const EnergyParts& current_energy() const noexcept { return energy_; }
  double last_residual() const noexcept { return residual_; }
  double last_diss_phi() const noexcept { return diss_phi_; }
  double last_diss_u() const noexcept { return diss_u_; }
  int breakdowns() const noexcept { return breakdowns_; }

 private:
  std::unique_ptr<SphereTransform> transform_;
  std::unique_ptr<Stepper> stepper_;
  SimState state_;
  EntropicEvaluation entropic_;
  EnergyParts energy_;
  double residual_ = 0.0;
  double diss_phi_ = 0.0;
  double diss_u_ = 0.0;
  int breakdowns_ = 0;
};

struct RunOptions {
  std::optional<std::string> resume;  ///< checkpoint path
  bool quiet = false;
};

struct RunSummary {
  std::uint64_t first_step = 0;
  std::uint64_t last_step = 0;
  double t_final = 0.0;
  int breakdowns = 0;
  std::string final_checkpoint;
};

/// Writes diagnostics.csv, snapshot_<step>.txt, checkpoint_<step>.bin and
/// checkpoint_final.bin under config.output.outdir. On resume, rows later
/// than the checkpoint are dropped from an existing diagnostics.csv before
/// appending. Throws ConfigError if the checkpoint belongs to another config.
RunSummary run(const RunConfig& config, const RunOptions& options = {});

/// Grid table: colatitude, longitude, u, phi_1..N, with '#' header lines.
void write_snapshot(std::ostream& out, const SimState& state, const SphereTransform& transform);

}  // namespace mcps
