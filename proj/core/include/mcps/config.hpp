#pragma once

// Sectioned key = value run configuration.
//
//   [model]          n_components, kappa, sigma, b, epsilon, beta, radius,
//                    lambda, alpha, chi | A, mobility, yosida_domain
//   [discretization] lmax, dt, t_final, h_reg, stabilization
//   [init]           seed, amplitude, l_init, margin, u_amplitude
//   [output]         outdir, diagnostics_every, snapshot_every, checkpoint_every
//
// Vectors are comma or space separated; matrices list rows separated by ';'.
// `mobility = projector` selects I - ee^T/N; `stabilization = auto` resolves
// to b / (epsilon h_reg). Unknown keys are rejected.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "mcps/fields.hpp"

namespace mcps {

struct OutputOptions {
  std::string outdir = "out";
  int diagnostics_every = 10;
  int snapshot_every = 0;    ///< 0 disables
  int checkpoint_every = 0;  ///< 0 disables; a final checkpoint is always written
};

struct RunConfig {
  ModelParams params = ModelParams::defaults();
  int lmax = 24;
  double t_final = 1.0;
  bool auto_stabilization = true;
  InitOptions init;
  double u_amplitude = 0.0;  ///< L2 norm of the random initial deformation
  OutputOptions output;

  /// Number of steps to reach t_final (rounded).
  std::uint64_t total_steps() const;
  /// Throws ConfigError naming the first inconsistent key.
  void validate() const;
};

/// Throws ConfigError (bad or unknown key) or IoError (unreadable file).
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);

/// Canonical text form; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& config);

/// FNV-1a of the canonical physics and discretization settings. t_final and
/// the output block are excluded so that a run can be resumed and extended.
std::uint64_t config_hash(const RunConfig& config);

/// Applies MCPS_OUTDIR and MCPS_THREADS if set.
void apply_environment(RunConfig& config);

}  // namespace mcps
