#pragma once

// Verification suites behind the check-* subcommands and the acceptance
// binary. Every check returns verdicts; nothing here exits or prints except
// CheckReport::print.

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "mcps/config.hpp"
#include "mcps/runner.hpp"

namespace mcps {

struct Verdict {
  std::string id;           ///< e.g. "1.mass"
  std::string description;
  bool passed = false;
  double value = 0.0;
  std::string expectation;  ///< e.g. "< 1e-12"
  bool informational = false;  ///< reported, never fails
};

struct CheckReport {
  std::vector<Verdict> verdicts;

  void add(Verdict v) { verdicts.push_back(std::move(v)); }
  void append(const CheckReport& other);
  /// Non-informational verdicts that failed.
  std::vector<std::string> failures() const;
  bool passed() const { return failures().empty(); }
  /// One line per verdict:
  ///   PASS|FAIL|INFO <id> value=<%.6g> expect=<expectation> <description>
  void print(std::ostream& out) const;
};

/// Failing verdict ids with a given prefix ("6." matches "6.slope").
bool has_failure_with_prefix(const CheckReport& report, const std::string& prefix);

// --- monitored run (criteria 1, 2 decay part, 10) ---------------------------

struct RunTrace {
  std::uint64_t steps = 0;
  double dt = 0.0;
  std::vector<double> t;               ///< recorded times
  std::vector<double> min_phi;         ///< min_i min_x phi_i at t
  std::vector<double> energy;          ///< regularized energy at t
  std::vector<Eigen::MatrixXd> grids;  ///< phi grid at the coarser grid_every cadence
  std::vector<double> grid_t;
  double max_mass_error = 0.0;
  double max_sum_violation = 0.0;
  double max_u_leak = 0.0;
  double max_energy_increase = 0.0;    ///< max_n E^{n+1} - E^n
  double max_abs_residual = 0.0;
  int breakdowns = 0;
};

/// Runs config for `steps` steps from its initial state, checking the
/// constraints after every step.
RunTrace trace_run(const RunConfig& config, std::uint64_t steps, int record_every = 10, int grid_every = 100);

CheckReport check_constraints(const RunTrace& trace);                         // criterion 1
CheckReport check_energy_decay(const RunTrace& trace);                        // criterion 2, decay
CheckReport check_separation(const RunTrace& trace, const RunConfig& config, double t_onset = 0.1);  // 10

// --- individual suites -------------------------------------------------------

/// Criterion 2: max |r_n| over [0, t_end] at dt and dt/2; ratio in [3, 5].
CheckReport check_energy_refinement(const RunConfig& config, double t_end = 0.02);

struct StationaryOptions {
  double dt = 1e-2;
  std::uint64_t max_steps = 10000;
  double rate_tolerance = 1e-9;  ///< ||d_t phi|| that counts as converged
};
/// Criterion 3.
CheckReport check_stationary(const RunConfig& config, const StationaryOptions& options = {});

struct LinearDecayOptions {
  int lmax = 8;
  double t_final = 0.1;
  double dt = 1e-5;
  double amplitude = 0.1;
};
/// Criterion 4.
CheckReport check_linear_decay(const RunConfig& config, const LinearDecayOptions& options = {});

struct ContdepCheckOptions {
  std::vector<double> sizes = {1e-6, 1e-8};
  ContdepOptions run;
};
/// Criterion 5; uses config.params.dt.
CheckReport check_contdep(const RunConfig& config, const ContdepCheckOptions& options = {});

struct GeometryCheckOptions {
  int lmax = 12;           ///< profile band limit; the kernel uses 2 lmax
  double u_amplitude = 0.2;
  int u_degree = 4;
  double phi_amplitude = 0.1;
  std::uint64_t seed = 3;
  double rho_lo = 1e-3;
  double rho_hi = 1e-1;
  int rho_count = 9;
};
/// Criterion 6.
CheckReport check_geometry(const RunConfig& config, const GeometryCheckOptions& options = {});

/// Criterion 7: Poincare chain on random K2 fields.
CheckReport check_poincare(int lmax = 24, double radius = 1.0, int samples = 1000, std::uint64_t seed = 11);
/// Criterion 8: Yosida properties (i)-(v).
CheckReport check_yosida(int samples = 10000, std::uint64_t seed = 13);
/// Criterion 9: De Giorgi recursion property test.
CheckReport check_degiorgi(int samples = 10000, int n_max = 50, std::uint64_t seed = 17);

/// Table of the elementary examples of every module.
CheckReport selftest(const RunConfig& config);

}  // namespace mcps
