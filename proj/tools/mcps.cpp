// mcps command line: run and the check-* suites.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcps/checks.hpp"
#include "mcps/config.hpp"
#include "mcps/error.hpp"
#include "mcps/runner.hpp"

namespace {

mcps::RunConfig load(const std::string& path) {
  mcps::RunConfig config = mcps::load_config(path);
  mcps::apply_environment(config);
  config.validate();
  return config;
}

std::vector<std::string> expected_failures;

// Exit 0 iff the failing ids are exactly --expect-fail (none by default).
int report(const mcps::CheckReport& r) {
  r.print(std::cout);
  const auto failed = r.failures();
  std::cout << (failed.empty() ? "RESULT PASS" : "RESULT FAIL") << " failed=" << failed.size() << '\n';
  const std::set<std::string> got(failed.begin(), failed.end());
  const std::set<std::string> want(expected_failures.begin(), expected_failures.end());
  if (!want.empty() && got == want) std::cout << "all failures expected\n";
  return got == want ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicomponent phase separation on a deformable sphere"};
  app.require_subcommand(1);

  std::string config_path;
  std::string outdir;
  std::string resume;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "integrate a configuration and write diagnostics");
  run->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", outdir, "output directory (overrides [output] outdir and MCPS_OUTDIR)");
  run->add_option("--resume", resume, "checkpoint to continue from")->check(CLI::ExistingFile);
  run->add_flag("--quiet", quiet, "no progress on stderr");

  std::uint64_t energy_steps = 1000;
  double refine_t = 0.02;
  auto* energy = app.add_subcommand("check-energy", "discrete dissipation and dt refinement of the residual");
  energy->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  energy->add_option("--steps", energy_steps, "steps of the monotonicity run")->capture_default_str();
  energy->add_option("--refine-t", refine_t, "horizon of the refinement study")->capture_default_str();

  mcps::GeometryCheckOptions geo;
  auto* geometry = app.add_subcommand("check-geometry", "variation formulas and the small-deformation expansion");
  geometry->add_option("--config", config_path)->required()->check(CLI::ExistingFile);
  geometry->add_option("--lmax", geo.lmax, "profile band limit")->capture_default_str();
  geometry->add_option("--u-amplitude", geo.u_amplitude, "L2 norm of the test deformation")->capture_default_str();

  auto* contdep = app.add_subcommand("check-contdep", "twin runs for continuous dependence");
  contdep->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  auto* separation = app.add_subcommand("check-separation", "strict separation along a default run");
  separation->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  auto* self = app.add_subcommand("selftest", "elementary examples of every module");
  self->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  for (CLI::App* sub : {energy, geometry, contdep, separation, self}) {
    sub->add_option("--expect-fail", expected_failures, "verdict ids known to fail")->delimiter(',');
  }

  CLI11_PARSE(app, argc, argv);

  try {
    mcps::RunConfig config = load(config_path);
    if (*run) {
      if (!outdir.empty()) config.output.outdir = outdir;
      mcps::RunOptions options;
      if (!resume.empty()) options.resume = resume;
      options.quiet = quiet;
      const mcps::RunSummary s = mcps::run(config, options);
      std::cerr << "steps " << s.first_step << ".." << s.last_step << ", t = " << s.t_final
                << ", breakdowns = " << s.breakdowns << ", checkpoint " << s.final_checkpoint << '\n';
      return 0;
    }
    if (*energy) {
      const mcps::RunTrace trace = mcps::trace_run(config, std::min(energy_steps, config.total_steps()));
      mcps::CheckReport r = mcps::check_energy_decay(trace);
      r.append(mcps::check_energy_refinement(config, refine_t));
      return report(r);
    }
    if (*geometry) return report(mcps::check_geometry(config, geo));
    if (*contdep) return report(mcps::check_contdep(config));
    if (*separation) {
      const mcps::RunTrace trace = mcps::trace_run(config, config.total_steps());
      return report(mcps::check_separation(trace, config));
    }
    if (*self) return report(mcps::selftest(config));
  } catch (const mcps::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
