#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mcps/checkpoint.hpp"
#include "mcps/config.hpp"
#include "mcps/error.hpp"
#include "mcps/runner.hpp"

using namespace mcps;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
[model]
n_components = 3
alpha = 0.4, 0.35, 0.25
lambda = 1 -0.5 0

[discretization]
lmax = 6
dt = 1e-4
t_final = 0.003

[init]
seed = 4
u_amplitude = 0.05

[output]
diagnostics_every = 3
checkpoint_every = 10
snapshot_every = 15
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mcps_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing, defaults and round trip") {
  const RunConfig c = parse_config_string(kSmall);
  CHECK(c.lmax == 6);
  CHECK(c.total_steps() == 30);
  CHECK(c.params.stabilization == doctest::Approx(c.params.b / (c.params.epsilon * c.params.h)));
  CHECK(c.params.interaction.matrix()(0, 1) == 3.5);
  const RunConfig back = parse_config_string(to_ini(c));
  CHECK(to_ini(back) == to_ini(c));
  CHECK(config_hash(back) == config_hash(c));

  RunConfig longer = c;
  longer.t_final = 5.0;
  longer.output.outdir = "elsewhere";
  CHECK(config_hash(longer) == config_hash(c));
  RunConfig stiffer = c;
  stiffer.params.kappa = 2.0;
  CHECK(config_hash(stiffer) != config_hash(c));

  const RunConfig fixed = parse_config_string("[discretization]\nstabilization = 3.5\n[model]\nA = 0 1 1; 1 0 1; 1 1 0\n");
  CHECK(fixed.params.stabilization == 3.5);
  CHECK_FALSE(fixed.auto_stabilization);
  CHECK(fixed.params.interaction.matrix()(2, 1) == 1.0);
}

TEST_CASE("config errors name the offending key") {
  CHECK(config_error("[model]\nkapa = 1\n").find("kapa") != std::string::npos);
  CHECK(config_error("[model]\nkappa = -1\n").find("kappa") != std::string::npos);
  CHECK(config_error("[discretization]\ndt = fast\n").find("dt") != std::string::npos);
  CHECK(config_error("[model]\nalpha = 0.5, 0.6, 0.1\n").find("alpha") != std::string::npos);
  CHECK(config_error("[discretization]\nlmax = 1\n").find("lmax") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/mcps.cfg"), IoError);
}

TEST_CASE("environment overrides") {
  RunConfig c = parse_config_string(kSmall);
  ::setenv("MCPS_OUTDIR", "/tmp/mcps_env_out", 1);
  apply_environment(c);
  ::unsetenv("MCPS_OUTDIR");
  CHECK(c.output.outdir == "/tmp/mcps_env_out");
}

TEST_CASE("checkpoint round trip and corruption") {
  const RunConfig c = parse_config_string(kSmall);
  Simulation sim(c);
  for (int k = 0; k < 4; ++k) sim.advance();
  const fs::path dir = scratch("ckpt");
  fs::create_directories(dir);
  const std::string path = (dir / "a.bin").string();
  save_checkpoint(path, sim.state(), 99);
  const Checkpoint back = load_checkpoint(path);
  CHECK(back.config_hash == 99);
  CHECK(back.state.step == 4);
  CHECK(back.state.t == sim.state().t);
  CHECK(back.state.phi.coeffs.coeffs == sim.state().phi.coeffs.coeffs);
  CHECK(back.state.u.u.coeffs == sim.state().u.u.coeffs);
  const std::string bytes = slurp(path);
  CHECK(bytes.substr(0, 5) == "MCPS1");

  std::ofstream(dir / "bad.bin", std::ios::binary) << "MCPS2" << bytes.substr(5);
  CHECK_THROWS_AS(load_checkpoint((dir / "bad.bin").string()), IoError);
  std::ofstream(dir / "short.bin", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  CHECK_THROWS_AS(load_checkpoint((dir / "short.bin").string()), IoError);
  std::ofstream(dir / "long.bin", std::ios::binary) << bytes << 'x';
  CHECK_THROWS_AS(load_checkpoint((dir / "long.bin").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("run writes diagnostics, snapshots and checkpoints; resume continues identically") {
  RunConfig c = parse_config_string(kSmall);
  const fs::path full = scratch("full");
  c.output.outdir = full.string();
  RunOptions quiet;
  quiet.quiet = true;
  const RunSummary s = run(c, quiet);
  CHECK(s.last_step == 30);
  CHECK(fs::exists(full / "config.ini"));
  CHECK(fs::exists(full / "snapshot_15.txt"));
  CHECK(fs::exists(full / "checkpoint_10.bin"));
  CHECK(fs::exists(full / "checkpoint_final.bin"));

  const std::string csv = slurp(full / "diagnostics.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == diagnostics_header(3));
  const auto columns = std::count(header.begin(), header.end(), ',') + 1;
  int rows = 0;
  for (std::string line; std::getline(lines, line); ++rows) {
    CHECK(std::count(line.begin(), line.end(), ',') + 1 == columns);
  }
  CHECK(rows == 11);  // steps 0, 3, ..., 30

  // Interrupted run continued from its checkpoint.
  const fs::path part = scratch("part");
  RunConfig first = c;
  first.output.outdir = part.string();
  first.t_final = 0.0012;
  run(first, quiet);
  RunOptions resume = quiet;
  resume.resume = (part / "checkpoint_final.bin").string();
  RunConfig second = c;
  second.output.outdir = part.string();
  run(second, resume);
  CHECK(slurp(part / "diagnostics.csv") == csv);
  CHECK(slurp(part / "checkpoint_final.bin") == slurp(full / "checkpoint_final.bin"));

  RunConfig other = c;
  other.params.kappa = 2.0;
  other.output.outdir = part.string();
  CHECK_THROWS_AS(run(other, resume), ConfigError);
  fs::remove_all(full);
  fs::remove_all(part);
}

TEST_CASE("snapshot layout") {
  const RunConfig c = parse_config_string(kSmall);
  Simulation sim(c);
  std::ostringstream out;
  write_snapshot(out, sim.state(), sim.transform());
  std::istringstream in(out.str());
  int comments = 0, rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind('#', 0) == 0) {
      ++comments;
      continue;
    }
    std::istringstream fields(line);
    int n = 0;
    for (double v; fields >> v;) ++n;
    CHECK(n == 6);  // colatitude, longitude, u, phi_1..3
    ++rows;
  }
  CHECK(comments >= 3);
  CHECK(rows == static_cast<int>(sim.transform().grid().size()));
}
