#include "mcps/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mcps/error.hpp"
#include "mcps/parallel.hpp"

namespace mcps {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys = {
    "model.n_components",          "model.kappa",        "model.sigma",       "model.b",
    "model.epsilon",               "model.beta",         "model.radius",      "model.lambda",
    "model.alpha",                 "model.chi",          "model.A",           "model.mobility",
    "model.yosida_domain",         "discretization.lmax", "discretization.dt", "discretization.t_final",
    "discretization.h_reg",        "discretization.stabilization",            "init.seed",
    "init.amplitude",              "init.l_init",        "init.margin",       "init.u_amplitude",
    "output.outdir",               "output.diagnostics_every",                "output.snapshot_every",
    "output.checkpoint_every"};

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError(key, "expected a finite number, got '" + text + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  if (used != text.size()) throw ConfigError(key, "expected an integer, got '" + text + "'");
  return v;
}

std::vector<double> parse_vector(const std::string& key, const std::string& text) {
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(cleaned);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(parse_double(key, token));
  if (out.empty()) throw ConfigError(key, "expected a list of numbers");
  return out;
}

Eigen::MatrixXd parse_matrix(const std::string& key, const std::string& text, int n) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string row;
  while (std::getline(in, row, ';')) {
    if (row.find_first_not_of(" \t") == std::string::npos) continue;
    rows.push_back(parse_vector(key, row));
  }
  if (static_cast<int>(rows.size()) != n) {
    throw ConfigError(key, "expected " + std::to_string(n) + " rows separated by ';'");
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw ConfigError(key, "row " + std::to_string(i + 1) + " needs " + std::to_string(n) + " entries");
    }
    for (int j = 0; j < n; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += format_double(v(i));
  }
  return s;
}

std::string format_matrix(const Eigen::MatrixXd& m) {
  std::string s;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i > 0) s += "; ";
    s += format_vector(m.row(i).transpose());
  }
  return s;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> get(const std::string& key) const {
    const auto v = tree_.get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return *v;
  }
  double number(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? parse_double(key, *v) : fallback;
  }
  long long integer(const std::string& key, long long fallback) const {
    const auto v = get(key);
    return v ? parse_integer(key, *v) : fallback;
  }

 private:
  const pt::ptree& tree_;
};

template <class F>
void wrap(const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

std::uint64_t RunConfig::total_steps() const {
  return static_cast<std::uint64_t>(std::llround(t_final / params.dt));
}

void RunConfig::validate() const {
  if (lmax < 2) throw ConfigError("discretization.lmax", "must be >= 2");
  if (!(t_final >= 0.0)) throw ConfigError("discretization.t_final", "must be non-negative");
  if (init.l_init < 1 || init.l_init > lmax) throw ConfigError("init.l_init", "must lie in [1, lmax]");
  if (!(init.amplitude >= 0.0)) throw ConfigError("init.amplitude", "must be non-negative");
  if (!(init.margin >= 0.0)) throw ConfigError("init.margin", "must be non-negative");
  if (!(u_amplitude >= 0.0)) throw ConfigError("init.u_amplitude", "must be non-negative");
  if (u_amplitude > 0.0 && init.l_init < 2) throw ConfigError("init.l_init", "must be >= 2 when u_amplitude > 0");
  if (output.diagnostics_every < 1) throw ConfigError("output.diagnostics_every", "must be >= 1");
  if (output.snapshot_every < 0) throw ConfigError("output.snapshot_every", "must be >= 0");
  if (output.checkpoint_every < 0) throw ConfigError("output.checkpoint_every", "must be >= 0");
  try {
    params.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError("model", e.what());
  }
}

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("<file>", e.what());
  }
  for (const auto& section : tree) {
    if (section.second.empty()) throw ConfigError(section.first, "keys must live inside a [section]");
    for (const auto& entry : section.second) {
      const std::string key = section.first + "." + entry.first;
      if (!kKnownKeys.count(key)) throw ConfigError(key, "unknown key");
    }
  }
  const Reader r(tree);
  RunConfig c;
  ModelParams& p = c.params;
  const ModelParams defaults = ModelParams::defaults();

  const int n = static_cast<int>(r.integer("model.n_components", defaults.components()));
  if (n < 2) throw ConfigError("model.n_components", "must be >= 2");
  p.kappa = r.number("model.kappa", defaults.kappa);
  p.sigma = r.number("model.sigma", defaults.sigma);
  p.b = r.number("model.b", defaults.b);
  p.epsilon = r.number("model.epsilon", defaults.epsilon);
  p.beta = r.number("model.beta", defaults.beta);
  p.radius = r.number("model.radius", defaults.radius);

  if (const auto v = r.get("model.lambda")) {
    p.lambda = to_eigen(parse_vector("model.lambda", *v));
  } else if (n == 3) {
    p.lambda = defaults.lambda;
  } else {
    p.lambda = Eigen::VectorXd::Zero(n);
  }
  if (p.lambda.size() != n) throw ConfigError("model.lambda", "needs n_components entries");

  if (const auto v = r.get("model.alpha")) {
    p.alpha = to_eigen(parse_vector("model.alpha", *v));
  } else if (n == 3) {
    p.alpha = defaults.alpha;
  } else {
    p.alpha = Eigen::VectorXd::Constant(n, 1.0 / n);
  }
  if (p.alpha.size() != n) throw ConfigError("model.alpha", "needs n_components entries");

  const auto a_text = r.get("model.A");
  const auto chi_text = r.get("model.chi");
  if (a_text && chi_text) throw ConfigError("model.A", "give either A or chi, not both");
  if (a_text) {
    const Eigen::MatrixXd a = parse_matrix("model.A", *a_text, n);
    wrap("model.A", [&] { p.interaction = InteractionMatrix(a); });
  } else {
    const double chi = chi_text ? parse_double("model.chi", *chi_text) : 3.5;
    wrap("model.chi", [&] { p.interaction = InteractionMatrix::uniform_off_diagonal(n, chi); });
  }

  const std::string mob = r.get("model.mobility").value_or("projector");
  if (mob == "projector") {
    p.mobility = projector_mobility(n);
  } else {
    const Eigen::MatrixXd l = parse_matrix("model.mobility", mob, n);
    wrap("model.mobility", [&] { p.mobility = validate_mobility(l); });
  }

  const std::string domain = r.get("model.yosida_domain").value_or("unit_interval");
  if (domain == "unit_interval") {
    p.yosida = YosidaDomain::UnitInterval;
  } else if (domain == "extended") {
    p.yosida = YosidaDomain::Extended;
  } else {
    throw ConfigError("model.yosida_domain", "expected unit_interval or extended");
  }

  c.lmax = static_cast<int>(r.integer("discretization.lmax", c.lmax));
  p.dt = r.number("discretization.dt", defaults.dt);
  c.t_final = r.number("discretization.t_final", c.t_final);
  p.h = r.number("discretization.h_reg", defaults.h);
  if (!(p.h > 0.0)) throw ConfigError("discretization.h_reg", "must be positive");
  if (!(p.epsilon > 0.0)) throw ConfigError("model.epsilon", "must be positive");
  const std::string stab = r.get("discretization.stabilization").value_or("auto");
  if (stab == "auto") {
    c.auto_stabilization = true;
    p.stabilization = p.auto_stabilization();
  } else {
    c.auto_stabilization = false;
    p.stabilization = parse_double("discretization.stabilization", stab);
  }

  const long long seed = r.integer("init.seed", static_cast<long long>(c.init.seed));
  if (seed < 0) throw ConfigError("init.seed", "must be non-negative");
  c.init.seed = static_cast<std::uint64_t>(seed);
  c.init.amplitude = r.number("init.amplitude", c.init.amplitude);
  c.init.l_init = static_cast<int>(r.integer("init.l_init", c.init.l_init));
  c.init.margin = r.number("init.margin", c.init.margin);
  c.u_amplitude = r.number("init.u_amplitude", c.u_amplitude);

  c.output.outdir = r.get("output.outdir").value_or(c.output.outdir);
  c.output.diagnostics_every = static_cast<int>(r.integer("output.diagnostics_every", c.output.diagnostics_every));
  c.output.snapshot_every = static_cast<int>(r.integer("output.snapshot_every", c.output.snapshot_every));
  c.output.checkpoint_every = static_cast<int>(r.integer("output.checkpoint_every", c.output.checkpoint_every));

  // Name the offending key for the simple scalar invariants.
  const std::pair<const char*, double> positive[] = {{"model.kappa", p.kappa},   {"model.sigma", p.sigma},
                                                     {"model.b", p.b},           {"model.radius", p.radius},
                                                     {"discretization.dt", p.dt}};
  for (const auto& [key, value] : positive) {
    if (!(value > 0.0)) throw ConfigError(key, "must be positive");
  }
  if (!(p.beta >= 0.0)) throw ConfigError("model.beta", "must be non-negative");
  if (!(p.stabilization >= 0.0)) throw ConfigError("discretization.stabilization", "must be non-negative");
  for (int i = 0; i < n; ++i) {
    if (!(p.alpha(i) > 0.0 && p.alpha(i) < 1.0)) throw ConfigError("model.alpha", "entries must lie in (0, 1)");
  }
  if (std::abs(p.alpha.sum() - 1.0) > 1e-12) throw ConfigError("model.alpha", "entries must sum to 1");
  c.validate();
  return c;
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in);
}

namespace {

std::string physics_block(const RunConfig& c) {
  const ModelParams& p = c.params;
  std::ostringstream out;
  out << "[model]\n"
      << "n_components = " << p.components() << "\n"
      << "kappa = " << format_double(p.kappa) << "\n"
      << "sigma = " << format_double(p.sigma) << "\n"
      << "b = " << format_double(p.b) << "\n"
      << "epsilon = " << format_double(p.epsilon) << "\n"
      << "beta = " << format_double(p.beta) << "\n"
      << "radius = " << format_double(p.radius) << "\n"
      << "lambda = " << format_vector(p.lambda) << "\n"
      << "alpha = " << format_vector(p.alpha) << "\n"
      << "A = " << format_matrix(p.interaction.matrix()) << "\n"
      << "mobility = " << format_matrix(p.mobility.matrix()) << "\n"
      << "yosida_domain = " << (p.yosida == YosidaDomain::UnitInterval ? "unit_interval" : "extended") << "\n"
      << "\n[discretization]\n"
      << "lmax = " << c.lmax << "\n"
      << "dt = " << format_double(p.dt) << "\n"
      << "h_reg = " << format_double(p.h) << "\n"
      << "stabilization = " << (c.auto_stabilization ? std::string("auto") : format_double(p.stabilization)) << "\n";
  return out.str();
}

std::string init_block(const RunConfig& c) {
  std::ostringstream out;
  out << "\n[init]\n"
      << "seed = " << c.init.seed << "\n"
      << "amplitude = " << format_double(c.init.amplitude) << "\n"
      << "l_init = " << c.init.l_init << "\n"
      << "margin = " << format_double(c.init.margin) << "\n"
      << "u_amplitude = " << format_double(c.u_amplitude) << "\n";
  return out.str();
}

}  // namespace

std::string to_ini(const RunConfig& c) {
  std::string text = physics_block(c);
  // t_final belongs to [discretization] but stays out of the hash.
  text += "t_final = " + format_double(c.t_final) + "\n";
  text += init_block(c);
  std::ostringstream out;
  out << "\n[output]\n"
      << "outdir = " << c.output.outdir << "\n"
      << "diagnostics_every = " << c.output.diagnostics_every << "\n"
      << "snapshot_every = " << c.output.snapshot_every << "\n"
      << "checkpoint_every = " << c.output.checkpoint_every << "\n";
  return text + out.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string text = physics_block(config) + init_block(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void apply_environment(RunConfig& config) {
  if (const char* dir = std::getenv("MCPS_OUTDIR"); dir != nullptr && *dir != '\0') config.output.outdir = dir;
  if (const char* threads = std::getenv("MCPS_THREADS"); threads != nullptr && *threads != '\0') {
    const long long n = parse_integer("MCPS_THREADS", threads);
    if (n < 1) throw ConfigError("MCPS_THREADS", "must be >= 1");
    set_thread_count(static_cast<int>(n));
  }
}

}  // namespace mcps
