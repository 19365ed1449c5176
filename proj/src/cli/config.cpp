#include "cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "erk/error.hpp"

namespace erk::cli {

namespace {

std::string trim(std::string_view s) {
  auto b = s.begin(), e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return {b, e};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  const std::string& text(const std::string& key) {
    const auto it = raw_.entries.find(key);
    if (it != raw_.entries.end()) {
      origin_ = it->second.origin;
      value_ = it->second.value;
    } else {
      const auto& keys = config_keys();
      const auto spec = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
      origin_ = "default";
      value_ = spec->default_value;
    }
    echo.emplace_back(key, value_);
    key_ = key;
    return value_;
  }

  double real(const std::string& key) { return to_real(text(key)); }

  double positive(const std::string& key) {
    const double v = real(key);
    if (!(v > 0.0)) fail(ErrorKind::validation, "must be > 0");
    return v;
  }

  double nonnegative(const std::string& key) {
    const double v = real(key);
    if (!(v >= 0.0)) fail(ErrorKind::validation, "must be >= 0");
    return v;
  }

  int integer(const std::string& key, int min) {
    const std::string& s = text(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail(ErrorKind::config, "expected an integer");
    if (v < min) fail(ErrorKind::validation, fmt::format("must be >= {}", min));
    return v;
  }

  std::vector<double> reals(const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split_list(text(key))) out.push_back(to_real(item));
    return out;
  }

  std::string choice(const std::string& key, std::initializer_list<const char*> allowed) {
    const std::string& s = text(key);
    for (const char* a : allowed)
      if (s == a) return s;
    std::string names;
    for (const char* a : allowed) names += names.empty() ? a : fmt::format(", {}", a);
    fail(ErrorKind::validation, fmt::format("expected one of {}", names));
  }

  [[noreturn]] void fail(ErrorKind kind, const std::string& msg) const {
    throw Error(kind, fmt::format("key '{}' ({}): value '{}' {}", key_, origin_, value_, msg));
  }

  std::vector<std::pair<std::string, std::string>> echo;

 private:
  double to_real(const std::string& s) const {
    const std::string t = trim(s);
    if (t == "inf" || t == "nan") fail(ErrorKind::config, "is not a finite number");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
      fail(ErrorKind::config, "is not a number");
    return v;
  }

  const RawConfig& raw_;
  std::string key_;
  std::string origin_;
  std::string value_;
};

}  // namespace

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = {
      {"problem", "pme", "pme | heat | system | dlss"},
      {"beta", "2", "porous-medium exponent"},
      {"rho1", "1", "diffusivity of species 1"},
      {"rho2", "1", "diffusivity of species 2"},
      {"mu", "1", "exchange rate between species"},
      {"scheme", "implicit_euler", "time-stepping scheme"},
      {"n", "64", "number of grid cells"},
      {"length", "1", "length of the periodic domain"},
      {"tau", "1e-4", "time step"},
      {"t_end", "0.01", "final time"},
      {"newton_tol", "1e-12", "Newton residual tolerance"},
      {"newton_max_iter", "50", "Newton iteration cap"},
      {"entropy", "experiment", "power | log | experiment | first_order"},
      {"alpha", "5", "entropy exponent"},
      {"ic", "barenblatt", "barenblatt | cosine | random | file"},
      {"t0", "0.01", "Barenblatt time offset"},
      {"x_r", "0.25", "Barenblatt support edge"},
      {"mean", "1", "cosine/random mean"},
      {"amplitude", "0.5", "cosine/random amplitude"},
      {"seed", "1", "random initial data seed"},
      {"ic_file", "", "initial data file (species * n numbers)"},
      {"snapshots", "", "comma-separated snapshot times"},
      {"base_times", "0.001,0.003,0.006", "comma-separated G-profile base times"},
      {"tau_max", "1e-3", "largest profiled step"},
      {"m", "100", "number of profile intervals"},
      {"q_exponent", "num", "num (alpha+2beta-2) | text (alpha+2beta-5)"},
      {"profile_schemes", "", "comma-separated schemes to profile (default: all)"},
      {"family", "pme0", "region family: pme0 | pme1"},
      {"alpha_min", "0.5", "region grid"},
      {"alpha_max", "4", "region grid"},
      {"alpha_step", "0.5", "region grid"},
      {"beta_min", "0.5", "region grid"},
      {"beta_max", "4", "region grid"},
      {"beta_step", "0.5", "region grid"},
      {"d", "1", "space dimension for region and condition checks"},
      {"c_rk", "1", "scheme constant for region and condition checks"},
      {"preset", "heat-log", "condition preset: heat-log | pme-power"},
      {"u_min", "0.1", "condition grid start"},
      {"u_max", "10", "condition grid end"},
      {"u_points", "50", "condition grid size"},
  };
  return keys;
}

void RawConfig::set(const std::string& key, std::string value, std::string origin) {
  const auto& keys = config_keys();
  if (std::none_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; }))
    throw Error(ErrorKind::config, fmt::format("unknown key '{}' ({})", key, origin));
  entries[key] = {std::move(value), std::move(origin)};
}

RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::config, fmt::format("line {}: expected key=value, got '{}'", line_no, body));
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::config, fmt::format("line {}: missing key", line_no));
    raw.set(key, trim(body.substr(eq + 1)), fmt::format("line {}", line_no));
  }
  return raw;
}

RawConfig read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

RunConfig build_config(const RawConfig& raw) {
  RunConfig cfg;
  Reader r(raw);
  cfg.problem = r.choice("problem", {"pme", "heat", "system", "dlss"});
  cfg.beta = r.positive("beta");
  cfg.rho1 = r.nonnegative("rho1");
  cfg.rho2 = r.nonnegative("rho2");
  cfg.mu = r.nonnegative("mu");
  cfg.scheme = r.text("scheme");
  builtin_schemes().lookup(cfg.scheme);
  cfg.n = r.integer("n", 4);
  cfg.length = r.positive("length");
  cfg.tau = r.positive("tau");
  cfg.t_end = r.nonnegative("t_end");
  if (cfg.t_end < cfg.tau) r.fail(ErrorKind::validation, fmt::format("must be >= tau = {}", cfg.tau));
  cfg.newton.tol = r.positive("newton_tol");
  cfg.newton.max_iter = r.integer("newton_max_iter", 1);
  cfg.entropy = r.choice("entropy", {"power", "log", "experiment", "first_order"});
  cfg.alpha = r.nonnegative("alpha");
  const std::string ic = r.choice("ic", {"barenblatt", "cosine", "random", "file"});
  cfg.ic = ic == "barenblatt" ? InitialKind::barenblatt
           : ic == "cosine"   ? InitialKind::cosine
           : ic == "random"   ? InitialKind::random
                              : InitialKind::file;
  if (cfg.ic == InitialKind::barenblatt && (cfg.problem != "pme" || cfg.beta <= 1.0))
    r.fail(ErrorKind::validation, "needs problem=pme with beta > 1");
  cfg.t0 = r.positive("t0");
  cfg.x_r = r.real("x_r");
  cfg.mean = r.real("mean");
  cfg.amplitude = r.nonnegative("amplitude");
  cfg.seed = static_cast<std::uint64_t>(r.integer("seed", 0));
  cfg.ic_file = r.text("ic_file");
  if (cfg.ic == InitialKind::file && cfg.ic_file.empty())
    r.fail(ErrorKind::validation, "is required for ic=file");
  cfg.snapshots = r.reals("snapshots");
  cfg.base_times = r.reals("base_times");
  for (double t : cfg.base_times)
    if (t < 0.0) r.fail(ErrorKind::validation, "base times must be >= 0");
  cfg.tau_max = r.positive("tau_max");
  cfg.m = r.integer("m", 3);
  cfg.q_exponent = r.choice("q_exponent", {"num", "text"}) == "num" ? QExponent::num_q : QExponent::text;
  cfg.profile_schemes = split_list(r.text("profile_schemes"));
  for (const auto& s : cfg.profile_schemes) builtin_schemes().lookup(s);
  if (cfg.profile_schemes.empty()) cfg.profile_schemes = builtin_schemes().names();
  cfg.region_family = r.choice("family", {"pme0", "pme1"});
  cfg.alpha_range.lo = r.positive("alpha_min");
  cfg.alpha_range.hi = r.positive("alpha_max");
  cfg.alpha_range.step = r.positive("alpha_step");
  cfg.beta_range.lo = r.positive("beta_min");
  cfg.beta_range.hi = r.positive("beta_max");
  cfg.beta_range.step = r.positive("beta_step");
  cfg.d = r.integer("d", 1);
  cfg.c_rk = r.real("c_rk");
  if (cfg.c_rk != 0.0 && cfg.c_rk != 1.0 && cfg.c_rk != 2.0) r.fail(ErrorKind::validation, "must be 0, 1 or 2");
  cfg.preset = r.choice("preset", {"heat-log", "pme-power"});
  cfg.u_min = r.positive("u_min");
  cfg.u_max = r.positive("u_max");
  if (cfg.u_max <= cfg.u_min) r.fail(ErrorKind::validation, "must exceed u_min");
  cfg.u_points = r.integer("u_points", 1);
  cfg.echo = std::move(r.echo);
  return cfg;
}

ProblemSpec make_problem(const RunConfig& cfg) {
  const Grid1D grid(cfg.n, cfg.length);
  if (cfg.problem == "pme") return {PorousMedium{cfg.beta}, grid};
  if (cfg.problem == "heat")
    return {ScalarDiffusion{[](double) { return 1.0; }, [](double) { return 0.0; }}, grid};
  if (cfg.problem == "system") return {LinearSystem{cfg.rho1, cfg.rho2, cfg.mu}, grid};
  return {Dlss{}, grid};
}

EntropyFunctional make_entropy(const RunConfig& cfg) {
  if (cfg.entropy == "power") return EntropyFunctional(PowerEntropy{cfg.alpha});
  if (cfg.entropy == "log") return EntropyFunctional(LogEntropySum{});
  if (cfg.entropy == "experiment") return EntropyFunctional(ExperimentPower{cfg.alpha});
  return EntropyFunctional(FirstOrder{cfg.alpha});
}

double barenblatt(double x, double beta, double t0, double x_r) {
  const double k = (beta - 1.0) / (2.0 * beta * (beta + 1.0));
  const double s = std::pow(t0, 2.0 / (beta + 1.0));
  const double c = k * (x_r - 0.5) * (x_r - 0.5) / s;
  const double core = std::max(0.0, c - k * (x - 0.5) * (x - 0.5) / s);
  return std::pow(t0, -1.0 / (beta + 1.0)) * std::pow(core, 1.0 / (beta - 1.0));
}

StateField make_initial(const RunConfig& cfg, const ProblemSpec& problem) {
  const Grid1D& g = problem.grid();
  StateField u = problem.make_state();
  switch (cfg.ic) {
    case InitialKind::barenblatt: {
      const auto* pm = std::get_if<PorousMedium>(&problem.family());
      if (!pm || pm->beta <= 1.0)
        throw Error(ErrorKind::validation, "Barenblatt data needs the porous-medium problem with beta > 1");
      for (int i = 0; i < g.n(); ++i) u(0, i) = barenblatt(g.x(i), pm->beta, cfg.t0, cfg.x_r);
      break;
    }
    case InitialKind::cosine:
      for (int s = 0; s < u.species(); ++s)
        for (int i = 0; i < g.n(); ++i)
          u(s, i) = cfg.mean + cfg.amplitude * std::cos(2.0 * std::numbers::pi * g.x(i) / g.length());
      break;
    case InitialKind::random: {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (auto& v : u.values()) v = cfg.mean + cfg.amplitude * dist(rng);
      break;
    }
    case InitialKind::file: {
      std::ifstream in(cfg.ic_file);
      if (!in) throw Error(ErrorKind::io, fmt::format("cannot open initial data file '{}'", cfg.ic_file));
      std::vector<double> values;
      for (std::string tok; in >> tok;) {
        for (const auto& item : split_list(tok)) {
          char* end = nullptr;
          const double v = std::strtod(item.c_str(), &end);
          if (end != item.c_str() + item.size())
            throw Error(ErrorKind::config, fmt::format("initial data file: '{}' is not a number", item));
          values.push_back(v);
        }
      }
      if (static_cast<Eigen::Index>(values.size()) != u.size())
        throw Error(ErrorKind::validation, fmt::format("initial data file holds {} values, expected {}",
                                                       values.size(), u.size()));
      u.values() = Eigen::Map<const Eigen::VectorXd>(values.data(), u.size());
      break;
    }
  }
  return u;
}

}  // namespace erk::cli
