#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "erk/entropy.hpp"
#include "erk/operators.hpp"
#include "erk/regions.hpp"
#include "erk/stepping.hpp"
#include "erk/tableau.hpp"

namespace erk::cli {

struct KeySpec {
  std::string name;
  std::string default_value;
  std::string help;
};

/// Every recognised key in echo order.
const std::vector<KeySpec>& config_keys();

/// Raw key=value assignments with where each came from ("line 3", "--beta").
struct RawConfig {
  struct Entry {
    std::string value;
    std::string origin;
  };
  std::map<std::string, Entry> entries;

  /// Throws Error(config) for an unknown key.
  void set(const std::string& key, std::string value, std::string origin);
};

/// Parses "key = value" lines; '#' starts a comment. Throws Error(config)
/// naming the key and line for unknown keys and malformed lines.
RawConfig parse_config_text(const std::string& text);
RawConfig read_config_file(const std::filesystem::path& path);

enum class InitialKind { barenblatt, cosine, random, file };

struct RunConfig {
  std::string problem = "pme";
  double beta = 2.0;
  double rho1 = 1.0;
  double rho2 = 1.0;
  double mu = 1.0;
  std::string scheme = "implicit_euler";
  int n = 64;
  double length = 1.0;
  double tau = 1e-4;
  double t_end = 0.01;
  NewtonConfig newton;
  std::string entropy = "experiment";
  double alpha = 5.0;
  InitialKind ic = InitialKind::barenblatt;
  double t0 = 0.01;
  double x_r = 0.25;
  double mean = 1.0;
  double amplitude = 0.5;
  std::uint64_t seed = 1;
  std::string ic_file;
  std::vector<double> snapshots;
  std::vector<double> base_times{0.001, 0.003, 0.006};
  double tau_max = 1e-3;
  int m = 100;
  QExponent q_exponent = QExponent::num_q;
  std::vector<std::string> profile_schemes;
  std::string region_family = "pme0";
  AxisRange alpha_range{0.5, 4.0, 0.5};
  AxisRange beta_range{0.5, 4.0, 0.5};
  int d = 1;
  double c_rk = 1.0;
  std::string preset = "heat-log";
  double u_min = 0.1;
  double u_max = 10.0;
  int u_points = 50;
  std::filesystem::path out = "out";

  /// Final key=value assignments, one per key, in config_keys() order.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Fills defaults, converts and validates. Errors name the key and its origin:
/// Error(config) for unparsable values, Error(validation) for constraint
/// violations, Error(lookup) for unknown schemes.
RunConfig build_config(const RawConfig& raw);

/// The problem described by cfg on its grid.
ProblemSpec make_problem(const RunConfig& cfg);
EntropyFunctional make_entropy(const RunConfig& cfg);

/// Initial state on `grid`. Barenblatt needs the porous-medium problem with
/// β > 1; file input must hold species * n numbers.
StateField make_initial(const RunConfig& cfg, const ProblemSpec& problem);

/// The Barenblatt datum at x for the given parameters.
double barenblatt(double x, double beta, double t0, double x_r);

}  // namespace erk::cli
