#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "erk/error.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out = "out";
  std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "key=value config file");
  cmd->add_option("--out", flags.out, "output directory");
  for (const auto& key : erk::cli::config_keys())
    cmd->add_option("--" + key.name, flags.values[key.name], key.help + " (default: " + key.default_value + ")");
}

erk::cli::RunConfig resolve(const CLI::App* cmd, const Flags& flags) {
  erk::cli::RawConfig raw;
  if (!flags.config.empty()) raw = erk::cli::read_config_file(flags.config);
  for (const auto& [key, value] : flags.values)
    if (cmd->count("--" + key) > 0) raw.set(key, value, "--" + key);
  erk::cli::RunConfig cfg = erk::cli::build_config(raw);
  cfg.out = flags.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runge-Kutta entropy dissipation toolkit"};
  app.require_subcommand(1);

  Flags flags;
  auto* simulate = app.add_subcommand("simulate", "run a scheme and record the entropy history");
  auto* gprofile = app.add_subcommand("gprofile", "profile G(tau) at base times for each scheme");
  auto* region = app.add_subcommand("region", "emit an admissibility region mask");
  auto* conditions = app.add_subcommand("check-conditions", "evaluate the scalar diffusion conditions");
  auto* dlss = app.add_subcommand("dlss-constants", "verify the exact DLSS constants");
  for (auto* cmd : {simulate, gprofile, region, conditions}) add_config_flags(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 2;
  }

  try {
    if (dlss->parsed()) return erk::cli::cmd_dlss_constants(std::cout) ? 0 : 1;
    if (simulate->parsed()) erk::cli::cmd_simulate(resolve(simulate, flags), std::cout);
    if (gprofile->parsed()) erk::cli::cmd_gprofile(resolve(gprofile, flags), std::cout);
    if (region->parsed()) erk::cli::cmd_region(resolve(region, flags), std::cout);
    if (conditions->parsed()) erk::cli::cmd_check_conditions(resolve(conditions, flags), std::cout);
  } catch (const erk::Error& e) {
    std::cerr << "error: " << erk::to_string(e.kind()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
