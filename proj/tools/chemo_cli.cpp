// Command-line front end: run, constants, sweep, estimate-constant.

#include "chemo/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Density-suppressed motility chemotaxis simulator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Integrate a scenario and write diagnostics");
  run->add_option("config", config_path, "Scenario file")->required();

  auto* constants = app.add_subcommand("constants", "Print the theoretical constants and regime");
  constants->add_option("config", config_path, "Scenario file")->required();

  chemo::SweepSpec sweep;
  auto* sw = app.add_subcommand("sweep", "Run a one-parameter sweep");
  sw->add_option("config", config_path, "Scenario file")->required();
  sw->add_option("--param", sweep.param, "a, b, sigma, chi or k")->required();
  sw->add_option("--lo", sweep.lo)->required();
  sw->add_option("--hi", sweep.hi)->required();
  sw->add_option("--count", sweep.count)->required()->check(CLI::PositiveNumber);
  sw->add_flag("--log", sweep.log_scale, "Geometric spacing");
  sw->add_option("--out", sweep.out_path, "Sweep CSV (defaults to [output] sweep)");

  std::string which;
  auto* est = app.add_subcommand("estimate-constant", "Estimate xi, G or R numerically");
  est->add_option("config", config_path, "Scenario file")->required();
  est->add_option("--which", which)->required()->check(CLI::IsMember({"xi", "G", "R"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? chemo::kExitOk : chemo::kExitError;
  }

  chemo::ScenarioConfig config;
  try {
    config = chemo::parse_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return chemo::kExitError;
  }

  if (run->parsed()) return chemo::cmd_run(config, std::cout, std::cerr);
  if (constants->parsed()) return chemo::cmd_constants(config, std::cout, std::cerr);
  if (sw->parsed()) return chemo::cmd_sweep(config, sweep, std::cout, std::cerr);
  return chemo::cmd_estimate_constant(config, which, std::cout, std::cerr);
}
