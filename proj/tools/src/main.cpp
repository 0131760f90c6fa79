#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zerores/cli/config.hpp"
#include "zerores/cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace zerores::cli;

  CLI::App app{"zerores: zero-energy resonance experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ZERORES_VERSION));

  std::string experiment;
  std::string config;
  RunOptions opts;
  std::uint64_t seed = 0;

  auto* run_cmd = app.add_subcommand("run", "Run one experiment and write CSV outputs");
  run_cmd->add_option("experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(kExperiments));
  run_cmd->add_option("--config", config, "JSON configuration file")->required();
  run_cmd->add_option("--out", opts.out_dir, "Output directory (overrides output_dir)");
  run_cmd->add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = run_cmd->add_option("--seed", seed, "RNG seed (overrides the config)");

  std::string v_experiment;
  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration without running");
  validate_cmd->add_option("--config", config, "JSON configuration file")->required();
  validate_cmd->add_option("--experiment", v_experiment, "Check the blocks this experiment needs")
      ->check(CLI::IsMember(kExperiments));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (*run_cmd) {
    if (*seed_opt) opts.seed = seed;
    return run(experiment, config, opts, std::cout, std::cerr);
  }
  return validate(config, v_experiment, std::cout);
}
