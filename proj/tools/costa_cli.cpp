#include "costa/harness/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int workers = 0;
  long seed_override = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment configuration file")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory override");
  cmd->add_option("--workers", args.workers, "parallel sweep workers");
  cmd->add_option("--seed-override", args.seed_override, "override the run seed");
}

costa::harness::ExperimentConfig load(const CommonArgs& args) {
  auto config = costa::harness::load_config(args.config_path);
  if (!args.out_dir.empty()) config.out_dir = args.out_dir;
  if (args.seed_override >= 0)
    config.run.seed = static_cast<std::uint64_t>(args.seed_override);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained stochastic optimization experiment harness"};
  app.require_subcommand(1);

  CommonArgs run_args, validate_args, sweep_args;
  CLI::App* run_cmd = app.add_subcommand("run", "execute one configured run");
  add_common(run_cmd, run_args);
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "run the surrogate/parameter validator suites");
  add_common(validate_cmd, validate_args);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "multi-seed, multi-T sweep");
  add_common(sweep_cmd, sweep_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return costa::harness::cmd_run(load(run_args));
    if (validate_cmd->parsed()) return costa::harness::cmd_validate(load(validate_args));
    if (sweep_cmd->parsed())
      return costa::harness::cmd_sweep(load(sweep_args), sweep_args.workers);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 2;
  }
  return 2;
}
