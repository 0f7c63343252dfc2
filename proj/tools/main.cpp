// SPDX-License-Identifier: Apache-2.0
//
// Experiment runner for the coupled multilevel MCMC library.
//
//   mlmcmc simulate-data --seed 1 --out out/data
//   mlmcmc rates --out out/rates
//   mlmcmc check-assumptions --out out/assumptions
//   mlmcmc mse-sweep --epsilon-grid 0.04,0.02,0.01,0.005 --replicates 50 --out out/mse
//   mlmcmc estimate --out out/estimate
//
// Configuration: flat JSON via --config, overridden by flags (flags win).

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "mlmcmc/version.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  mlmcmc::cli::FlagOverrides overrides;
  std::string epsilon_grid_arg;
};

void attach_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Flat JSON config file");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&flags](std::uint64_t v) { flags.overrides.seed = v; }, "Master seed (u64)");
  cmd->add_option_function<std::string>(
      "--epsilon-grid",
      [&flags](const std::string& v) { flags.epsilon_grid_arg = v; },
      "Comma-separated epsilon grid, e.g. 0.04,0.02,0.01,0.005");
  cmd->add_option_function<double>(
      "--epsilon", [&flags](double v) { flags.overrides.epsilon = v; }, "Target accuracy");
  cmd->add_option_function<int>(
      "--replicates", [&flags](int v) { flags.overrides.replicates = v; },
      "Independent replicates per grid point");
  cmd->add_option_function<int>(
      "--levels", [&flags](int v) { flags.overrides.levels = v; },
      "Deepest studied level for rates/assumptions");
  cmd->add_option_function<std::string>(
      "--out", [&flags](const std::string& v) { flags.overrides.out = v; }, "Output directory");
  cmd->add_option_function<unsigned>(
      "--threads", [&flags](unsigned v) { flags.overrides.threads = v; },
      "Worker threads (0 = available parallelism)");
  cmd->add_option_function<std::string>(
      "--data", [&flags](const std::string& v) { flags.overrides.data_path = v; },
      "Reuse an existing data.csv instead of generating from the seed");
}

mlmcmc::cli::RunConfig resolve_config(CommonFlags& flags) {
  mlmcmc::cli::RunConfig cfg;
  if (!flags.config_path.empty()) mlmcmc::cli::load_config_file(cfg, flags.config_path);
  if (!flags.epsilon_grid_arg.empty()) {
    std::vector<double> grid;
    std::string item;
    std::stringstream ss(flags.epsilon_grid_arg);
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) grid.push_back(std::stod(item));
    }
    flags.overrides.epsilon_grid = grid;
  }
  mlmcmc::cli::apply_overrides(cfg, flags.overrides);
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled multilevel MCMC experiments"};
  app.set_version_flag("--version", std::string(mlmcmc::kVersionString));
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* simulate = app.add_subcommand("simulate-data", "Generate and persist the dataset");
  CLI::App* rates = app.add_subcommand("rates", "Variance/bias rate regressions");
  CLI::App* assumptions =
      app.add_subcommand("check-assumptions", "Contraction and coupling-decay probes");
  CLI::App* mse = app.add_subcommand("mse-sweep", "Cost-vs-MSE comparison against single level");
  CLI::App* estimate = app.add_subcommand("estimate", "One multilevel estimate at --epsilon");
  for (CLI::App* cmd : {simulate, rates, assumptions, mse, estimate})
    attach_common_flags(cmd, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    const mlmcmc::cli::RunConfig cfg = resolve_config(flags);
    std::filesystem::path manifest;
    if (simulate->parsed()) manifest = mlmcmc::cli::run_simulate_data(cfg);
    else if (rates->parsed()) manifest = mlmcmc::cli::run_rates(cfg);
    else if (assumptions->parsed()) manifest = mlmcmc::cli::run_check_assumptions(cfg);
    else if (mse->parsed()) manifest = mlmcmc::cli::run_mse_sweep(cfg);
    else if (estimate->parsed()) manifest = mlmcmc::cli::run_estimate(cfg);
    std::printf("wrote %s\n", manifest.string().c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
