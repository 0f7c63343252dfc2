// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mlmcmc::cli {

void RunConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("config: field '" + field + "' " + why);
  };
  if (!(alpha0 > 0.0)) fail("alpha0", "must be > 0");
  if (!(kappa0 > 0.0)) fail("kappa0", "must be > 0");
  if (!(lambda > 0.0)) fail("lambda", "must be > 0");
  if (m0 < 1) fail("m0", "must be >= 1");
  if (max_level < 1) fail("max_level", "must be >= 1");
  if (!(true_delta > 0.0)) fail("true_delta", "must be > 0");
  if (levels < 3) fail("levels", "must be >= 3 (rate regressions need three points)");
  if (levels + 1 > max_level) fail("levels", "must leave room for the reference level (levels + 1 <= max_level)");
  if (sweeps_per_level < 2) fail("sweeps_per_level", "must be >= 2");
  if (level0_steps < 2) fail("level0_steps", "must be >= 2");
  if (replicates < 1) fail("replicates", "must be >= 1");
  if (epsilon_grid.empty()) fail("epsilon_grid", "must be non-empty");
  for (double e : epsilon_grid)
    if (!(e > 0.0)) fail("epsilon_grid", "entries must be > 0");
  if (!(epsilon > 0.0)) fail("epsilon", "must be > 0");
  if (burn_in < 0) fail("burn_in", "must be >= 0");
  if (!(c_n > 0.0)) fail("c_n", "must be > 0");
  if (!(c_b > 0.0)) fail("c_b", "must be > 0");
  if (n_min < 1) fail("n_min", "must be >= 1");
  if (!(rate_beta > rate_cost_gamma)) fail("rate_beta", "must exceed rate_cost_gamma");
  if (!(rate_bias_rho > 0.0)) fail("rate_bias_rho", "must be > 0");
  if (!(synthetic_beta_prime > 0.0)) fail("synthetic_beta_prime", "must be > 0");
  if (contraction_pairs < 1) fail("contraction_pairs", "must be >= 1");
  if (decay_states < 1) fail("decay_states", "must be >= 1");
  if (out.empty()) fail("out", "must be non-empty");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("config: invalid JSON in '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");

  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "alpha0") cfg.alpha0 = value.get<double>();
      else if (key == "kappa0") cfg.kappa0 = value.get<double>();
      else if (key == "lambda") cfg.lambda = value.get<double>();
      else if (key == "m0") cfg.m0 = value.get<int>();
      else if (key == "max_level") cfg.max_level = value.get<int>();
      else if (key == "true_delta") cfg.true_delta = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "levels") cfg.levels = value.get<int>();
      else if (key == "sweeps_per_level") cfg.sweeps_per_level = value.get<std::int64_t>();
      else if (key == "level0_steps") cfg.level0_steps = value.get<std::int64_t>();
      else if (key == "replicates") cfg.replicates = value.get<int>();
      else if (key == "epsilon_grid") cfg.epsilon_grid = value.get<std::vector<double>>();
      else if (key == "epsilon") cfg.epsilon = value.get<double>();
      else if (key == "burn_in") cfg.burn_in = value.get<std::int64_t>();
      else if (key == "c_n") cfg.c_n = value.get<double>();
      else if (key == "c_b") cfg.c_b = value.get<double>();
      else if (key == "n_min") cfg.n_min = value.get<std::int64_t>();
      else if (key == "rate_beta") cfg.rate_beta = value.get<double>();
      else if (key == "rate_bias_rho") cfg.rate_bias_rho = value.get<double>();
      else if (key == "rate_cost_gamma") cfg.rate_cost_gamma = value.get<double>();
      else if (key == "synthetic_beta_prime") cfg.synthetic_beta_prime = value.get<double>();
      else if (key == "contraction_pairs") cfg.contraction_pairs = value.get<int>();
      else if (key == "decay_states") cfg.decay_states = value.get<int>();
      else if (key == "threads") cfg.threads = value.get<unsigned>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "data") cfg.data_path = value.get<std::string>();
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config: field '" + key + "' has the wrong type: " + e.what());
    }
  }
}

void apply_overrides(RunConfig& cfg, const FlagOverrides& flags) {
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.epsilon_grid) cfg.epsilon_grid = *flags.epsilon_grid;
  if (flags.epsilon) cfg.epsilon = *flags.epsilon;
  if (flags.replicates) cfg.replicates = *flags.replicates;
  if (flags.levels) cfg.levels = *flags.levels;
  if (flags.out) cfg.out = *flags.out;
  if (flags.threads) cfg.threads = *flags.threads;
  if (flags.data_path) cfg.data_path = *flags.data_path;
}

}  // namespace mlmcmc::cli
