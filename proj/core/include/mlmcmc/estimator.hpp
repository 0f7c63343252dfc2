// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mlmcmc/coupled.hpp"
#include "mlmcmc/model.hpp"

namespace mlmcmc {

struct RateConstants {
  double variance_beta = 4.0;  // Var[increment] = O(h^beta)
  double bias_rho = 2.0;       // |pi_l(phi) - pi(phi)| = O(h^rho)
  double cost_gamma = 1.0;     // per-sample cost = O(h^-gamma)
};

struct LevelAllocation {
  int max_level_used = 0;             // L
  std::vector<std::int64_t> samples;  // N_0..N_L
  double epsilon = 0.0;
  double alloc_constant = 1.0;  // C_N
  double bias_constant = 1.0;   // C_B
  std::int64_t n_min = 2;
  RateConstants rates;
};

/// epsilon-driven planner: L is the smallest level with
/// C_B * h_L^rho <= epsilon / sqrt(2) (bias gets half of the MSE budget) and
/// N_l = max(N_min, ceil(C_N * epsilon^-2 * h_l^((beta+gamma)/2))).
/// Throws when L would exceed max_level, naming the bound.
LevelAllocation allocate(double epsilon, RateConstants rates,
                         const std::function<double(int)>& h_of_level, double alloc_constant,
                         double bias_constant, std::int64_t n_min, int max_level);

struct LevelTermStat {
  int level = 0;
  std::int64_t samples = 0;
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t cost = 0;
};

struct MlEstimate {
  double value = 0.0;
  std::vector<LevelTermStat> per_level;
  std::uint64_t total_cost = 0;
  double combined_se = 0.0;  // sqrt(sum of per-level SE^2)
  std::uint64_t master_seed = 0;
  std::uint32_t replicate = 0;
  std::string model_id;
  LevelAllocation allocation;
};

/// Telescoping estimate: a single level-0 chain plus one independent coupled
/// chain per level 1..L, all streams derived from (master_seed, replicate).
/// Bit-reproducible for fixed inputs; levels use independent streams so the
/// simulation order of levels cannot change the result.
MlEstimate ml_estimate(const MlModel& model, const LevelAllocation& allocation,
                       std::uint64_t master_seed, std::uint32_t replicate = 0,
                       std::int64_t burn_in = 0);

/// Plain MCMC baseline at one level.
MlEstimate single_level_estimate(const MlModel& model, int level, std::int64_t n_samples,
                                 std::uint64_t master_seed, std::uint32_t replicate = 0,
                                 std::int64_t burn_in = 0);

}  // namespace mlmcmc
