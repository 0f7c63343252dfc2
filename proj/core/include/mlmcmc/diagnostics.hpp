// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlmcmc/estimator.hpp"
#include "mlmcmc/model.hpp"

namespace mlmcmc {

/// Empirical variance/bias rate regression reproducing the Fig. 1 style
/// experiment. Per-level variance is the sample variance of coupled
/// increments. Per-level bias is measured through the telescoping ladder:
/// bias_l = |sum_{q=l+1..reference_level} mean-increment_q|, i.e. the levels
/// are compared against the telescoped estimate at reference_level (the
/// estimator run one level past the most precise level studied), so the
/// level-0 chain noise cancels and the tiny per-level biases stay resolvable
/// at increment precision.
struct RateReport {
  std::vector<int> levels;
  std::vector<double> resolution;
  std::vector<double> variance;
  std::vector<double> variance_se;
  std::vector<double> bias;
  std::vector<double> bias_se;
  std::vector<double> increment_mean;  // per studied level
  std::vector<double> increment_se;
  double variance_slope = 0.0;  // beta-hat
  double variance_r2 = 0.0;
  double bias_slope = 0.0;  // bias-rho-hat
  double bias_r2 = 0.0;
  int reference_level = 0;
  double reference_value = 0.0;  // telescoped estimate at reference_level
  double reference_se = 0.0;
  std::optional<double> oracle_reference;  // quadrature cross-check when available
  std::int64_t sweeps_per_level = 0;
  std::int64_t level0_steps = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t total_cost = 0;
  std::string model_id;
};

/// Runs coupled chains at levels 1..reference_level plus a level-0 chain.
/// Throws a degenerate-coupling error when a per-level increment variance
/// is exactly zero.
RateReport estimate_rates(const MlModel& model, int l_max, std::int64_t n_per_level,
                          std::int64_t level0_steps, int reference_level, std::uint64_t master_seed,
                          const std::function<double(int)>& oracle = {}, std::int64_t burn_in = 0);

/// Randomized lower bound on the contraction factor of the level-l map:
/// max over sampled state pairs of the innovation-averaged squared-distance
/// ratio. A value above 1 refutes contraction; below 1 is supporting
/// evidence only.
struct ContractionProbe {
  std::vector<int> levels;
  std::vector<double> tau_hat;
  int n_pairs = 0;
  int draws_per_pair = 64;
  std::uint64_t master_seed = 0;
  std::string model_id;
};

ContractionProbe check_contraction(const MlModel& model, const std::vector<int>& levels,
                                   int n_pairs, std::uint64_t master_seed);

/// Map-closeness decay across adjacent levels: states are sampled from the
/// coarse-level box and embedded by zero-padding; the squared distance is
/// restricted to the common (prefix) coordinates. Reports the log-log slope
/// against h_l, or degenerate when every distance is zero.
struct CouplingDecayProbe {
  std::vector<int> levels;
  std::vector<double> mean_sq_dist;
  double slope = 0.0;
  bool degenerate = false;
  int n_states = 0;
  int draws_per_state = 64;
  std::uint64_t master_seed = 0;
  std::string model_id;
};

CouplingDecayProbe check_coupling_decay(const MlModel& model, int l_max, int n_states,
                                        std::uint64_t master_seed);

struct MseCostRow {
  double epsilon = 0.0;
  std::string method;  // "ml" or "single_level"
  double mse = 0.0;
  double mean_cost = 0.0;
  int replicates = 0;
};

struct MseCostReport {
  std::vector<MseCostRow> rows;
  double ml_cost_slope = 0.0;      // d log(cost) / d log(mse)
  double single_cost_slope = 0.0;
  std::vector<double> oracle_values;  // per epsilon, at the allocation's level
  std::vector<double> epsilon_grid;
  int replicates = 0;
  std::uint64_t master_seed = 0;
  std::string model_id;
};

struct MseSweepOptions {
  RateConstants rates;
  double alloc_constant = 1.0;
  double bias_constant = 1.0;
  std::int64_t n_min = 2;
  unsigned threads = 0;
  std::int64_t burn_in = 0;
  bool force_shared_replicate_streams = false;  // all replicates reuse replicate 0
};

/// For each epsilon: R independent ML estimates and R single-level baselines
/// (level L(epsilon), N = ceil(C_N * epsilon^-2)); MSE against the supplied
/// per-level oracle; mean scalar-draw costs; cost-vs-MSE slopes per method.
MseCostReport mse_cost_sweep(const MlModel& model, const std::function<double(int)>& oracle,
                             const std::vector<double>& epsilon_grid, int replicates,
                             std::uint64_t master_seed, const MseSweepOptions& options = {});

}  // namespace mlmcmc
