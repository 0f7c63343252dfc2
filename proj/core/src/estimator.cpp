// SPDX-License-Identifier: Apache-2.0
#include "mlmcmc/estimator.hpp"

#include <cmath>
#include <span>
#include <stdexcept>

namespace mlmcmc {

LevelAllocation allocate(double epsilon, RateConstants rates,
                         const std::function<double(int)>& h_of_level, double alloc_constant,
                         double bias_constant, std::int64_t n_min, int max_level) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("allocate: epsilon must be > 0");
  if (!(rates.variance_beta > rates.cost_gamma))
    throw std::invalid_argument("allocate: requires beta > gamma");
  LevelAllocation alloc;
  alloc.epsilon = epsilon;
  alloc.alloc_constant = alloc_constant;
  alloc.bias_constant = bias_constant;
  alloc.n_min = n_min;
  alloc.rates = rates;

  const double bias_budget = epsilon / std::sqrt(2.0);
  int level = 0;
  while (bias_constant * std::pow(h_of_level(level), rates.bias_rho) > bias_budget) {
    ++level;
    if (level > max_level)
      throw std::runtime_error("allocate: bias target needs a level beyond max level " +
                               std::to_string(max_level));
  }
  alloc.max_level_used = level;

  const double exponent = 0.5 * (rates.variance_beta + rates.cost_gamma);
  const double eps_sq_inv = 1.0 / (epsilon * epsilon);
  alloc.samples.resize(static_cast<std::size_t>(level) + 1);
  for (int l = 0; l <= level; ++l) {
    const double raw = alloc_constant * eps_sq_inv * std::pow(h_of_level(l), exponent);
    const std::int64_t n = static_cast<std::int64_t>(std::ceil(raw));
    alloc.samples[static_cast<std::size_t>(l)] = std::max(n_min, n);
  }
  return alloc;
}

namespace {

LevelTermStat run_level0_chain(const MlModel& model, int level, std::int64_t n,
                               std::uint64_t master_seed, std::uint32_t replicate,
                               std::int64_t burn_in) {
  if (burn_in >= n) throw std::invalid_argument("ml_estimate: burn_in leaves no samples");
  const auto kernel = model.kernel(level);
  RngStream stream = derive_stream(master_seed, StreamPurpose::kLevel0,
                                   static_cast<std::uint32_t>(level), replicate);
  StateVector x = model.initial_state(level);
  std::vector<double> phis;
  phis.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    x = kernel->step(x, stream);
    phis.push_back(model.phi(x));
  }
  const MeanWithSe m =
      mean_with_se(std::span<const double>(phis).subspan(static_cast<std::size_t>(burn_in)));
  if (!std::isfinite(m.mean))
    throw std::runtime_error("ml_estimate: non-finite chain mean at level " +
                             std::to_string(level));
  LevelTermStat stat;
  stat.level = level;
  stat.samples = n;
  stat.mean = m.mean;
  stat.se = m.se;
  stat.cost = stream.position();
  return stat;
}

LevelTermStat run_increment_chain(const MlModel& model, int level, std::int64_t n,
                                  std::uint64_t master_seed, std::uint32_t replicate,
                                  std::int64_t burn_in) {
  const auto fine = model.kernel(level);
  const auto coarse = model.kernel(level - 1);
  RngStream stream = derive_stream(master_seed, StreamPurpose::kLevelPair,
                                   static_cast<std::uint32_t>(level), replicate);
  const CoupledRun run =
      coupled_trajectory(*fine, *coarse, model.initial_state(level), n, stream, model.phi);
  const MeanWithSe m = increment_mean(run.increments, static_cast<std::size_t>(burn_in));
  if (!std::isfinite(m.mean))
    throw std::runtime_error("ml_estimate: non-finite increment mean at level " +
                             std::to_string(level));
  LevelTermStat stat;
  stat.level = level;
  stat.samples = n;
  stat.mean = m.mean;
  stat.se = m.se;
  stat.cost = run.cost;
  return stat;
}

void finalize(MlEstimate& est) {
  double value = 0.0;
  double se_sq = 0.0;
  std::uint64_t cost = 0;
  for (const LevelTermStat& s : est.per_level) {
    value += s.mean;
    se_sq += s.se * s.se;
    cost += s.cost;
  }
  est.value = value;
  est.combined_se = std::sqrt(se_sq);
  est.total_cost = cost;
}

}  // namespace

MlEstimate ml_estimate(const MlModel& model, const LevelAllocation& allocation,
                       std::uint64_t master_seed, std::uint32_t replicate, std::int64_t burn_in) {
  if (allocation.samples.size() != static_cast<std::size_t>(allocation.max_level_used) + 1)
    throw std::invalid_argument("ml_estimate: allocation samples do not match level count");
  MlEstimate est;
  est.master_seed = master_seed;
  est.replicate = replicate;
  est.model_id = model.id;
  est.allocation = allocation;
  est.per_level.resize(allocation.samples.size());
  // Levels run on independent streams; results land in per-level slots and
  // are reduced in fixed order.
  est.per_level[0] =
      run_level0_chain(model, 0, allocation.samples[0], master_seed, replicate, burn_in);
  for (int l = 1; l <= allocation.max_level_used; ++l)
    est.per_level[static_cast<std::size_t>(l)] =
        run_increment_chain(model, l, allocation.samples[static_cast<std::size_t>(l)], master_seed,
                            replicate, burn_in);
  finalize(est);
  return est;
}

MlEstimate single_level_estimate(const MlModel& model, int level, std::int64_t n_samples,
                                 std::uint64_t master_seed, std::uint32_t replicate,
                                 std::int64_t burn_in) {
  if (n_samples < 1) throw std::invalid_argument("single_level_estimate: need n_samples >= 1");
  MlEstimate est;
  est.master_seed = master_seed;
  est.replicate = replicate;
  est.model_id = model.id;
  est.allocation.max_level_used = level;
  est.allocation.samples = {n_samples};
  est.per_level.push_back(
      run_level0_chain(model, level, n_samples, master_seed, replicate, burn_in));
  finalize(est);
  return est;
}

}  // namespace mlmcmc
