// SPDX-License-Identifier: Apache-2.0
#include "mlmcmc/diagnostics.hpp"

#include <cmath>
#include <span>
#include <stdexcept>

#include "mlmcmc/parallel.hpp"

namespace mlmcmc {

RateReport estimate_rates(const MlModel& model, int l_max, std::int64_t n_per_level,
                          std::int64_t level0_steps, int reference_level, std::uint64_t master_seed,
                          const std::function<double(int)>& oracle, std::int64_t burn_in) {
  if (l_max < 3) throw std::invalid_argument("estimate_rates: need l_max >= 3 for a regression");
  if (n_per_level < 2) throw std::invalid_argument("estimate_rates: need n_per_level >= 2");
  if (burn_in >= n_per_level || burn_in + 2 > n_per_level)
    throw std::invalid_argument("estimate_rates: burn_in leaves too few samples");
  if (reference_level <= 0) reference_level = l_max + 1;
  if (reference_level <= l_max)
    throw std::invalid_argument("estimate_rates: reference level must exceed l_max");

  RateReport report;
  report.model_id = model.id;
  report.master_seed = master_seed;
  report.sweeps_per_level = n_per_level;
  report.level0_steps = level0_steps;
  report.reference_level = reference_level;

  // Coupled increments at every level up to the reference level.
  std::vector<double> inc_mean(static_cast<std::size_t>(reference_level) + 1, 0.0);
  std::vector<double> inc_se(static_cast<std::size_t>(reference_level) + 1, 0.0);
  std::vector<double> inc_var(static_cast<std::size_t>(reference_level) + 1, 0.0);
  std::uint64_t cost = 0;
  for (int l = 1; l <= reference_level; ++l) {
    const auto fine = model.kernel(l);
    const auto coarse = model.kernel(l - 1);
    RngStream stream = derive_stream(master_seed, StreamPurpose::kLevelPair,
                                     static_cast<std::uint32_t>(l), 0);
    const CoupledRun run = coupled_trajectory(*fine, *coarse, model.initial_state(l), n_per_level,
                                              stream, model.phi);
    std::vector<double> values(run.increments.size() - static_cast<std::size_t>(burn_in));
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = run.increments[i + static_cast<std::size_t>(burn_in)].value;
    const MeanWithSe m = mean_with_se(values);
    inc_mean[static_cast<std::size_t>(l)] = m.mean;
    inc_se[static_cast<std::size_t>(l)] = m.se;
    inc_var[static_cast<std::size_t>(l)] = sample_variance(values);
    cost += run.cost;
    if (l <= l_max && inc_var[static_cast<std::size_t>(l)] == 0.0)
      throw std::runtime_error("estimate_rates: degenerate coupling, zero increment variance at level " +
                               std::to_string(l));
  }

  // Level-0 chain for the absolute reference value.
  double level0_mean = 0.0, level0_se = 0.0;
  {
    const auto kernel0 = model.kernel(0);
    RngStream stream = derive_stream(master_seed, StreamPurpose::kLevel0, 0, 0);
    if (burn_in >= level0_steps)
      throw std::invalid_argument("estimate_rates: burn_in leaves no level-0 samples");
    StateVector x = model.initial_state(0);
    std::vector<double> phis;
    phis.reserve(static_cast<std::size_t>(level0_steps));
    for (std::int64_t i = 0; i < level0_steps; ++i) {
      x = kernel0->step(x, stream);
      phis.push_back(model.phi(x));
    }
    const MeanWithSe m =
        mean_with_se(std::span<const double>(phis).subspan(static_cast<std::size_t>(burn_in)));
    level0_mean = m.mean;
    level0_se = m.se;
    cost += stream.position();
  }

  report.total_cost = cost;
  double ref = level0_mean;
  double ref_se_sq = level0_se * level0_se;
  for (int q = 1; q <= reference_level; ++q) {
    ref += inc_mean[static_cast<std::size_t>(q)];
    ref_se_sq += inc_se[static_cast<std::size_t>(q)] * inc_se[static_cast<std::size_t>(q)];
  }
  report.reference_value = ref;
  report.reference_se = std::sqrt(ref_se_sq);
  if (oracle) report.oracle_reference = oracle(reference_level);

  for (int l = 1; l <= l_max; ++l) {
    report.levels.push_back(l);
    report.resolution.push_back(model.resolution(l));
    report.variance.push_back(inc_var[static_cast<std::size_t>(l)]);
    // Gaussian-approximation SE of a sample variance.
    report.variance_se.push_back(
        inc_var[static_cast<std::size_t>(l)] *
        std::sqrt(2.0 / static_cast<double>(n_per_level - burn_in - 1)));
    double tail = 0.0, tail_se_sq = 0.0;
    for (int q = l + 1; q <= reference_level; ++q) {
      tail += inc_mean[static_cast<std::size_t>(q)];
      tail_se_sq += inc_se[static_cast<std::size_t>(q)] * inc_se[static_cast<std::size_t>(q)];
    }
    report.bias.push_back(std::fabs(tail));
    report.bias_se.push_back(std::sqrt(tail_se_sq));
    report.increment_mean.push_back(inc_mean[static_cast<std::size_t>(l)]);
    report.increment_se.push_back(inc_se[static_cast<std::size_t>(l)]);
  }

  const LinearFit var_fit = loglog_fit(report.resolution, report.variance);
  report.variance_slope = var_fit.slope;
  report.variance_r2 = var_fit.r_squared;
  std::vector<double> positive_bias;
  std::vector<double> bias_h;
  for (std::size_t i = 0; i < report.bias.size(); ++i) {
    if (report.bias[i] > 0.0) {
      positive_bias.push_back(report.bias[i]);
      bias_h.push_back(report.resolution[i]);
    }
  }
  if (positive_bias.size() >= 3) {
    const LinearFit bias_fit = loglog_fit(bias_h, positive_bias);
    report.bias_slope = bias_fit.slope;
    report.bias_r2 = bias_fit.r_squared;
  }
  return report;
}

namespace {

StateVector sample_box(const std::vector<std::pair<double, double>>& box, RngStream& stream) {
  StateVector x(box.size());
  for (std::size_t i = 0; i < box.size(); ++i)
    x[i] = box[i].first + (box[i].second - box[i].first) * stream.uniform();
  return x;
}

double sq_dist(std::span<const double> a, std::span<const double> b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

ContractionProbe check_contraction(const MlModel& model, const std::vector<int>& levels,
                                   int n_pairs, std::uint64_t master_seed) {
  if (n_pairs < 1) throw std::invalid_argument("check_contraction: need n_pairs >= 1");
  ContractionProbe probe;
  probe.model_id = model.id;
  probe.master_seed = master_seed;
  probe.n_pairs = n_pairs;
  for (int level : levels) {
    const auto kernel = model.kernel(level);
    const auto box = model.state_box(level);
    RngStream stream = derive_stream(master_seed, StreamPurpose::kReplicateRoot,
                                     static_cast<std::uint32_t>(level), 1);
    double tau = 0.0;
    for (int p = 0; p < n_pairs; ++p) {
      StateVector x = sample_box(box, stream);
      StateVector y = sample_box(box, stream);
      double d0 = sq_dist(x, y, x.size());
      int guard = 0;
      while (d0 == 0.0) {  // coincident pair carries no information
        y = sample_box(box, stream);
        d0 = sq_dist(x, y, x.size());
        if (++guard > 1000)
          throw std::runtime_error("check_contraction: cannot sample distinct states");
      }
      // The pair distance is constant in the innovation, so averaging
      // per-draw ratios equals the ratio of averages and keeps the identity
      // map at exactly 1.
      double acc = 0.0;
      for (int d = 0; d < probe.draws_per_pair; ++d) {
        const InnovationRecord rec = kernel->draw_innovations(stream);
        const StateVector xn = kernel->apply(x, rec);
        const StateVector yn = kernel->apply(y, rec);
        acc += sq_dist(xn, yn, xn.size()) / d0;
      }
      tau = std::max(tau, acc / probe.draws_per_pair);
    }
    probe.levels.push_back(level);
    probe.tau_hat.push_back(tau);
  }
  return probe;
}

CouplingDecayProbe check_coupling_decay(const MlModel& model, int l_max, int n_states,
                                        std::uint64_t master_seed) {
  if (l_max < 3) throw std::invalid_argument("check_coupling_decay: need l_max >= 3");
  if (n_states < 1) throw std::invalid_argument("check_coupling_decay: need n_states >= 1");
  CouplingDecayProbe probe;
  probe.model_id = model.id;
  probe.master_seed = master_seed;
  probe.n_states = n_states;
  std::vector<double> h;
  for (int l = 1; l <= l_max; ++l) {
    const auto fine = model.kernel(l);
    const auto coarse = model.kernel(l - 1);
    const auto box = model.state_box(l - 1);
    RngStream stream = derive_stream(master_seed, StreamPurpose::kReplicateRoot,
                                     static_cast<std::uint32_t>(l), 2);
    const std::size_t common = coarse->state_dim();
    double acc = 0.0;
    for (int s = 0; s < n_states; ++s) {
      const StateVector xc = sample_box(box, stream);
      StateVector xf(fine->state_dim(), 0.0);  // zero-padded embedding
      std::copy(xc.begin(), xc.end(), xf.begin());
      for (int d = 0; d < probe.draws_per_state; ++d) {
        const InnovationRecord rec = fine->draw_innovations(stream);
        const StateVector xn_fine = fine->apply(xf, rec);
        const StateVector xn_coarse = coarse->apply(xc, rec);
        acc += sq_dist(xn_fine, xn_coarse, common);
      }
    }
    probe.levels.push_back(l);
    probe.mean_sq_dist.push_back(acc / (static_cast<double>(n_states) * probe.draws_per_state));
    h.push_back(model.resolution(l));
  }
  // Levels whose probe never saw a split decision carry no slope
  // information; fit the positive subset.
  std::vector<double> pos_h, pos_d;
  for (std::size_t i = 0; i < probe.mean_sq_dist.size(); ++i) {
    if (probe.mean_sq_dist[i] > 0.0) {
      pos_h.push_back(h[i]);
      pos_d.push_back(probe.mean_sq_dist[i]);
    }
  }
  if (pos_d.size() < 3) {
    probe.degenerate = true;
    return probe;
  }
  probe.slope = loglog_fit(pos_h, pos_d).slope;
  return probe;
}

MseCostReport mse_cost_sweep(const MlModel& model, const std::function<double(int)>& oracle,
                             const std::vector<double>& epsilon_grid, int replicates,
                             std::uint64_t master_seed, const MseSweepOptions& options) {
  if (replicates < 10) throw std::invalid_argument("mse_cost_sweep: need replicates >= 10");
  if (epsilon_grid.empty()) throw std::invalid_argument("mse_cost_sweep: empty epsilon grid");
  MseCostReport report;
  report.model_id = model.id;
  report.master_seed = master_seed;
  report.replicates = replicates;
  report.epsilon_grid = epsilon_grid;

  std::vector<double> ml_mse, ml_cost, sl_mse, sl_cost;
  for (double eps : epsilon_grid) {
    const LevelAllocation alloc = allocate(eps, options.rates, model.resolution,
                                           options.alloc_constant, options.bias_constant,
                                           options.n_min, model.max_level);
    const double truth = oracle(alloc.max_level_used);
    report.oracle_values.push_back(truth);

    const std::int64_t n_single = static_cast<std::int64_t>(
        std::ceil(options.alloc_constant / (eps * eps)));

    std::vector<double> ml_err(static_cast<std::size_t>(replicates));
    std::vector<double> ml_costs(static_cast<std::size_t>(replicates));
    std::vector<double> sl_err(static_cast<std::size_t>(replicates));
    std::vector<double> sl_costs(static_cast<std::size_t>(replicates));
    parallel_for(static_cast<std::size_t>(replicates), options.threads, [&](std::size_t r) {
      const std::uint32_t rep =
          options.force_shared_replicate_streams ? 0u : static_cast<std::uint32_t>(r);
      const MlEstimate ml = ml_estimate(model, alloc, master_seed, rep, options.burn_in);
      ml_err[r] = ml.value - truth;
      ml_costs[r] = static_cast<double>(ml.total_cost);
      const MlEstimate sl = single_level_estimate(model, alloc.max_level_used, n_single,
                                                  master_seed, rep, options.burn_in);
      sl_err[r] = sl.value - truth;
      sl_costs[r] = static_cast<double>(sl.total_cost);
    });

    double mse_ml = 0.0, mse_sl = 0.0;
    for (int r = 0; r < replicates; ++r) {
      mse_ml += ml_err[static_cast<std::size_t>(r)] * ml_err[static_cast<std::size_t>(r)];
      mse_sl += sl_err[static_cast<std::size_t>(r)] * sl_err[static_cast<std::size_t>(r)];
    }
    mse_ml /= replicates;
    mse_sl /= replicates;
    const double cost_ml = mean(ml_costs);
    const double cost_sl = mean(sl_costs);

    report.rows.push_back(MseCostRow{eps, "ml", mse_ml, cost_ml, replicates});
    report.rows.push_back(MseCostRow{eps, "single_level", mse_sl, cost_sl, replicates});
    ml_mse.push_back(mse_ml);
    ml_cost.push_back(cost_ml);
    sl_mse.push_back(mse_sl);
    sl_cost.push_back(cost_sl);
  }

  if (epsilon_grid.size() >= 2) {
    report.ml_cost_slope = loglog_fit(ml_mse, ml_cost).slope;
    report.single_cost_slope = loglog_fit(sl_mse, sl_cost).slope;
  }
  return report;
}

}  // namespace mlmcmc
