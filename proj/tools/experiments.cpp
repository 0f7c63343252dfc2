// SPDX-License-Identifier: Apache-2.0
#include "experiments.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mlmcmc/diagnostics.hpp"
#include "mlmcmc/estimator.hpp"
#include "mlmcmc/version.hpp"

namespace mlmcmc::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed for '" + path_.string() + "'");
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

fs::path ensure_out_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() +
                                   "': " + ec.message());
  return dir;
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  j["alpha0"] = cfg.alpha0;
  j["kappa0"] = cfg.kappa0;
  j["lambda"] = cfg.lambda;
  j["m0"] = cfg.m0;
  j["max_level"] = cfg.max_level;
  j["true_delta"] = cfg.true_delta;
  j["seed"] = cfg.seed;
  j["levels"] = cfg.levels;
  j["sweeps_per_level"] = cfg.sweeps_per_level;
  j["level0_steps"] = cfg.level0_steps;
  j["replicates"] = cfg.replicates;
  j["epsilon_grid"] = cfg.epsilon_grid;
  j["epsilon"] = cfg.epsilon;
  j["burn_in"] = cfg.burn_in;
  j["c_n"] = cfg.c_n;
  j["c_b"] = cfg.c_b;
  j["n_min"] = cfg.n_min;
  j["rate_beta"] = cfg.rate_beta;
  j["rate_bias_rho"] = cfg.rate_bias_rho;
  j["rate_cost_gamma"] = cfg.rate_cost_gamma;
  j["synthetic_beta_prime"] = cfg.synthetic_beta_prime;
  j["contraction_pairs"] = cfg.contraction_pairs;
  j["decay_states"] = cfg.decay_states;
  j["threads"] = cfg.threads;
  j["out"] = cfg.out;
  j["data"] = cfg.data_path;
  return j;
}

class ManifestTimer {
 public:
  ManifestTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

fs::path write_manifest(const fs::path& dir, const std::string& experiment, const RunConfig& cfg,
                        const ModelBundle* bundle, ordered_json derived, double wall_time_s,
                        std::uint64_t total_cost) {
  ordered_json j;
  j["experiment"] = experiment;
  j["version"] = kVersionString;
  j["rng_schema"] = kRngSchemaVersion;
  j["config"] = config_json(cfg);
  if (bundle) {
    j["model_id"] = bundle->model.id;
    j["data_source"] = bundle->data_source;
  }
  j["derived"] = std::move(derived);
  j["total_cost"] = total_cost;
  j["wall_time_s"] = wall_time_s;
  const fs::path path = dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  out.close();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  return path;
}

std::vector<double> load_data_csv(const std::string& path, std::size_t needed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("data file '" + path + "' does not exist or is unreadable");
  std::string line;
  if (!std::getline(in, line) || line.rfind("index,y", 0) != 0)
    throw std::runtime_error("data file '" + path + "': expected 'index,y' header");
  std::vector<double> y;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("data file '" + path + "': malformed row '" + line + "'");
    y.push_back(std::stod(line.substr(comma + 1)));
  }
  if (y.size() < needed)
    throw std::runtime_error("data file '" + path + "' has " + std::to_string(y.size()) +
                             " rows, need " + std::to_string(needed));
  return y;
}

}  // namespace

ModelBundle make_model(const RunConfig& cfg) {
  cfg.validate();
  auto model_cfg = std::make_shared<HierModelConfig>();
  model_cfg->alpha0 = cfg.alpha0;
  model_cfg->kappa0 = cfg.kappa0;
  model_cfg->lambda = cfg.lambda;
  model_cfg->m0 = cfg.m0;
  model_cfg->max_level = cfg.max_level;
  const std::size_t k_max = static_cast<std::size_t>(model_cfg->truncation(cfg.max_level));
  ModelBundle bundle;
  if (!cfg.data_path.empty()) {
    model_cfg->data = load_data_csv(cfg.data_path, k_max);
    bundle.data_source = cfg.data_path;
  } else {
    RngStream stream = derive_stream(cfg.seed, StreamPurpose::kReplicateRoot, 0, 0);
    model_cfg->data = simulate_data(cfg.true_delta, k_max, cfg.lambda, stream);
    bundle.data_source = "generated(seed=" + std::to_string(cfg.seed) +
                         ",true_delta=" + fmt17(cfg.true_delta) + ")";
  }
  model_cfg->validate();
  bundle.config = model_cfg;
  bundle.model = hier_ml_model(model_cfg);
  return bundle;
}

std::filesystem::path run_simulate_data(const RunConfig& cfg) {
  const ManifestTimer timer;
  const fs::path dir = ensure_out_dir(cfg);
  const ModelBundle bundle = make_model(cfg);
  CsvWriter csv(dir / "data.csv");
  csv.row({"index", "y"});
  for (std::size_t j = 0; j < bundle.config->data.size(); ++j)
    csv.row({std::to_string(j + 1), fmt17(bundle.config->data[j])});
  csv.close();
  ordered_json derived;
  derived["k_max"] = bundle.config->data.size();
  return write_manifest(dir, "simulate-data", cfg, &bundle, std::move(derived), timer.seconds(),
                        0);
}

std::filesystem::path run_rates(const RunConfig& cfg) {
  const ManifestTimer timer;
  const fs::path dir = ensure_out_dir(cfg);
  const ModelBundle bundle = make_model(cfg);
  const auto oracle = [&](int level) { return posterior_oracle(*bundle.config, level); };
  const RateReport report =
      estimate_rates(bundle.model, cfg.levels, cfg.sweeps_per_level, cfg.level0_steps,
                     cfg.levels + 1, cfg.seed, oracle, cfg.burn_in);

  CsvWriter csv(dir / "rates.csv");
  csv.row({"level", "h_l", "var", "var_se", "bias", "bias_se"});
  for (std::size_t i = 0; i < report.levels.size(); ++i)
    csv.row({std::to_string(report.levels[i]), fmt17(report.resolution[i]),
             fmt17(report.variance[i]), fmt17(report.variance_se[i]), fmt17(report.bias[i]),
             fmt17(report.bias_se[i])});
  csv.close();

  ordered_json derived;
  derived["variance_slope_beta_hat"] = report.variance_slope;
  derived["variance_r2"] = report.variance_r2;
  derived["bias_slope_rho_hat"] = report.bias_slope;
  derived["bias_r2"] = report.bias_r2;
  derived["reference_level"] = report.reference_level;
  derived["reference_value"] = report.reference_value;
  derived["reference_se"] = report.reference_se;
  derived["oracle_reference"] = *report.oracle_reference;
  derived["reference_minus_oracle"] = report.reference_value - *report.oracle_reference;
  derived["increment_mean"] = report.increment_mean;
  derived["increment_se"] = report.increment_se;
  return write_manifest(dir, "rates", cfg, &bundle, std::move(derived), timer.seconds(),
                        report.total_cost);
}

std::filesystem::path run_check_assumptions(const RunConfig& cfg) {
  const ManifestTimer timer;
  const fs::path dir = ensure_out_dir(cfg);
  const ModelBundle bundle = make_model(cfg);

  std::vector<int> levels;
  for (int l = 1; l <= cfg.levels; ++l) levels.push_back(l);
  const ContractionProbe tau = check_contraction(bundle.model, levels, cfg.contraction_pairs,
                                                 cfg.seed);
  const CouplingDecayProbe gibbs_decay =
      check_coupling_decay(bundle.model, cfg.levels, cfg.decay_states, cfg.seed);
  const MlModel synthetic = synthetic_ml_model(cfg.synthetic_beta_prime);
  const CouplingDecayProbe mh_decay =
      check_coupling_decay(synthetic, cfg.levels, cfg.decay_states, cfg.seed);

  CsvWriter csv(dir / "assumptions.csv");
  csv.row({"level", "tau_hat", "a5_dist"});
  for (std::size_t i = 0; i < tau.levels.size(); ++i)
    csv.row({std::to_string(tau.levels[i]), fmt17(tau.tau_hat[i]),
             fmt17(gibbs_decay.mean_sq_dist[i])});
  csv.close();

  ordered_json derived;
  derived["tau_max"] = *std::max_element(tau.tau_hat.begin(), tau.tau_hat.end());
  derived["a5_slope"] = gibbs_decay.slope;
  derived["a5_degenerate"] = gibbs_decay.degenerate;
  derived["synthetic_mh_slope"] = mh_decay.slope;
  derived["synthetic_mh_mean_sq_dist"] = mh_decay.mean_sq_dist;
  derived["synthetic_beta_prime"] = cfg.synthetic_beta_prime;
  return write_manifest(dir, "check-assumptions", cfg, &bundle, std::move(derived),
                        timer.seconds(), 0);
}

std::filesystem::path run_mse_sweep(const RunConfig& cfg) {
  const ManifestTimer timer;
  const fs::path dir = ensure_out_dir(cfg);
  const ModelBundle bundle = make_model(cfg);
  MseSweepOptions options;
  options.rates = RateConstants{cfg.rate_beta, cfg.rate_bias_rho, cfg.rate_cost_gamma};
  options.alloc_constant = cfg.c_n;
  options.bias_constant = cfg.c_b;
  options.n_min = cfg.n_min;
  options.threads = cfg.threads;
  options.burn_in = cfg.burn_in;
  const auto oracle = [&](int level) { return posterior_oracle(*bundle.config, level); };
  const MseCostReport report = mse_cost_sweep(bundle.model, oracle, cfg.epsilon_grid,
                                              cfg.replicates, cfg.seed, options);

  CsvWriter csv(dir / "mse_cost.csv");
  csv.row({"epsilon", "method", "mse", "cost", "replicates"});
  for (const MseCostRow& row : report.rows)
    csv.row({fmt17(row.epsilon), row.method, fmt17(row.mse), fmt17(row.mean_cost),
             std::to_string(row.replicates)});
  csv.close();

  std::uint64_t total_cost = 0;
  for (const MseCostRow& row : report.rows)
    total_cost += static_cast<std::uint64_t>(row.mean_cost * row.replicates);
  ordered_json derived;
  derived["ml_cost_slope"] = report.ml_cost_slope;
  derived["single_cost_slope"] = report.single_cost_slope;
  derived["slope_margin"] =
      std::abs(report.single_cost_slope) - std::abs(report.ml_cost_slope);
  derived["oracle_values"] = report.oracle_values;
  ordered_json allocs = ordered_json::array();
  for (double eps : cfg.epsilon_grid) {
    const LevelAllocation a =
        allocate(eps, options.rates, bundle.model.resolution, cfg.c_n, cfg.c_b, cfg.n_min,
                 cfg.max_level);
    ordered_json ja;
    ja["epsilon"] = eps;
    ja["L"] = a.max_level_used;
    ja["N"] = a.samples;
    allocs.push_back(std::move(ja));
  }
  derived["allocations"] = std::move(allocs);
  return write_manifest(dir, "mse-sweep", cfg, &bundle, std::move(derived), timer.seconds(),
                        total_cost);
}

std::filesystem::path run_estimate(const RunConfig& cfg) {
  const ManifestTimer timer;
  const fs::path dir = ensure_out_dir(cfg);
  const ModelBundle bundle = make_model(cfg);
  const RateConstants rates{cfg.rate_beta, cfg.rate_bias_rho, cfg.rate_cost_gamma};
  const LevelAllocation alloc = allocate(cfg.epsilon, rates, bundle.model.resolution, cfg.c_n,
                                         cfg.c_b, cfg.n_min, cfg.max_level);
  const MlEstimate est = ml_estimate(bundle.model, alloc, cfg.seed, 0, cfg.burn_in);
  const double oracle = posterior_oracle(*bundle.config, alloc.max_level_used);

  CsvWriter csv(dir / "estimate.csv");
  csv.row({"level", "samples", "mean", "se", "cost"});
  for (const LevelTermStat& s : est.per_level)
    csv.row({std::to_string(s.level), std::to_string(s.samples), fmt17(s.mean), fmt17(s.se),
             std::to_string(s.cost)});
  csv.close();

  ordered_json derived;
  derived["value"] = est.value;
  derived["combined_se"] = est.combined_se;
  derived["L"] = alloc.max_level_used;
  derived["N"] = alloc.samples;
  derived["oracle_at_L"] = oracle;
  derived["value_minus_oracle"] = est.value - oracle;
  return write_manifest(dir, "estimate", cfg, &bundle, std::move(derived), timer.seconds(),
                        est.total_cost);
}

}  // namespace mlmcmc::cli
