// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "config.hpp"
#include "mlmcmc/hier_model.hpp"

namespace mlmcmc::cli {

/// Model handle shared by all experiments: config plus the level family.
struct ModelBundle {
  std::shared_ptr<const HierModelConfig> config;
  MlModel model;
  std::string data_source;  // "generated(seed=...)" or the reused path
};

/// Builds the model, generating the dataset from the seed or loading the
/// data.csv named by cfg.data_path (which must exist in reuse mode).
ModelBundle make_model(const RunConfig& cfg);

/// Each runner writes its CSVs plus manifest.json under cfg.out and returns
/// the manifest path. I/O failures and module errors propagate as
/// exceptions carrying the offending path.
std::filesystem::path run_simulate_data(const RunConfig& cfg);
std::filesystem::path run_rates(const RunConfig& cfg);
std::filesystem::path run_check_assumptions(const RunConfig& cfg);
std::filesystem::path run_mse_sweep(const RunConfig& cfg);
std::filesystem::path run_estimate(const RunConfig& cfg);

}  // namespace mlmcmc::cli
