// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mlmcmc/kernel.hpp"

namespace mlmcmc {

/// A level family ready for multilevel estimation and diagnostics: per-level
/// kernels over nested state spaces (common coordinates first), the quantity
/// of interest, a per-level starting point, and a bounded probe box for the
/// contraction / coupling-decay checkers.
struct MlModel {
  std::string id;
  int max_level = 0;
  std::function<double(int)> resolution;
  std::function<std::shared_ptr<const IteratedMapKernel>(int)> kernel;
  PhiFunction phi;
  std::function<StateVector(int)> initial_state;
  std::function<std::vector<std::pair<double, double>>(int)> state_box;
};

/// Synthetic compact MH family (see synthetic_target); phi is the identity
/// on the single coordinate.
MlModel synthetic_ml_model(double rate_beta_prime, int max_level = 12);

}  // namespace mlmcmc
