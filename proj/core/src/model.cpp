// SPDX-License-Identifier: Apache-2.0
#include "mlmcmc/model.hpp"

#include <cmath>

namespace mlmcmc {

MlModel synthetic_ml_model(double rate_beta_prime, int max_level) {
  MlModel model;
  model.id = "synthetic_mh(rate_beta_prime=" + std::to_string(rate_beta_prime) + ")";
  model.max_level = max_level;
  model.resolution = [](int level) { return std::pow(2.0, -(level + 1)); };
  model.kernel = [rate_beta_prime](int level) -> std::shared_ptr<const IteratedMapKernel> {
    return synthetic_target(level, rate_beta_prime).kernel;
  };
  model.phi = [](std::span<const double> state) { return state[0]; };
  model.initial_state = [](int) { return StateVector{0.0}; };
  model.state_box = [](int) { return std::vector<std::pair<double, double>>{{-3.0, 3.0}}; };
  return model;
}

}  // namespace mlmcmc
