// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "mlmcmc/coupled.hpp"
#include "mlmcmc/kernel.hpp"
#include "mlmcmc/model.hpp"
#include "mlmcmc/rng.hpp"
#include "mlmcmc/stats.hpp"

namespace mlmcmc {

/// Hierarchical Gaussian model: observations y_j ~ N(u_j, 1/lambda), joint
/// prior kernel exp(-delta/2 * sum_j j^-3 u_j^2) * delta^(alpha0-1) *
/// exp(-delta*kappa0) on (u, delta). Level l keeps the first K_l = m0*2^l
/// coordinates; h_l = 1/K_l.
///
/// Packed state layout is [delta, u_1, ..., u_K]: the common coordinates of
/// adjacent levels form a prefix, which is what the coupled machinery and
/// the zero-padded embeddings assume.
struct HierModelConfig {
  double alpha0 = 1.0;
  double kappa0 = 0.1;
  double lambda = 1000.0;
  int m0 = 8;
  int max_level = 8;
  std::vector<double> data;  // y_1..y_{K(max_level)}

  int truncation(int level) const { return m0 << level; }
  double resolution(int level) const { return 1.0 / truncation(level); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Additionally requires data to cover K(level).
  void require_level(int level) const;
};

struct HierState {
  double delta = 1.0;
  std::vector<double> u;

  StateVector pack() const;
  static HierState unpack(std::span<const double> state);
};

/// Simulated dataset: u_j ~ N(0, (true_delta * j^3)^-1) from a smooth truth,
/// then y_j = u_j + N(0, 1/lambda). Consumes 2*k_max gaussians: first the
/// u block, then the noise block.
std::vector<double> simulate_data(double true_delta, std::size_t k_max, double lambda,
                                  RngStream& stream);

struct ConditionalParams {
  std::vector<double> mean;
  std::vector<double> variance;
};

/// u | y, delta: independent Gaussians with precision delta*j^-3 + lambda.
ConditionalParams u_conditional(const HierModelConfig& cfg, int level, double delta);

/// Gamma rate of delta | y, u: kappa0 + 1/2 * sum_{i<=K_l} i^-3 u_i^2.
double delta_conditional_rate(const HierModelConfig& cfg, int level, std::span<const double> u);

/// Mean of the first m0 u-coordinates; depends only on coordinates shared
/// by every level.
double hier_phi(const HierModelConfig& cfg, std::span<const double> state);

/// Deterministic-scan Gibbs sweep at one level as an iterated map:
/// u-block from its full conditional (one gaussian per coordinate, consumed
/// in index order), then delta = W / kappa with a single shared
/// W ~ Gamma(alpha0, 1).
class HierGibbsKernel final : public IteratedMapKernel {
 public:
  HierGibbsKernel(std::shared_ptr<const HierModelConfig> cfg, int level);

  int level() const override { return level_; }
  std::size_t state_dim() const override { return static_cast<std::size_t>(k_) + 1; }
  double resolution() const override { return h_; }
  const InnovationLayout& innovation_layout() const override { return layout_; }
  using IteratedMapKernel::apply;
  StateVector apply(const StateVector& x, RecordCursor& cursor) const override;

 private:
  std::shared_ptr<const HierModelConfig> cfg_;
  int level_;
  int k_;
  double h_;
  std::vector<double> inv_j3_;  // j^-3, j = 1..K
  InnovationLayout layout_;
};

/// Coupled sweep of levels (l, l-1) sharing V_{1:K_l} and one W.
CoupledState hier_coupled_sweep(const std::shared_ptr<const HierModelConfig>& cfg, int level,
                                const CoupledState& s, RngStream& stream);

/// log p(delta | y_{1:K_l}) up to an additive constant. Derived from the
/// unnormalized joint prior, so it is exactly the invariant marginal of the
/// Gibbs sweep:
///   (alpha0-1) log d - d*kappa0
///     + sum_j [ -1/2 log(1 + d/(lambda j^3)) - 1/2 y_j^2 * lambda d/(lambda j^3 + d) ].
double log_delta_marginal(const HierModelConfig& cfg, int level, double delta);

/// E[phi | y_{1:K_l}, delta] = (1/m0) sum_{j<=m0} lambda j^3 y_j / (delta + lambda j^3).
double hier_phi_given_delta(const HierModelConfig& cfg, double delta);

/// E[phi | y_{1:K_l}] by adaptive log-domain quadrature over delta,
/// relative tolerance 1e-8. Ground truth for the experiments.
double posterior_oracle(const HierModelConfig& cfg, int level);

/// Exact posterior sampler: delta by inverse CDF on a dense grid of the
/// quadrature marginal, then u | delta, y componentwise Gaussian.
class HierPosteriorSampler {
 public:
  HierPosteriorSampler(std::shared_ptr<const HierModelConfig> cfg, int level,
                       std::size_t grid_points = 16384);

  HierState sample(RngStream& stream) const;
  double sample_delta(RngStream& stream) const;

 private:
  std::shared_ptr<const HierModelConfig> cfg_;
  int level_;
  std::unique_ptr<GridInverseCdf> delta_icdf_;
};

/// Bundles the model for the estimator and diagnostics.
MlModel hier_ml_model(std::shared_ptr<const HierModelConfig> cfg);

/// Stable identifier over parameters and data (FNV-1a over data bytes).
std::string hier_model_id(const HierModelConfig& cfg);

}  // namespace mlmcmc
