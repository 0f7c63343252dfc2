// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlmcmc/rng.hpp"

namespace mlmcmc {

using StateVector = std::vector<double>;
using PhiFunction = std::function<double(std::span<const double>)>;

enum class InnovationKind { kUniform, kGaussianVector, kGamma };

struct InnovationSlot {
  InnovationKind kind = InnovationKind::kUniform;
  std::size_t count = 1;       // vector length for kGaussianVector
  double gamma_shape = 0.0;    // kGamma only
};

using InnovationLayout = std::vector<InnovationSlot>;

/// Realized innovations for one transition, stored per kind in draw order.
/// Scalar kinds (uniform, gamma) are drawn once and shared between coupled
/// kernels; gaussian vectors are consumed as prefixes by the coarse kernel.
struct InnovationRecord {
  std::vector<double> gaussians;
  std::vector<double> uniforms;
  std::vector<double> gammas;
};

/// Read cursor over an InnovationRecord. Tracks how many scalars of each
/// kind a kernel consumed, which is what the coupled cost accounting needs.
class RecordCursor {
 public:
  explicit RecordCursor(const InnovationRecord& rec) : rec_(&rec) {}

  std::span<const double> gaussians(std::size_t n);
  double uniform();
  double gamma();

  std::size_t gaussians_read() const { return gaussian_pos_; }
  std::size_t uniforms_read() const { return uniform_pos_; }
  std::size_t gammas_read() const { return gamma_pos_; }

 private:
  const InnovationRecord* rec_;
  std::size_t gaussian_pos_ = 0;
  std::size_t uniform_pos_ = 0;
  std::size_t gamma_pos_ = 0;
};

/// A Markov transition written as a deterministic map of (state, innovations).
/// Implementations are immutable after construction and safe to share across
/// threads; all per-chain mutable state lives in the caller.
class IteratedMapKernel {
 public:
  virtual ~IteratedMapKernel() = default;

  virtual int level() const = 0;
  virtual std::size_t state_dim() const = 0;
  /// Approximation parameter h in (0,1), strictly decreasing in level.
  virtual double resolution() const = 0;
  virtual const InnovationLayout& innovation_layout() const = 0;

  /// Deterministic transition given realized innovations.
  virtual StateVector apply(const StateVector& x, RecordCursor& cursor) const = 0;

  StateVector apply(const StateVector& x, const InnovationRecord& rec) const;

  /// Draws one innovation record following the declared layout, in layout
  /// order. Consumption from the stream matches what a solo step consumes.
  InnovationRecord draw_innovations(RngStream& stream) const;

  StateVector step(const StateVector& x, RngStream& stream) const;
};

/// Unnormalized log-density with box support.
struct TargetSpec {
  std::function<double(std::span<const double>)> log_density;
  std::vector<std::pair<double, double>> support;  // per-coordinate [lo, hi]

  bool in_support(std::span<const double> x) const;
};

/// Random-walk Metropolis-Hastings map: propose y = x + scale * g with
/// g ~ N(0, I), accept when the shared uniform falls below the clamped
/// density ratio. Proposals outside the support box are rejected.
class MhKernel final : public IteratedMapKernel {
 public:
  MhKernel(TargetSpec target, double proposal_scale, int level, double resolution,
           std::size_t dim);

  int level() const override { return level_; }
  std::size_t state_dim() const override { return dim_; }
  double resolution() const override { return resolution_; }
  const InnovationLayout& innovation_layout() const override { return layout_; }
  using IteratedMapKernel::apply;
  StateVector apply(const StateVector& x, RecordCursor& cursor) const override;

  const TargetSpec& target() const { return target_; }
  double proposal_scale() const { return proposal_scale_; }

 private:
  TargetSpec target_;
  double proposal_scale_;
  int level_;
  double resolution_;
  std::size_t dim_;
  InnovationLayout layout_;
};

/// One block update of a deterministic-scan Gibbs sweep: writes the block
/// given the current full state (already-updated earlier blocks, old later
/// blocks) and the innovations it declared in `needs`.
struct GibbsBlock {
  std::size_t offset = 0;
  std::size_t size = 0;
  InnovationLayout needs;
  std::function<void(std::span<double> block, std::span<const double> state, RecordCursor&)>
      update;
};

/// Deterministic-scan Gibbs sweep over contiguous blocks in fixed ascending
/// order. Blocks must partition [0, state_dim).
class GibbsSweepKernel final : public IteratedMapKernel {
 public:
  GibbsSweepKernel(int level, double resolution, std::size_t dim, std::vector<GibbsBlock> blocks);

  int level() const override { return level_; }
  std::size_t state_dim() const override { return dim_; }
  double resolution() const override { return resolution_; }
  const InnovationLayout& innovation_layout() const override { return layout_; }
  using IteratedMapKernel::apply;
  StateVector apply(const StateVector& x, RecordCursor& cursor) const override;

 private:
  int level_;
  double resolution_;
  std::size_t dim_;
  std::vector<GibbsBlock> blocks_;
  InnovationLayout layout_;
};

struct Trajectory {
  std::vector<StateVector> states;  // x_1 .. x_n (x_0 excluded)
  std::uint64_t cost = 0;           // scalar draws consumed
};

Trajectory iterate(const IteratedMapKernel& kernel, const StateVector& x0, std::int64_t n_steps,
                   RngStream& stream);

/// Synthetic compact target family: pi_l(x) ~ exp(-x^2 / (2 (1 + h_l^beta')))
/// on [-3, 3] with h_l = 2^{-l-1}, driven by a unit-scale random-walk MH map.
/// The level-l density approaches the truncated standard normal, and the
/// rejection branch degrades the cross-level coupling at rate ~h^beta'.
struct SyntheticTarget {
  TargetSpec target;
  std::shared_ptr<const MhKernel> kernel;
  double variance = 1.0;    // 1 + h^beta'
  double resolution = 0.0;  // h_l
};

SyntheticTarget synthetic_target(int level, double rate_beta_prime);

}  // namespace mlmcmc
