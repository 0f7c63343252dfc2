// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mlmcmc/kernel.hpp"
#include "mlmcmc/stats.hpp"

namespace mlmcmc {

/// Paired chain states at adjacent levels. For nested state spaces the
/// common coordinates are a prefix, so the coarse state starts as the
/// prefix projection of the fine one.
struct CoupledState {
  StateVector fine;
  StateVector coarse;
  std::uint64_t step_index = 0;
};

struct IncrementSample {
  double value = 0.0;
  std::uint64_t step_index = 0;
};

/// True when the coarse kernel can consume a prefix of every record the
/// fine kernel draws: same kind sequence, vector counts no larger, scalar
/// kinds (shared draws) with identical parameters.
bool innovations_compatible(const InnovationLayout& fine, const InnovationLayout& coarse);

CoupledState make_coupled_initial(const IteratedMapKernel& fine, const IteratedMapKernel& coarse,
                                  const StateVector& x0);

/// One step of the coupled pair: the innovation record is drawn once, sized
/// for the fine kernel; the fine kernel consumes all of it and the coarse
/// kernel reads the common prefix (vector kinds) and the shared scalars.
/// The fine chain is bit-identical to a solo run of the fine kernel on the
/// same stream.
CoupledState coupled_step(const IteratedMapKernel& fine, const IteratedMapKernel& coarse,
                          const CoupledState& s, RngStream& stream);

struct CoupledRun {
  std::vector<IncrementSample> increments;
  std::uint64_t cost = 0;  // stream draws + coarse prefix reads; shared scalars counted once
  CoupledState final_state;
};

/// Runs n_steps coupled transitions from x0 (fine state; coarse starts at
/// its prefix projection) and records phi(fine) - phi(coarse) per step.
CoupledRun coupled_trajectory(const IteratedMapKernel& fine, const IteratedMapKernel& coarse,
                              const StateVector& x0, std::int64_t n_steps, RngStream& stream,
                              const PhiFunction& phi);

/// Mean of post-burn-in increments with a 32-batch batch-means standard
/// error. Throws std::invalid_argument when no samples survive the burn-in.
MeanWithSe increment_mean(std::span<const IncrementSample> samples, std::size_t burn_in = 0);

}  // namespace mlmcmc
