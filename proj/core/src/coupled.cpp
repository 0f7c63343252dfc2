// SPDX-License-Identifier: Apache-2.0
#include "mlmcmc/coupled.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmcmc {

bool innovations_compatible(const InnovationLayout& fine, const InnovationLayout& coarse) {
  if (fine.size() != coarse.size()) return false;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (fine[i].kind != coarse[i].kind) return false;
    switch (fine[i].kind) {
      case InnovationKind::kGaussianVector:
        if (coarse[i].count > fine[i].count) return false;
        break;
      case InnovationKind::kUniform:
        if (coarse[i].count != fine[i].count) return false;
        break;
      case InnovationKind::kGamma:
        if (coarse[i].count != fine[i].count || coarse[i].gamma_shape != fine[i].gamma_shape)
          return false;
        break;
    }
  }
  return true;
}

CoupledState make_coupled_initial(const IteratedMapKernel& fine, const IteratedMapKernel& coarse,
                                  const StateVector& x0) {
  if (x0.size() != fine.state_dim())
    throw std::invalid_argument("make_coupled_initial: x0 must have the fine state dimension");
  if (coarse.state_dim() > fine.state_dim())
    throw std::invalid_argument("make_coupled_initial: coarse dimension exceeds fine dimension");
  CoupledState s;
  s.fine = x0;
  s.coarse.assign(x0.begin(), x0.begin() + static_cast<std::ptrdiff_t>(coarse.state_dim()));
  return s;
}

CoupledState coupled_step(const IteratedMapKernel& fine, const IteratedMapKernel& coarse,
                          const CoupledState& s, RngStream& stream) {
  if (!innovations_compatible(fine.innovation_layout(), coarse.innovation_layout()))
    throw std::invalid_argument(
        "coupled_step: incompatible innovation layouts between fine and coarse kernels");
  const InnovationRecord rec = fine.draw_innovations(stream);
  RecordCursor fine_cursor(rec);
  RecordCursor coarse_cursor(rec);
  CoupledState out;
  out.fine = fine.apply(s.fine, fine_cursor);
  out.coarse = coarse.apply(s.coarse, coarse_cursor);
  out.step_index = s.step_index + 1;
  return out;
}

CoupledRun coupled_trajectory(const IteratedMapKernel& fine, const IteratedMapKernel& coarse,
                              const StateVector& x0, std::int64_t n_steps, RngStream& stream,
                              const PhiFunction& phi) {
  if (n_steps < 0) throw std::invalid_argument("coupled_trajectory: n_steps must be >= 0");
  if (!innovations_compatible(fine.innovation_layout(), coarse.innovation_layout()))
    throw std::invalid_argument(
        "coupled_trajectory: incompatible innovation layouts between fine and coarse kernels");
  CoupledRun run;
  run.increments.reserve(static_cast<std::size_t>(n_steps));
  CoupledState s = make_coupled_initial(fine, coarse, x0);
  const std::uint64_t start = stream.position();
  std::uint64_t coarse_reads = 0;
  for (std::int64_t i = 0; i < n_steps; ++i) {
    const InnovationRecord rec = fine.draw_innovations(stream);
    RecordCursor fine_cursor(rec);
    RecordCursor coarse_cursor(rec);
    s.fine = fine.apply(s.fine, fine_cursor);
    s.coarse = coarse.apply(s.coarse, coarse_cursor);
    s.step_index += 1;
    coarse_reads += coarse_cursor.gaussians_read();
    const double value = phi(s.fine) - phi(s.coarse);
    if (!std::isfinite(value))
      throw std::runtime_error("coupled_trajectory: non-finite increment at step " +
                               std::to_string(s.step_index));
    run.increments.push_back(IncrementSample{value, s.step_index});
  }
  run.cost = (stream.position() - start) + coarse_reads;
  run.final_state = std::move(s);
  return run;
}

MeanWithSe increment_mean(std::span<const IncrementSample> samples, std::size_t burn_in) {
  if (burn_in >= samples.size())
    throw std::invalid_argument("increment_mean: burn_in leaves no samples");
  std::vector<double> values;
  values.reserve(samples.size() - burn_in);
  for (std::size_t i = burn_in; i < samples.size(); ++i) values.push_back(samples[i].value);
  return mean_with_se(values);
}

}  // namespace mlmcmc
