// SPDX-License-Identifier: Apache-2.0
#include "mlmcmc/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmcmc {

std::span<const double> RecordCursor::gaussians(std::size_t n) {
  if (gaussian_pos_ + n > rec_->gaussians.size())
    throw std::out_of_range("RecordCursor: gaussian read past record");
  const std::span<const double> out(rec_->gaussians.data() + gaussian_pos_, n);
  gaussian_pos_ += n;
  return out;
}

double RecordCursor::uniform() {
  if (uniform_pos_ >= rec_->uniforms.size())
    throw std::out_of_range("RecordCursor: uniform read past record");
  return rec_->uniforms[uniform_pos_++];
}

double RecordCursor::gamma() {
  if (gamma_pos_ >= rec_->gammas.size())
    throw std::out_of_range("RecordCursor: gamma read past record");
  return rec_->gammas[gamma_pos_++];
}

StateVector IteratedMapKernel::apply(const StateVector& x, const InnovationRecord& rec) const {
  RecordCursor cursor(rec);
  return apply(x, cursor);
}

InnovationRecord IteratedMapKernel::draw_innovations(RngStream& stream) const {
  InnovationRecord rec;
  for (const InnovationSlot& slot : innovation_layout()) {
    switch (slot.kind) {
      case InnovationKind::kGaussianVector: {
        const std::size_t base = rec.gaussians.size();
        rec.gaussians.resize(base + slot.count);
        stream.gaussian_vector(std::span<double>(rec.gaussians.data() + base, slot.count));
        break;
      }
      case InnovationKind::kUniform:
        for (std::size_t i = 0; i < slot.count; ++i) rec.uniforms.push_back(stream.uniform());
        break;
      case InnovationKind::kGamma:
        for (std::size_t i = 0; i < slot.count; ++i)
          rec.gammas.push_back(stream.gamma(slot.gamma_shape));
        break;
    }
  }
  return rec;
}

StateVector IteratedMapKernel::step(const StateVector& x, RngStream& stream) const {
  const InnovationRecord rec = draw_innovations(stream);
  return apply(x, rec);
}

bool TargetSpec::in_support(std::span<const double> x) const {
  if (support.empty()) return true;
  if (x.size() != support.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < support[i].first || x[i] > support[i].second) return false;
  return true;
}

MhKernel::MhKernel(TargetSpec target, double proposal_scale, int level, double resolution,
                   std::size_t dim)
    : target_(std::move(target)),
      proposal_scale_(proposal_scale),
      level_(level),
      resolution_(resolution),
      dim_(dim) {
  if (!(proposal_scale_ > 0.0)) throw std::invalid_argument("MhKernel: proposal_scale must be > 0");
  layout_ = {InnovationSlot{InnovationKind::kGaussianVector, dim_, 0.0},
             InnovationSlot{InnovationKind::kUniform, 1, 0.0}};
}

StateVector MhKernel::apply(const StateVector& x, RecordCursor& cursor) const {
  const std::span<const double> g = cursor.gaussians(dim_);
  const double u2 = cursor.uniform();
  const double log_pi_x = target_.log_density(std::span<const double>(x.data(), dim_));
  if (!std::isfinite(log_pi_x))
    throw std::domain_error("MhKernel: log-density not finite at the current state");
  StateVector y(dim_);
  for (std::size_t i = 0; i < dim_; ++i) y[i] = x[i] + proposal_scale_ * g[i];
  if (!target_.in_support(y)) return StateVector(x.begin(), x.begin() + dim_);
  const double log_ratio = target_.log_density(y) - log_pi_x;
  // ratio >= 1 accepts for any u2; symmetric proposal, so no q correction.
  if (log_ratio >= 0.0 || u2 < std::exp(log_ratio)) return y;
  return StateVector(x.begin(), x.begin() + dim_);
}

GibbsSweepKernel::GibbsSweepKernel(int level, double resolution, std::size_t dim,
                                   std::vector<GibbsBlock> blocks)
    : level_(level), resolution_(resolution), dim_(dim), blocks_(std::move(blocks)) {
  std::size_t expect = 0;
  for (const GibbsBlock& b : blocks_) {
    if (b.offset != expect || b.size == 0)
      throw std::invalid_argument("GibbsSweepKernel: blocks must partition the state vector");
    expect += b.size;
    for (const InnovationSlot& s : b.needs) layout_.push_back(s);
  }
  if (expect != dim_)
    throw std::invalid_argument("GibbsSweepKernel: blocks must partition the state vector");
}

StateVector GibbsSweepKernel::apply(const StateVector& x, RecordCursor& cursor) const {
  StateVector out(x.begin(), x.begin() + dim_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const GibbsBlock& b = blocks_[i];
    try {
      b.update(std::span<double>(out.data() + b.offset, b.size),
               std::span<const double>(out.data(), dim_), cursor);
    } catch (const std::domain_error& e) {
      throw std::domain_error("gibbs sweep: block " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

Trajectory iterate(const IteratedMapKernel& kernel, const StateVector& x0, std::int64_t n_steps,
                   RngStream& stream) {
  if (n_steps < 0) throw std::invalid_argument("iterate: n_steps must be >= 0");
  Trajectory out;
  out.states.reserve(static_cast<std::size_t>(n_steps));
  const std::uint64_t start = stream.position();
  StateVector x = x0;
  for (std::int64_t i = 0; i < n_steps; ++i) {
    x = kernel.step(x, stream);
    out.states.push_back(x);
  }
  out.cost = stream.position() - start;
  return out;
}

SyntheticTarget synthetic_target(int level, double rate_beta_prime) {
  if (level < 0) throw std::invalid_argument("synthetic_target: level must be >= 0");
  if (!(rate_beta_prime > 0.0))
    throw std::invalid_argument("synthetic_target: rate_beta_prime must be > 0");
  SyntheticTarget out;
  out.resolution = std::pow(2.0, -(level + 1));
  out.variance = 1.0 + std::pow(out.resolution, rate_beta_prime);
  const double var = out.variance;
  out.target.log_density = [var](std::span<const double> x) { return -x[0] * x[0] / (2.0 * var); };
  out.target.support = {{-3.0, 3.0}};
  out.kernel = std::make_shared<MhKernel>(out.target, 1.0, level, out.resolution, 1);
  return out;
}

}  // namespace mlmcmc
