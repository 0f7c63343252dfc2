// SPDX-License-Identifier: Apache-2.0
#include "mlmcmc/hier_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "mlmcmc/quadrature.hpp"

namespace mlmcmc {

void HierModelConfig::validate() const {
  if (!(alpha0 > 0.0)) throw std::invalid_argument("hier model: alpha0 must be > 0");
  if (!(kappa0 > 0.0)) throw std::invalid_argument("hier model: kappa0 must be > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("hier model: lambda must be > 0");
  if (m0 < 1) throw std::invalid_argument("hier model: m0 must be >= 1");
  if (max_level < 0) throw std::invalid_argument("hier model: max_level must be >= 0");
}

void HierModelConfig::require_level(int level) const {
  if (level < 0) throw std::invalid_argument("hier model: level must be >= 0");
  if (level > max_level)
    throw std::invalid_argument("hier model: level " + std::to_string(level) +
                                " exceeds max_level " + std::to_string(max_level));
  if (data.size() < static_cast<std::size_t>(truncation(level)))
    throw std::invalid_argument("hier model: data has " + std::to_string(data.size()) +
                                " entries, level " + std::to_string(level) + " needs " +
                                std::to_string(truncation(level)));
}

StateVector HierState::pack() const {
  StateVector out;
  out.reserve(u.size() + 1);
  out.push_back(delta);
  out.insert(out.end(), u.begin(), u.end());
  return out;
}

HierState HierState::unpack(std::span<const double> state) {
  if (state.empty()) throw std::invalid_argument("HierState: empty packed state");
  HierState s;
  s.delta = state[0];
  s.u.assign(state.begin() + 1, state.end());
  return s;
}

std::vector<double> simulate_data(double true_delta, std::size_t k_max, double lambda,
                                  RngStream& stream) {
  if (!(true_delta > 0.0)) throw std::invalid_argument("simulate_data: true_delta must be > 0");
  if (k_max < 1) throw std::invalid_argument("simulate_data: k_max must be >= 1");
  const std::vector<double> raw_u = stream.gaussian_vector(k_max);
  const std::vector<double> raw_noise = stream.gaussian_vector(k_max);
  const double noise_sd = 1.0 / std::sqrt(lambda);
  std::vector<double> y(k_max);
  for (std::size_t j = 0; j < k_max; ++j) {
    const double jj = static_cast<double>(j + 1);
    const double prior_sd = 1.0 / std::sqrt(true_delta * jj * jj * jj);
    y[j] = prior_sd * raw_u[j] + noise_sd * raw_noise[j];
  }
  return y;
}

ConditionalParams u_conditional(const HierModelConfig& cfg, int level, double delta) {
  if (!(delta > 0.0)) throw std::domain_error("u_conditional: delta must be > 0");
  cfg.require_level(level);
  const int k = cfg.truncation(level);
  ConditionalParams out;
  out.mean.resize(k);
  out.variance.resize(k);
  for (int j = 0; j < k; ++j) {
    const double jj = static_cast<double>(j + 1);
    const double precision = delta / (jj * jj * jj) + cfg.lambda;
    out.mean[j] = cfg.lambda * cfg.data[j] / precision;
    out.variance[j] = 1.0 / precision;
  }
  return out;
}

double delta_conditional_rate(const HierModelConfig& cfg, int level, std::span<const double> u) {
  const int k = cfg.truncation(level);
  if (u.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("delta_conditional_rate: u must have length K_l");
  double kappa = cfg.kappa0;
  for (int j = 0; j < k; ++j) {
    const double jj = static_cast<double>(j + 1);
    kappa += 0.5 * u[j] * u[j] / (jj * jj * jj);
  }
  return kappa;
}

double hier_phi(const HierModelConfig& cfg, std::span<const double> state) {
  if (state.size() < static_cast<std::size_t>(cfg.m0) + 1)
    throw std::invalid_argument("hier_phi: state too short for m0 u-coordinates");
  double s = 0.0;
  for (int j = 1; j <= cfg.m0; ++j) s += state[static_cast<std::size_t>(j)];
  return s / cfg.m0;
}

HierGibbsKernel::HierGibbsKernel(std::shared_ptr<const HierModelConfig> cfg, int level)
    : cfg_(std::move(cfg)), level_(level) {
  cfg_->validate();
  cfg_->require_level(level);
  k_ = cfg_->truncation(level);
  h_ = cfg_->resolution(level);
  inv_j3_.resize(k_);
  for (int j = 0; j < k_; ++j) {
    const double jj = static_cast<double>(j + 1);
    inv_j3_[j] = 1.0 / (jj * jj * jj);
  }
  layout_ = {InnovationSlot{InnovationKind::kGaussianVector, static_cast<std::size_t>(k_), 0.0},
             InnovationSlot{InnovationKind::kGamma, 1, cfg_->alpha0}};
}

StateVector HierGibbsKernel::apply(const StateVector& x, RecordCursor& cursor) const {
  if (x.size() < state_dim())
    throw std::invalid_argument("HierGibbsKernel: state shorter than K_l + 1");
  const double delta = x[0];
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::domain_error("HierGibbsKernel: delta component must be positive and finite");
  const std::span<const double> v = cursor.gaussians(static_cast<std::size_t>(k_));
  StateVector out(state_dim());
  double kappa = cfg_->kappa0;
  const double lambda = cfg_->lambda;
  const double* y = cfg_->data.data();
  for (int j = 0; j < k_; ++j) {
    const double precision = delta * inv_j3_[j] + lambda;
    const double u = lambda * y[j] / precision + v[j] / std::sqrt(precision);
    out[static_cast<std::size_t>(j) + 1] = u;
    kappa += 0.5 * u * u * inv_j3_[j];
  }
  const double w = cursor.gamma();
  out[0] = w / kappa;
  return out;
}

CoupledState hier_coupled_sweep(const std::shared_ptr<const HierModelConfig>& cfg, int level,
                                const CoupledState& s, RngStream& stream) {
  if (level < 1) throw std::invalid_argument("hier_coupled_sweep: level must be >= 1");
  const HierGibbsKernel fine(cfg, level);
  const HierGibbsKernel coarse(cfg, level - 1);
  return coupled_step(fine, coarse, s, stream);
}

double log_delta_marginal(const HierModelConfig& cfg, int level, double delta) {
  cfg.require_level(level);
  if (!(delta > 0.0)) return -std::numeric_limits<double>::infinity();
  const int k = cfg.truncation(level);
  const double lambda = cfg.lambda;
  double lp = (cfg.alpha0 - 1.0) * std::log(delta) - delta * cfg.kappa0;
  for (int j = 0; j < k; ++j) {
    const double jj = static_cast<double>(j + 1);
    const double lam_j3 = lambda * jj * jj * jj;
    lp += -0.5 * std::log1p(delta / lam_j3) -
          0.5 * cfg.data[j] * cfg.data[j] * lambda * delta / (lam_j3 + delta);
  }
  return lp;
}

double hier_phi_given_delta(const HierModelConfig& cfg, double delta) {
  double s = 0.0;
  for (int j = 1; j <= cfg.m0; ++j) {
    const double jj = static_cast<double>(j);
    const double lam_j3 = cfg.lambda * jj * jj * jj;
    s += lam_j3 * cfg.data[static_cast<std::size_t>(j) - 1] / (delta + lam_j3);
  }
  return s / cfg.m0;
}

namespace {

// The delta-dependent part of log p(delta | y) without the (alpha0-1)*log
// term; strictly decreasing in delta, maximal (= 0) at delta = 0.
double log_marginal_rest(const HierModelConfig& cfg, int level, double delta) {
  return log_delta_marginal(cfg, level, delta) - (cfg.alpha0 - 1.0) * std::log(delta);
}

struct MarginalBracket {
  double hi = 0.0;        // integration endpoint
  double log_max = 0.0;   // log-scale shift
  double arg_max = 0.0;   // location of the (possibly boundary) maximum
};

MarginalBracket bracket_marginal(const HierModelConfig& cfg, int level) {
  // Coarse log-grid scan for the maximizer of the full log-marginal,
  // then a ternary refinement between its grid neighbours.
  const int n_scan = 720;
  double best_lp = -std::numeric_limits<double>::infinity();
  double best_d = 1e-10;
  double lo = 1e-10, hi = 1e6;
  for (int i = 0; i < n_scan; ++i) {
    const double d = lo * std::pow(hi / lo, static_cast<double>(i) / (n_scan - 1));
    const double lp = log_delta_marginal(cfg, level, d);
    if (lp > best_lp) {
      best_lp = lp;
      best_d = d;
    }
  }
  double a = best_d / std::pow(hi / lo, 1.0 / (n_scan - 1));
  double b = best_d * std::pow(hi / lo, 1.0 / (n_scan - 1));
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (log_delta_marginal(cfg, level, m1) < log_delta_marginal(cfg, level, m2))
      a = m1;
    else
      b = m2;
  }
  MarginalBracket out;
  out.arg_max = 0.5 * (a + b);
  out.log_max = std::max(best_lp, log_delta_marginal(cfg, level, out.arg_max));
  // Endpoint: walk up until the density has fallen by e^-60.
  double d_hi = std::max(1.0, 4.0 * out.arg_max);
  int guard = 0;
  while (log_delta_marginal(cfg, level, d_hi) > out.log_max - 60.0) {
    d_hi *= 2.0;
    if (++guard > 400)
      throw std::runtime_error("posterior_oracle: failed to bracket the delta marginal");
  }
  out.hi = d_hi;
  return out;
}

}  // namespace

double posterior_oracle(const HierModelConfig& cfg, int level) {
  cfg.validate();
  cfg.require_level(level);
  const double rel_tol = 1e-8;
  if (cfg.alpha0 >= 1.0) {
    const MarginalBracket br = bracket_marginal(cfg, level);
    const double shift = br.log_max;
    auto weight = [&](double d) {
      const double lp = log_delta_marginal(cfg, level, d);
      return std::exp(lp - shift);  // log-domain rescaling; exp underflows to 0 harmlessly
    };
    // Announce the high-mass region to the integrator: walk outward from the
    // mode until the log-density has dropped by 4, doubling the step.
    std::vector<double> breaks{br.arg_max};
    double w = std::max(br.arg_max * 1e-9, 1e-12);
    while (br.arg_max - w > 0.0 &&
           log_delta_marginal(cfg, level, br.arg_max - w) > br.log_max - 4.0)
      w *= 2.0;
    breaks.push_back(std::max(br.arg_max - w, 0.0));
    w = std::max(br.arg_max * 1e-9, 1e-12);
    while (br.arg_max + w < br.hi &&
           log_delta_marginal(cfg, level, br.arg_max + w) > br.log_max - 4.0)
      w *= 2.0;
    breaks.push_back(std::min(br.arg_max + w, br.hi));
    const double z = integrate_adaptive([&](double d) { return weight(d); }, 0.0, br.hi, rel_tol,
                                        0.0, 48, breaks)
                         .value;
    if (!(z > 0.0)) throw std::runtime_error("posterior_oracle: normalizer vanished");
    const double num =
        integrate_adaptive([&](double d) { return hier_phi_given_delta(cfg, d) * weight(d); }, 0.0,
                           br.hi, rel_tol, 0.0, 48, breaks)
            .value;
    return num / z;
  }
  // alpha0 < 1: integrate in t = delta^alpha0; the Jacobian cancels the
  // delta^(alpha0-1) endpoint singularity and the weight exp(rest) is
  // monotone decreasing with maximum 1 at t = 0.
  const double inv_a = 1.0 / cfg.alpha0;
  double d_hi = 1.0;
  int guard = 0;
  while (log_marginal_rest(cfg, level, d_hi) > -60.0) {
    d_hi *= 2.0;
    if (++guard > 400) throw std::runtime_error("posterior_oracle: failed to bracket tail");
  }
  const double t_hi = std::pow(d_hi, cfg.alpha0);
  auto weight_t = [&](double t) {
    if (t <= 0.0) return 1.0 / cfg.alpha0;
    const double d = std::pow(t, inv_a);
    return std::exp(log_marginal_rest(cfg, level, d)) / cfg.alpha0;
  };
  const double z = integrate_adaptive(weight_t, 0.0, t_hi, rel_tol).value;
  if (!(z > 0.0)) throw std::runtime_error("posterior_oracle: normalizer vanished");
  const double num = integrate_adaptive(
                         [&](double t) {
                           const double d = (t <= 0.0) ? 0.0 : std::pow(t, inv_a);
                           return hier_phi_given_delta(cfg, d) * weight_t(t);
                         },
                         0.0, t_hi, rel_tol)
                         .value;
  return num / z;
}

HierPosteriorSampler::HierPosteriorSampler(std::shared_ptr<const HierModelConfig> cfg, int level,
                                           std::size_t grid_points)
    : cfg_(std::move(cfg)), level_(level) {
  cfg_->validate();
  cfg_->require_level(level);
  if (cfg_->alpha0 < 1.0)
    throw std::invalid_argument("HierPosteriorSampler: requires alpha0 >= 1 (grid CDF)");
  const MarginalBracket br = bracket_marginal(*cfg_, level_);
  std::vector<double> grid(grid_points);
  std::vector<double> density(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double d = br.hi * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    grid[i] = d;
    density[i] =
        (d <= 0.0 && cfg_->alpha0 > 1.0)
            ? 0.0
            : std::exp(log_delta_marginal(*cfg_, level_, std::max(d, 1e-300)) - br.log_max);
  }
  delta_icdf_ = std::make_unique<GridInverseCdf>(std::move(grid), density);
}

double HierPosteriorSampler::sample_delta(RngStream& stream) const {
  return std::max((*delta_icdf_)(stream.uniform()), 1e-300);
}

HierState HierPosteriorSampler::sample(RngStream& stream) const {
  HierState s;
  s.delta = sample_delta(stream);
  const ConditionalParams cp = u_conditional(*cfg_, level_, s.delta);
  const int k = cfg_->truncation(level_);
  s.u.resize(k);
  for (int j = 0; j < k; ++j)
    s.u[static_cast<std::size_t>(j)] =
        cp.mean[static_cast<std::size_t>(j)] +
        std::sqrt(cp.variance[static_cast<std::size_t>(j)]) * stream.gaussian();
  return s;
}

MlModel hier_ml_model(std::shared_ptr<const HierModelConfig> cfg) {
  cfg->validate();
  MlModel model;
  model.id = hier_model_id(*cfg);
  model.max_level = cfg->max_level;
  model.resolution = [cfg](int level) { return cfg->resolution(level); };
  model.kernel = [cfg](int level) -> std::shared_ptr<const IteratedMapKernel> {
    return std::make_shared<HierGibbsKernel>(cfg, level);
  };
  model.phi = [cfg](std::span<const double> state) { return hier_phi(*cfg, state); };
  model.initial_state = [cfg](int level) {
    StateVector x(static_cast<std::size_t>(cfg->truncation(level)) + 1, 0.0);
    x[0] = 1.0;  // reference point: u = 0, delta = 1
    return x;
  };
  model.state_box = [cfg](int level) {
    std::vector<std::pair<double, double>> box(static_cast<std::size_t>(cfg->truncation(level)) + 1,
                                               {-1.0, 1.0});
    box[0] = {0.25, 2.5};  // delta stays positive
    return box;
  };
  return model;
}

std::string hier_model_id(const HierModelConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto fnv = [&h](const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) h = (h ^ b[i]) * 0x100000001b3ull;
  };
  fnv(cfg.data.data(), cfg.data.size() * sizeof(double));
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "hier_gauss(alpha0=%g,kappa0=%g,lambda=%g,m0=%d,max_level=%d,data=%016llx)",
                cfg.alpha0, cfg.kappa0, cfg.lambda, cfg.m0, cfg.max_level,
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace mlmcmc
