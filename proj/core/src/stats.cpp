// SPDX-License-Identifier: Apache-2.0
#include "mlmcmc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlmcmc {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(n - 1);
}

double batch_means_se(std::span<const double> x, std::size_t batches) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const std::size_t b = std::min(batches, n);
  const std::size_t m = n / b;
  const std::size_t start = n - b * m;
  std::vector<double> bm(b);
  for (std::size_t i = 0; i < b; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += x[start + i * m + j];
    bm[i] = s / static_cast<double>(m);
  }
  return std::sqrt(sample_variance(bm) / static_cast<double>(b));
}

MeanWithSe mean_with_se(std::span<const double> x, std::size_t batches) {
  return MeanWithSe{mean(x), batch_means_se(x, batches), x.size()};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need >= 2 points of equal length");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("loglog_fit: inputs must be strictly positive");
    lx[i] = std::log2(x[i]);
    ly[i] = std::log2(y[i]);
  }
  return linear_fit(lx, ly);
}

GridInverseCdf::GridInverseCdf(std::vector<double> grid, std::span<const double> density)
    : grid_(std::move(grid)), cdf_(grid_.size(), 0.0) {
  if (grid_.size() != density.size() || grid_.size() < 2)
    throw std::invalid_argument("GridInverseCdf: grid/density size mismatch");
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    const double dx = grid_[i] - grid_[i - 1];
    if (!(dx > 0.0)) throw std::invalid_argument("GridInverseCdf: grid must be increasing");
    cdf_[i] = cdf_[i - 1] + 0.5 * (density[i] + density[i - 1]) * dx;
  }
  const double total = cdf_.back();
  if (!(total > 0.0)) throw std::invalid_argument("GridInverseCdf: zero total mass");
  for (double& c : cdf_) c /= total;
}

double GridInverseCdf::operator()(double u) const {
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.begin()) return grid_.front();
  if (it == cdf_.end()) return grid_.back();
  const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
  const double c0 = cdf_[i - 1], c1 = cdf_[i];
  const double w = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
  return grid_[i - 1] + w * (grid_[i] - grid_[i - 1]);
}

}  // namespace mlmcmc
