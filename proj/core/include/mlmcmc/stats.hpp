// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mlmcmc {

double mean(std::span<const double> x);

/// Unbiased sample variance (ddof = 1); 0 for fewer than two samples.
double sample_variance(std::span<const double> x);

/// Batch-means standard error of the mean. Uses B = min(batches, n) batches
/// of size floor(n/B); any remainder is dropped from the front so the most
/// recent samples are kept. Returns 0 when fewer than two batches carry data.
double batch_means_se(std::span<const double> x, std::size_t batches = 32);

struct MeanWithSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

MeanWithSe mean_with_se(std::span<const double> x, std::size_t batches = 32);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope*x + intercept.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// OLS on (log2 x, log2 y); requires strictly positive inputs.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

/// Inverse-CDF sampler on a tabulated density grid. The grid must be strictly
/// increasing; weights are unnormalized density values at the nodes, integrated
/// with the trapezoid rule.
class GridInverseCdf {
 public:
  GridInverseCdf(std::vector<double> grid, std::span<const double> density);
  double operator()(double u) const;  // u in (0,1)

 private:
  std::vector<double> grid_;
  std::vector<double> cdf_;
};

}  // namespace mlmcmc
