// SPDX-License-Identifier: Apache-2.0
#include "mlmcmc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mlmcmc {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t absorb(std::uint64_t state, std::uint64_t value) {
  return mix64(state + kGolden * (value + 1));
}
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

const char* to_string(StreamPurpose p) {
  switch (p) {
    case StreamPurpose::kLevelPair: return "level_pair";
    case StreamPurpose::kLevel0: return "level0";
    case StreamPurpose::kReplicateRoot: return "replicate_root";
    case StreamPurpose::kOracle: return "oracle";
  }
  return "unknown";
}

std::uint64_t StreamKey::digest() const {
  std::uint64_t s = mix64(master_seed ^ kGolden);
  s = absorb(s, static_cast<std::uint64_t>(purpose));
  s = absorb(s, level);
  s = absorb(s, replicate);
  return s;
}

RngStream::RngStream(StreamKey key) : key_(key), digest_(key.digest()) {}

std::uint64_t RngStream::next_bits() {
  // Draw i of stream k is mix64(k + golden*(i+1)): the SplitMix64 sequence
  // seeded at the key digest, addressed by position.
  return mix64(digest_ + kGolden * (++position_));
}

double RngStream::uniform() {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are unreachable.
  return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::gaussian() { return normal_quantile(uniform()); }

void RngStream::gaussian_vector(std::span<double> out) {
  for (double& v : out) v = gaussian();
}

std::vector<double> RngStream::gaussian_vector(std::size_t n) {
  std::vector<double> out(n);
  gaussian_vector(std::span<double>(out));
  return out;
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("RngStream::gamma: shape must be > 0");
  if (shape == 1.0) return -std::log(uniform());
  if (shape < 1.0) {
    // Boost by one and rescale: G(a) = G(a+1) * U^{1/a}.
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze for shape > 1.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    const double x = gaussian();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

RngStream derive_stream(std::uint64_t master_seed, StreamPurpose purpose,
                        std::uint32_t level, std::uint32_t replicate) {
  return RngStream(StreamKey{master_seed, purpose, level, replicate});
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) *
                    r +
                4.5921953931549871457e4) *
                   r +
               1.3731693765509461125e4) *
                  r +
              1.9715909503065514427e3) *
                 r +
             1.3314166789178437745e2) *
                r +
            3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) *
                    r +
                2.1213794301586595867e4) *
                   r +
               5.3941960214247511077e3) *
                  r +
              6.8718700749205790830e2) *
                 r +
             4.2313330701600911252e1) *
                r +
            1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) *
                   r +
               1.27045825245236838258e0) *
                  r +
              3.64784832476320460504e0) *
                 r +
             5.76949722146069140550e0) *
                r +
            4.63033784615654529590e0) *
               r +
           1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) *
                   r +
               1.48103976427480074590e-1) *
                  r +
              6.89767334985100004550e-1) *
                 r +
             1.67638483018380384940e0) *
                r +
            2.05319162663775882187e0) *
               r +
           1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) *
                   r +
               2.65321895265761230930e-2) *
                  r +
              2.96560571828504891230e-1) *
                 r +
             1.78482653991729133580e0) *
                r +
            5.46378491116411436990e0) *
               r +
           6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) *
                   r +
               7.86869131145613259100e-4) *
                  r +
              1.48753612908506148525e-2) *
                 r +
             1.36929880922735805310e-1) *
                r +
            5.99832206555887937690e-1) *
               r +
           1.0);
  }
  return (q < 0.0) ? -val : val;
}

}  // namespace mlmcmc
