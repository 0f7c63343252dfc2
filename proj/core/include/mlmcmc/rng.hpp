// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mlmcmc {

/// Role of a derived stream inside one experiment. Streams with distinct
/// (purpose, level, replicate) tuples are statistically independent.
enum class StreamPurpose : std::uint64_t {
  kLevelPair = 1,      // coupled chain driving levels (l, l-1)
  kLevel0 = 2,         // single-level chains
  kReplicateRoot = 3,  // auxiliary sources (data simulation, probe states)
  kOracle = 4,         // exact posterior sampling / validation draws
};

const char* to_string(StreamPurpose p);

/// Identity of a stream. Equal keys replay bit-identical draw sequences.
struct StreamKey {
  std::uint64_t master_seed = 0;
  StreamPurpose purpose = StreamPurpose::kReplicateRoot;
  std::uint32_t level = 0;
  std::uint32_t replicate = 0;

  bool operator==(const StreamKey&) const = default;

  /// 64-bit digest; the sole state from which draws are generated.
  std::uint64_t digest() const;
};

/// Counter-based stream: draw i is a pure function of (key digest, i), so
/// derivation is O(1), replay is exact, and independence is a property of
/// the key, not of sampling order.
///
/// Scalar draw conventions:
///  - uniform() is strictly inside (0,1);
///  - gaussian draws use inverse-CDF, exactly one scalar consumed per
///    variate (prefix property: the first m of gaussian_vector(n) equal
///    gaussian_vector(m) from the same position);
///  - gamma(shape) consumes a data-dependent number of scalars except
///    shape == 1, which consumes exactly one uniform.
class RngStream {
 public:
  RngStream() : RngStream(StreamKey{}) {}
  explicit RngStream(StreamKey key);

  double uniform();
  double gaussian();
  void gaussian_vector(std::span<double> out);
  std::vector<double> gaussian_vector(std::size_t n);
  double gamma(double shape);  // Gamma(shape, rate 1); shape <= 0 -> std::domain_error

  /// Number of scalar draws consumed since position 0.
  std::uint64_t position() const { return position_; }
  /// Rewind/advance to an absolute draw count (replay support).
  void seek(std::uint64_t position) { position_ = position; }

  const StreamKey& key() const { return key_; }

 private:
  std::uint64_t next_bits();

  StreamKey key_;
  std::uint64_t digest_ = 0;
  std::uint64_t position_ = 0;
};

RngStream derive_stream(std::uint64_t master_seed, StreamPurpose purpose,
                        std::uint32_t level, std::uint32_t replicate);

/// SplitMix64 finalizer (Stafford mix13 variant).
std::uint64_t mix64(std::uint64_t z);

/// Inverse standard-normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

/// Version tag for the key-derivation schema, recorded in run manifests.
inline constexpr int kRngSchemaVersion = 1;

}  // namespace mlmcmc
