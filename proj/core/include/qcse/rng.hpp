#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace qcse {

/// Deterministic random stream. Every stochastic component in the project
/// draws from one of these; uniform/normal variates are generated from raw
/// mt19937_64 output with explicit arithmetic so results are reproducible
/// bit-for-bit (std::*_distribution is implementation-defined).
///
/// Streams are derived from a single experiment seed through named
/// sub-streams, so adding draws to one component never perturbs another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Child stream keyed by (this stream's seed, name).
  Rng sub(std::string_view name) const;
  /// Child stream keyed by (this stream's seed, name, index).
  Rng sub(std::string_view name, std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform integer in {0, ..., n-1}; n >= 1.
  int uniform_int(int n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

/// 64-bit FNV-1a of a byte string; used for stream derivation and file
/// manifests (not cryptographic).
std::uint64_t fnv1a64(std::string_view bytes);

/// SplitMix64 finalizer; decorrelates derived seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qcse
