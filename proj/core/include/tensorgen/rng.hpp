#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace tensorgen {

/// Deterministic random stream (xoshiro256++ state, seeded via SplitMix64).
///
/// Streams form a tree: substream() derives a child from this stream's
/// derivation seed plus a list of integer tags. Derivation depends only on
/// the seed and the tags, never on how much the parent has been consumed,
/// so adding draws in one place can never perturb values drawn elsewhere.
///
/// All distributions are sampled by fixed, explicitly written algorithms
/// (never std::*_distribution, whose output is implementation-defined), so
/// equal seeds and equal call sequences give bit-identical values on every
/// platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Child stream derived from (seed of this stream, tags...).
  RngStream substream(std::initializer_list<std::uint64_t> tags) const;

  /// The derivation seed of this stream (root seed for a root stream).
  std::uint64_t seed() const noexcept { return seed_; }

  /// Next raw 64-bit word.
  std::uint64_t next_u64();

  /// Unbiased uniform integer in [0, bound); bound must be >= 1.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal via Box-Muller (one spare value cached per pair).
  double normal();

  /// Gamma(shape, scale) via Marsaglia-Tsang squeeze; shape, scale > 0.
  double gamma(double shape, double scale);

  /// Poisson(mean); product-of-uniforms for small means, Hormann's PTRS
  /// transformed rejection for mean >= 10. mean must be finite and >= 0.
  std::int64_t poisson(double mean);

 private:
  double uniform_pos();  // (0, 1], safe as a log() argument

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace tensorgen
