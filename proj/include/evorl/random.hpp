#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace evorl {

/// A deterministic pseudo-random stream.
///
/// All variates are produced from raw 64-bit engine output with fixed
/// arithmetic, so a stream seeded identically yields identical draws on every
/// platform (unlike the implementation-defined std:: distributions).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  /// One uniform draw; true with probability p. p <= 0 never succeeds and
  /// p >= 1 always does, but a draw is consumed either way.
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Derives child streams from a root seed keyed by (label, index).
///
/// Derivation is a pure function of its three inputs, so replicate k gets the
/// same stream no matter how many replicates are run in total.
class RandomStreamTree {
 public:
  explicit RandomStreamTree(std::uint64_t root_seed) : root_(root_seed) {}

  std::uint64_t root_seed() const noexcept { return root_; }
  std::uint64_t child_seed(std::string_view label, std::uint64_t index) const;
  RandomStream stream(std::string_view label, std::uint64_t index) const {
    return RandomStream(child_seed(label, index));
  }
  RandomStreamTree subtree(std::string_view label, std::uint64_t index) const {
    return RandomStreamTree(child_seed(label, index));
  }

 private:
  std::uint64_t root_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace evorl
