#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cupgame/rational.hpp"

namespace cupgame {

// SplitMix64 finalizer; also used to expand a 64-bit seed into xoshiro state.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Who consumes a stream. Stream id = role * 2^32 + index.
enum class StreamRole : std::uint32_t {
  offsets = 1,
  priorities = 2,
  filler = 3,
  emptier = 4,
  trial = 5,
  probe = 6,
  oracle = 7,
};

constexpr std::uint64_t stream_id(StreamRole role, std::uint32_t index) noexcept {
  return (static_cast<std::uint64_t>(role) << 32) | index;
}

/// Seed of stream `id` under `root`. Counter-based: no stream depends on how
/// many numbers another stream has consumed.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t id) noexcept {
  return mix64(root ^ mix64(id));
}

/// xoshiro256** 1.0 (Blackman and Vigna), state expanded from a 64-bit seed
/// with SplitMix64.
class Xoshiro256ss {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256ss(std::uint64_t seed) noexcept;
  Xoshiro256ss(std::uint64_t root, StreamRole role, std::uint32_t index) noexcept
      : Xoshiro256ss(derive_seed(root, stream_id(role, index))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() noexcept { return next(); }
  std::uint64_t next() noexcept;

  /// Uniform integer in [0, bound), unbiased. bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Uniform integer in [lo, hi].
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) noexcept;
  /// Uniform rational k/2^63 in [0, 1).
  Rational unit_rational() noexcept;
  /// Uniform double in [0, 1), 53-bit.
  double unit_double() noexcept;

  const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Fisher-Yates shuffle driven by `rng.below`, so the permutation is fixed by
/// the generator alone (std::shuffle is implementation-defined).
template <class T>
void shuffle(std::vector<T>& items, Xoshiro256ss& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

/// `count` distinct values from [0, universe), in draw order.
std::vector<std::uint32_t> sample_distinct(std::uint32_t universe, std::uint32_t count, Xoshiro256ss& rng);

}  // namespace cupgame
