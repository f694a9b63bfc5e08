#include "cupgame/rng.hpp"

#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace cupgame {

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
}  // namespace

Xoshiro256ss::Xoshiro256ss(std::uint64_t seed) noexcept {
  std::uint64_t sm = seed;
  for (auto& word : s_) {
    word = mix64(sm);
    sm += 0x9E3779B97F4A7C15ULL;
  }
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t Xoshiro256ss::next() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t Xoshiro256ss::below(std::uint64_t bound) noexcept {
  // Rejection on the low end of the range: threshold = 2^64 mod bound.
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t x = 0;
  do {
    x = next();
  } while (x < threshold);
  return x % bound;
}

std::uint64_t Xoshiro256ss::between(std::uint64_t lo, std::uint64_t hi) noexcept {
  const std::uint64_t span = hi - lo;
  if (span == ~std::uint64_t{0}) return next();
  return lo + below(span + 1);
}

Rational Xoshiro256ss::unit_rational() noexcept { return Rational::dyadic(next() >> 1, 63); }

double Xoshiro256ss::unit_double() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::vector<std::uint32_t> sample_distinct(std::uint32_t universe, std::uint32_t count, Xoshiro256ss& rng) {
  if (count > universe) throw std::invalid_argument("sample_distinct: count exceeds universe");
  std::vector<std::uint32_t> out;
  out.reserve(count);
  if (count * 4ull >= universe) {
    // Partial Fisher-Yates over the whole range.
    std::vector<std::uint32_t> pool(universe);
    std::iota(pool.begin(), pool.end(), 0u);
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<std::uint32_t>(rng.below(universe - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }
  std::unordered_set<std::uint32_t> seen;
  while (out.size() < count) {
    const auto v = static_cast<std::uint32_t>(rng.below(universe));
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

}  // namespace cupgame
