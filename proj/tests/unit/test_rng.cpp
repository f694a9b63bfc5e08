#include <doctest.h>

#include <set>

#include "cupgame/rng.hpp"

using namespace cupgame;

TEST_CASE("xoshiro256** matches the reference state expansion") {
  // SplitMix64 from seed 0 gives the first word 0xe220a8397b1dcdaf.
  Xoshiro256ss rng(0);
  CHECK(rng.state()[0] == 0xe220a8397b1dcdafULL);
  Xoshiro256ss again(0);
  for (int i = 0; i < 100; ++i) CHECK(rng.next() == again.next());
}

TEST_CASE("streams are separated by role and index") {
  std::set<std::uint64_t> seeds;
  for (std::uint32_t i = 0; i < 64; ++i) {
    seeds.insert(derive_seed(7, stream_id(StreamRole::trial, i)));
    seeds.insert(derive_seed(7, stream_id(StreamRole::filler, i)));
  }
  CHECK(seeds.size() == 128);
  CHECK(stream_id(StreamRole::offsets, 5) == (std::uint64_t{1} << 32 | 5));
}

TEST_CASE("below is in range and sample_distinct is distinct") {
  Xoshiro256ss rng(3);
  for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
  auto picks = sample_distinct(100, 40, rng);
  CHECK(std::set<std::uint32_t>(picks.begin(), picks.end()).size() == 40);
  for (auto v : picks) CHECK(v < 100);
}

TEST_CASE("unit rationals have denominator dividing 2^63") {
  Xoshiro256ss rng(11);
  for (int i = 0; i < 100; ++i) {
    const Rational r = rng.unit_rational();
    CHECK(r >= 0);
    CHECK(r < 1);
    CHECK(r.is_small());
  }
}
