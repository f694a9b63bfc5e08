#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "cupgame/engine.hpp"
#include "cupgame/score.hpp"

namespace cupgame {

/// Every fill vector over k cups with entries in {0, 1/2, ..., cap} summing
/// to m, in lexicographic order. Guard: k <= 6, m <= 8; cap defaults to 2m.
std::vector<std::vector<Rational>> enumerate_states(std::uint32_t k, const Rational& m,
                                                    std::optional<Rational> cap = std::nullopt);

/// States of enumerate_states satisfying sigma_i(S(i)+1/2) > sigma_j(S(j))
/// for every ordered pair i != j, checked pair by pair.
std::vector<std::vector<Rational>> enumerate_equilibria(const ScoreFunction& score, std::uint32_t k,
                                                        const Rational& m,
                                                        std::optional<Rational> cap = std::nullopt);

using FillerFactory = std::function<std::unique_ptr<FillSchedule>(const GameConfig&)>;

struct CrossingCupStat {
  CupId cup = 0;
  Rational placed;       // c_j(I)
  double expected = 0;   // frac(c_j(I))
  double frequency = 0;  // share of trials with floor(c_j) + 1 crossings
  double z = 0;
  std::uint64_t out_of_support = 0;  // trials with a count outside {floor, floor + 1}
};

struct CrossingPair {
  CupId a = 0, b = 0;
  double r = 0;
  double z = 0;
};

struct CrossingReport {
  std::vector<CrossingCupStat> cups;
  std::vector<CrossingPair> pairs;  // cups with non-degenerate counts only
  std::uint64_t trials = 0;
  bool pass = false;
  bool reran = false;
  std::uint64_t seed = 0;  // seed of the reported attempt
};

/// Replays the same filler against smoothed greedy with fresh offsets per
/// trial and compares crossing counts in steps [t1, t2] with the lemma's
/// floor + Bernoulli(frac) law. Pass iff every |z| <= 4. Reruns once with a
/// fresh seed on failure. Guard: n <= 16, trials >= 10^4, oblivious filler.
CrossingReport crossing_distribution_test(const GameConfig& config, const FillerFactory& filler, std::uint64_t t1,
                                          std::uint64_t t2, std::uint64_t trials);

struct MonotonicityViolation {
  std::vector<Rational> state;
  CupId lowered = 0;
  CupId expected = 0;
  CupId got = 0;
};

using Chooser = std::function<CupId(const std::vector<Rational>&)>;

/// For every state in {0, 1/2, ..., cap}^k and every non-chosen cup with
/// fill >= 1/2, lowering that cup by 1/2 must keep the choice. Guard: k <= 4,
/// cap <= 3.
std::vector<MonotonicityViolation> monotonicity_check(const Chooser& choose, std::uint32_t k, const Rational& cap);

/// Emptiest cup, ties to the lower index: not monotone.
CupId emptiest_cup(const std::vector<Rational>& fills);

/// The fixed oracle suite behind the `oracle` subcommand.
ojson run_oracle_suite(std::uint64_t seed, std::uint64_t crossing_trials);

}  // namespace cupgame
