#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "cupgame/game.hpp"
#include "cupgame/trace.hpp"

namespace cupgame {

/// Per-cup score functions sigma_j(f), strictly increasing in f.
///
/// "lex": sigma_j(f) = (f, rank_j) compared lexicographically; rank is a
/// permutation of 0..n-1 and the larger rank wins ties.
/// "affine": sigma_j(f) = a_j f + b_j with a_j > 0, checked for distinct
/// values over the half-integer grid 0, 1/2, ..., cap.
class ScoreFunction {
 public:
  enum class Family { lex, affine };

  struct Value {
    Rational primary;
    std::int64_t secondary = 0;
    friend std::strong_ordering operator<=>(const Value&, const Value&) = default;
    friend bool operator==(const Value&, const Value&) = default;
  };

  static ScoreFunction lex(std::vector<std::uint32_t> rank);
  /// Lex with rank_j = n-1-j: lower index wins ties.
  static ScoreFunction lex_lowest_index(std::uint32_t n);
  static ScoreFunction affine(std::vector<Rational> a, std::vector<Rational> b, const Rational& cap);

  Family family() const noexcept { return family_; }
  std::uint32_t size() const noexcept { return n_; }
  Value value(CupId cup, const Rational& fill) const;
  std::strong_ordering compare(CupId i, const Rational& fi, CupId j, const Rational& fj) const {
    return value(i, fi) <=> value(j, fj);
  }
  /// The first k cups' score functions.
  ScoreFunction restrict(std::uint32_t k) const;
  /// Score functions of `cups`, renumbered 0..size-1 in the given order.
  ScoreFunction subset(const std::vector<CupId>& cups) const;

  ojson describe() const;
  const std::vector<std::uint32_t>& ranks() const noexcept { return rank_; }

 private:
  Family family_ = Family::lex;
  std::uint32_t n_ = 0;
  std::vector<std::uint32_t> rank_;
  std::vector<Rational> a_, b_;
  Rational cap_;
};

/// No equilibrium exists for this (score, k, m). Possible for general score
/// families: e.g. sigma_1 = f + 100, sigma_2 = f, m = 1/2.
class NoEquilibrium : public Error {
 public:
  using Error::Error;
};

/// sigma_i(S(i) + 1/2) > sigma_j(S(j)) for all i != j.
bool is_equilibrium(const ScoreFunction& score, const std::vector<Rational>& fills);

/// Equilibrium of the first k cups at total m, by local search from the state
/// with all water in cup 0. Throws ConfigError if m is negative or not a
/// multiple of 1/2, NoEquilibrium if the search gets stuck.
std::vector<Rational> equilibrium(const ScoreFunction& score, std::uint32_t k, const Rational& m);

}  // namespace cupgame
