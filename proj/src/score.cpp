#include "cupgame/score.hpp"

#include <algorithm>
#include <numeric>

namespace cupgame {

namespace {

const Rational kHalf = Rational::fraction(1, 2);

}  // namespace

ScoreFunction ScoreFunction::lex(std::vector<std::uint32_t> rank) {
  std::vector<std::uint32_t> sorted = rank;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) throw ConfigError("lex ranks must be a permutation of 0..n-1", "rank");
  }
  ScoreFunction s;
  s.family_ = Family::lex;
  s.n_ = static_cast<std::uint32_t>(rank.size());
  s.rank_ = std::move(rank);
  return s;
}

ScoreFunction ScoreFunction::lex_lowest_index(std::uint32_t n) {
  std::vector<std::uint32_t> rank(n);
  for (std::uint32_t j = 0; j < n; ++j) rank[j] = n - 1 - j;
  return lex(std::move(rank));
}

ScoreFunction ScoreFunction::affine(std::vector<Rational> a, std::vector<Rational> b, const Rational& cap) {
  if (a.size() != b.size()) throw ConfigError("a and b must have equal length", "a");
  if (cap.is_negative() || !cap.is_half_integral()) throw ConfigError("must be a non-negative multiple of 1/2", "cap");
  for (const auto& aj : a) {
    if (aj <= 0) throw ConfigError("slopes must be positive", "a");
  }
  std::vector<Rational> values;
  const std::int64_t steps = (cap * 2).floor();
  values.reserve(a.size() * static_cast<std::size_t>(steps + 1));
  for (std::size_t j = 0; j < a.size(); ++j) {
    for (std::int64_t h = 0; h <= steps; ++h) values.push_back(a[j] * Rational::fraction(h, 2) + b[j]);
  }
  std::sort(values.begin(), values.end());
  if (std::adjacent_find(values.begin(), values.end()) != values.end()) {
    throw ConfigError("scores collide on the half-integer grid", "b");
  }
  ScoreFunction s;
  s.family_ = Family::affine;
  s.n_ = static_cast<std::uint32_t>(a.size());
  s.a_ = std::move(a);
  s.b_ = std::move(b);
  s.cap_ = cap;
  return s;
}

ScoreFunction::Value ScoreFunction::value(CupId cup, const Rational& fill) const {
  if (family_ == Family::lex) return Value{fill, rank_[cup]};
  return Value{a_[cup] * fill + b_[cup], 0};
}

ScoreFunction ScoreFunction::restrict(std::uint32_t k) const {
  if (k > n_) throw ConfigError("k exceeds the score's cup count", "k");
  std::vector<CupId> cups(k);
  std::iota(cups.begin(), cups.end(), 0u);
  return subset(cups);
}

ScoreFunction ScoreFunction::subset(const std::vector<CupId>& cups) const {
  for (const CupId c : cups) {
    if (c >= n_) throw ConfigError("cup " + std::to_string(c) + " outside the score", "cups");
  }
  const auto k = static_cast<std::uint32_t>(cups.size());
  if (family_ == Family::affine) {
    std::vector<Rational> a, b;
    for (const CupId c : cups) {
      a.push_back(a_[c]);
      b.push_back(b_[c]);
    }
    return affine(std::move(a), std::move(b), cap_);
  }
  // Keep the relative order of the chosen ranks.
  std::vector<std::uint32_t> order(k);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t x, std::uint32_t y) { return rank_[cups[x]] < rank_[cups[y]]; });
  std::vector<std::uint32_t> rank(k);
  for (std::uint32_t r = 0; r < k; ++r) rank[order[r]] = r;
  return lex(std::move(rank));
}

ojson ScoreFunction::describe() const {
  ojson out;
  if (family_ == Family::lex) {
    out["family"] = "lex";
    out["rank"] = rank_;
  } else {
    out["family"] = "affine";
    ojson a = ojson::array();
    ojson b = ojson::array();
    for (const auto& x : a_) a.push_back(x.str());
    for (const auto& x : b_) b.push_back(x.str());
    out["a"] = std::move(a);
    out["b"] = std::move(b);
    out["cap"] = cap_.str();
  }
  return out;
}

namespace {

// Cup with the largest current score.
CupId severity_cup(const ScoreFunction& score, const std::vector<Rational>& fills) {
  CupId best = 0;
  for (CupId j = 1; j < fills.size(); ++j) {
    if (score.compare(j, fills[j], best, fills[best]) > 0) best = j;
  }
  return best;
}

// Cup other than `skip` with the smallest score after receiving 1/2.
CupId cheapest_receiver(const ScoreFunction& score, const std::vector<Rational>& fills, CupId skip) {
  CupId best = skip;
  for (CupId j = 0; j < fills.size(); ++j) {
    if (j == skip) continue;
    if (best == skip || score.compare(j, fills[j] + kHalf, best, fills[best] + kHalf) < 0) best = j;
  }
  return best;
}

}  // namespace

bool is_equilibrium(const ScoreFunction& score, const std::vector<Rational>& fills) {
  if (fills.size() <= 1) return true;
  const CupId top = severity_cup(score, fills);
  const CupId a = cheapest_receiver(score, fills, top);
  return score.compare(a, fills[a] + kHalf, top, fills[top]) > 0;
}

std::vector<Rational> equilibrium(const ScoreFunction& score, std::uint32_t k, const Rational& m) {
  if (m.is_negative() || !m.is_half_integral()) throw ConfigError("must be a non-negative multiple of 1/2", "m");
  if (k == 0) throw ConfigError("must be positive", "k");
  if (k > score.size()) throw ConfigError("k exceeds the score's cup count", "k");
  std::vector<Rational> fills(k, Rational(0));
  fills[0] = m;
  if (k == 1) return fills;
  for (;;) {
    const CupId top = severity_cup(score, fills);
    const CupId a = cheapest_receiver(score, fills, top);
    if (score.compare(a, fills[a] + kHalf, top, fills[top]) > 0) return fills;
    if (fills[top].is_zero()) {
      throw NoEquilibrium("no equilibrium for k = " + std::to_string(k) + ", m = " + m.str() + ": cup " +
                          std::to_string(top) + " dominates while empty");
    }
    fills[top] -= kHalf;
    fills[a] += kHalf;
  }
}

}  // namespace cupgame
