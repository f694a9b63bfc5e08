#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cupgame/engine.hpp"
#include "cupgame/score.hpp"

namespace cupgame {

struct Threshold {
  enum class Kind { light, heavy };
  CupId cup = 0;
  std::uint32_t level = 1;

  Kind kind() const noexcept { return level >= 2 ? Kind::heavy : Kind::light; }
  friend bool operator==(const Threshold&, const Threshold&) = default;
};

/// Crossed thresholds (j, i), i.e. fill_j >= i, ordered by (cup, level).
struct ThresholdQueue {
  std::vector<Threshold> thresholds;
  std::vector<CupId> queued;  // cups with fill >= 1, ascending

  std::uint64_t size() const noexcept { return thresholds.size(); }
};

/// Materializes the queue. Large fills produce many thresholds; use
/// FillIndex::queue_size() when only |Q| is needed.
ThresholdQueue queue_view(const CupState& state);

// Scan-based reference selectors: O(n) per call.

/// The p fullest cups with fill >= 1, ties to the lower index.
EmptyDecision greedy_select(const CupState& state, std::uint32_t p);
/// Greedy on bookkeeping fills; skips when the fullest cup is below 1.
inline EmptyDecision smoothed_greedy_select(const CupState& state, std::uint32_t p) {
  return greedy_select(state, p);
}
/// Cups with fill >= 2 by decreasing fill (ties to the lower index), then
/// cups with fill in [1, 2) by decreasing priority (ties to the lower index).
EmptyDecision asymmetric_select(const CupState& state, std::uint32_t p);

// Index-backed selectors: same decisions in O(p log n).
EmptyDecision greedy_select(const FillIndex& index, std::uint32_t p);
EmptyDecision asymmetric_select(const FillIndex& index, std::uint32_t p);

/// Whether a score emptier removes from its argmax cup with this fill.
/// Default: remove iff fill >= 1. A higher threshold skips more often.
struct SkipRule {
  Rational remove_at = 1;
  bool removes(const Rational& fill) const { return fill >= remove_at; }
};

/// Cup maximizing sigma_j(f_j); fills.size() must equal score.size() > 0.
CupId score_argmax(const ScoreFunction& score, std::span<const Rational> fills);

/// Single-processor score-based choice. Fills must be multiples of `granule`
/// (1/2 by default), else RuleViolation(fill_not_half_integral).
EmptyDecision score_select(const ScoreFunction& score, const CupState& state, const SkipRule& skip = {},
                           const Rational& granule = Rational::fraction(1, 2));

/// Schedule entry for step t (1-based) is schedule[(t - 1) mod size].
EmptyDecision dynamic_score_select(const std::vector<ScoreFunction>& schedule, std::uint64_t t,
                                   const CupState& state, const SkipRule& skip = {},
                                   const Rational& granule = Rational::fraction(1, 2));

/// floor(p_j * q) + 1, in [1, q].
std::uint32_t priority_level(const Rational& priority, std::uint32_t q);
/// max(2, 4 * ceil(log2 log2 n)).
std::uint32_t default_level_count(std::uint32_t n);

class GreedyEmptier : public Emptier {
 public:
  /// smoothed == false: deterministic greedy on zero offsets.
  explicit GreedyEmptier(bool smoothed, bool use_index = true) : smoothed_(smoothed), use_index_(use_index) {}

  bool deterministic() const noexcept override { return !smoothed_; }
  bool uses_offsets() const noexcept override { return smoothed_; }
  EmptyDecision select(const GameView& view) override;
  ojson describe() const override;

 private:
  bool smoothed_;
  bool use_index_;
};

class AsymmetricEmptier : public Emptier {
 public:
  explicit AsymmetricEmptier(bool use_index = true) : use_index_(use_index) {}

  bool deterministic() const noexcept override { return false; }
  bool uses_offsets() const noexcept override { return true; }
  EmptyDecision select(const GameView& view) override;
  ojson describe() const override;

 private:
  bool use_index_;
};

class ScoreEmptier : public Emptier {
 public:
  explicit ScoreEmptier(ScoreFunction score, SkipRule skip = {}, Rational granule = Rational::fraction(1, 2))
      : schedule_{std::move(score)}, skip_(std::move(skip)), granule_(std::move(granule)) {}
  /// Dynamic: cyclic schedule of score functions.
  ScoreEmptier(std::vector<ScoreFunction> schedule, SkipRule skip, Rational granule);

  bool deterministic() const noexcept override { return true; }
  bool uses_offsets() const noexcept override { return false; }
  void validate(const GameConfig& config) const override;
  EmptyDecision select(const GameView& view) override;
  ojson describe() const override;

 private:
  std::vector<ScoreFunction> schedule_;
  SkipRule skip_;
  Rational granule_;
};

}  // namespace cupgame
