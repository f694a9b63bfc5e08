#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cupgame/errors.hpp"
#include "cupgame/rational.hpp"

namespace cupgame {

using CupId = std::uint32_t;

struct GameConfig {
  std::uint32_t n = 1;
  std::uint32_t p = 1;
  Rational epsilon = 0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::optional<std::int64_t> truncation_h;
  std::uint64_t snapshot_stride = 1000;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// p * (1 - epsilon): the most water the filler may pour in one step.
  Rational budget() const;
};

/// One game's cups. Fills are bookkeeping fills: true water plus offset.
struct CupState {
  std::vector<Rational> fills;
  std::vector<Rational> offsets;
  std::vector<Rational> priorities;
  std::uint64_t step_index = 0;

  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(fills.size()); }
  /// max(0, fill - offset).
  Rational true_fill(CupId cup) const;
};

struct Placement {
  CupId cup = 0;
  Rational amount;

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// The filler's pour for one step: cup -> amount, kept sorted by cup.
class FillMove {
 public:
  FillMove() = default;
  FillMove(std::initializer_list<Placement> placements);

  /// Adds `amount` to the cup's placement (merging repeats).
  void add(CupId cup, const Rational& amount);

  std::span<const Placement> placements() const noexcept { return placements_; }
  bool empty() const noexcept { return placements_.empty(); }
  std::size_t size() const noexcept { return placements_.size(); }
  Rational total() const;
  /// Amount placed into `cup` (0 if absent).
  Rational amount(CupId cup) const;

  friend bool operator==(const FillMove&, const FillMove&) = default;

 private:
  std::vector<Placement> placements_;
};

/// Cups the emptier removes one unit from, in selection order (empty = skip).
struct EmptyDecision {
  std::vector<CupId> cups;

  bool skip() const noexcept { return cups.empty(); }
  friend bool operator==(const EmptyDecision&, const EmptyDecision&) = default;
};

struct FillViolation {
  Rule rule;
  std::optional<CupId> cup;
  Rational amount;

  std::string message() const;
};

/// What a step did besides the pour and the emptier's removals.
struct StepEffects {
  /// (cup, thresholds crossed by the pour), only non-zero entries.
  std::vector<std::pair<CupId, std::uint32_t>> crossings;
  /// (cup, forced unit removals) from h-truncation.
  std::vector<std::pair<CupId, std::uint32_t>> truncations;
};

/// Fresh game state. Offsets r_j and priorities p_j are independent uniform
/// draws k/2^63 from streams derived from `config.seed`; fills start equal to
/// the offsets. With `with_offsets == false` the offsets (and fills) are 0.
CupState new_game(const GameConfig& config, bool with_offsets = true);

std::optional<FillViolation> validate_fill_move(const FillMove& move, const GameConfig& config);

/// Pours `move`, then removes one unit from each cup in `decision`, then
/// applies h-truncation. Throws RuleViolation (and leaves `state` untouched)
/// if the move is invalid or the decision is illegal for the post-pour state.
StepEffects apply_step(CupState& state, const FillMove& move, const EmptyDecision& decision, const GameConfig& config);

/// Every fill replaced by fill mod 1.
CupState fractional_reset(const CupState& state);

class FillIndex;

namespace detail {

void check_fill_move(const FillMove& move, const GameConfig& config);
/// Checks `decision` against fills after `move` lands.
void check_decision(const CupState& state, const FillMove& pending, const EmptyDecision& decision,
                    const GameConfig& config);
void pour(CupState& state, const FillMove& move, FillIndex* index, StepEffects& effects);
void remove_units(CupState& state, const EmptyDecision& decision, FillIndex* index);
void truncate(CupState& state, const FillMove& move, std::int64_t h, FillIndex* index, StepEffects& effects);

}  // namespace detail

}  // namespace cupgame
