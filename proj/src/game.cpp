#include "cupgame/game.hpp"

#include <algorithm>

#include "cupgame/fill_index.hpp"
#include "cupgame/rng.hpp"

namespace cupgame {

const char* rule_name(Rule rule) noexcept {
  switch (rule) {
    case Rule::budget_exceeded: return "BudgetExceeded";
    case Rule::per_cup_cap_exceeded: return "PerCupCapExceeded";
    case Rule::non_positive_placement: return "NonPositivePlacement";
    case Rule::cup_out_of_range: return "CupOutOfRange";
    case Rule::illegal_empty: return "IllegalEmpty";
    case Rule::duplicate_cup: return "DuplicateCup";
    case Rule::too_many_cups: return "TooManyCups";
    case Rule::fill_not_half_integral: return "FillNotHalfIntegral";
  }
  return "Unknown";
}

void GameConfig::validate() const {
  if (n == 0) throw ConfigError("must be positive", "n");
  if (p == 0) throw ConfigError("must be positive", "p");
  if (p > n) throw ConfigError("p = " + std::to_string(p) + " exceeds n = " + std::to_string(n), "p");
  if (epsilon.is_negative() || epsilon >= 1) throw ConfigError("must lie in [0, 1), got " + epsilon.str(), "epsilon");
  if (truncation_h && *truncation_h < 1) throw ConfigError("must be a positive integer", "truncation_h");
  if (snapshot_stride == 0) throw ConfigError("must be >= 1", "snapshot_stride");
}

Rational GameConfig::budget() const { return Rational(static_cast<std::int64_t>(p)) * (Rational(1) - epsilon); }

Rational CupState::true_fill(CupId cup) const {
  Rational water = fills[cup] - offsets[cup];
  return water.is_negative() ? Rational(0) : water;
}

FillMove::FillMove(std::initializer_list<Placement> placements) {
  for (const auto& pl : placements) add(pl.cup, pl.amount);
}

void FillMove::add(CupId cup, const Rational& amount) {
  auto it = std::lower_bound(placements_.begin(), placements_.end(), cup,
                             [](const Placement& pl, CupId c) { return pl.cup < c; });
  if (it != placements_.end() && it->cup == cup) {
    it->amount += amount;
  } else {
    placements_.insert(it, Placement{cup, amount});
  }
}

Rational FillMove::total() const {
  Rational sum;
  for (const auto& pl : placements_) sum += pl.amount;
  return sum;
}

Rational FillMove::amount(CupId cup) const {
  auto it = std::lower_bound(placements_.begin(), placements_.end(), cup,
                             [](const Placement& pl, CupId c) { return pl.cup < c; });
  if (it != placements_.end() && it->cup == cup) return it->amount;
  return 0;
}

std::string FillViolation::message() const {
  std::string where = cup ? "cup " + std::to_string(*cup) + " " : std::string();
  switch (rule) {
    case Rule::budget_exceeded: return "total " + amount.str() + " exceeds the step budget";
    case Rule::per_cup_cap_exceeded: return where + "receives " + amount.str() + " > 1";
    case Rule::non_positive_placement: return where + "receives non-positive amount " + amount.str();
    case Rule::cup_out_of_range: return where + "is out of range";
    default: return where + amount.str();
  }
}

CupState new_game(const GameConfig& config, bool with_offsets) {
  config.validate();
  CupState state;
  state.fills.resize(config.n);
  state.offsets.resize(config.n);
  state.priorities.resize(config.n);
  Xoshiro256ss offset_rng(config.seed, StreamRole::offsets, 0);
  Xoshiro256ss priority_rng(config.seed, StreamRole::priorities, 0);
  for (CupId j = 0; j < config.n; ++j) {
    state.offsets[j] = with_offsets ? offset_rng.unit_rational() : Rational(0);
    state.priorities[j] = priority_rng.unit_rational();
    state.fills[j] = state.offsets[j];
  }
  return state;
}

std::optional<FillViolation> validate_fill_move(const FillMove& move, const GameConfig& config) {
  Rational total;
  for (const auto& pl : move.placements()) {
    if (pl.cup >= config.n) return FillViolation{Rule::cup_out_of_range, pl.cup, pl.amount};
    if (pl.amount <= 0) return FillViolation{Rule::non_positive_placement, pl.cup, pl.amount};
    if (config.p > 1 && pl.amount > 1) return FillViolation{Rule::per_cup_cap_exceeded, pl.cup, pl.amount};
    total += pl.amount;
  }
  if (total > config.budget()) return FillViolation{Rule::budget_exceeded, std::nullopt, total};
  return std::nullopt;
}

namespace detail {

void check_fill_move(const FillMove& move, const GameConfig& config) {
  if (auto violation = validate_fill_move(move, config)) throw RuleViolation(violation->rule, violation->message());
}

void check_decision(const CupState& state, const FillMove& pending, const EmptyDecision& decision,
                    const GameConfig& config) {
  if (decision.cups.size() > config.p) {
    throw RuleViolation(Rule::too_many_cups, std::to_string(decision.cups.size()) + " cups selected with p = " +
                                                 std::to_string(config.p));
  }
  for (std::size_t i = 0; i < decision.cups.size(); ++i) {
    const CupId cup = decision.cups[i];
    if (cup >= state.size()) throw RuleViolation(Rule::cup_out_of_range, "cup " + std::to_string(cup));
    for (std::size_t k = 0; k < i; ++k) {
      if (decision.cups[k] == cup) throw RuleViolation(Rule::duplicate_cup, "cup " + std::to_string(cup));
    }
    const Rational after = state.fills[cup] + pending.amount(cup);
    if (after < 1) {
      throw RuleViolation(Rule::illegal_empty, "cup " + std::to_string(cup) + " holds " + after.str() + " < 1");
    }
  }
}

void pour(CupState& state, const FillMove& move, FillIndex* index, StepEffects& effects) {
  for (const auto& pl : move.placements()) {
    Rational& fill = state.fills[pl.cup];
    const Rational before = fill;
    fill += pl.amount;
    const std::int64_t crossed = fill.floor() - before.floor();
    if (crossed > 0) effects.crossings.emplace_back(pl.cup, static_cast<std::uint32_t>(crossed));
    if (index) index->update(pl.cup, before, fill);
  }
}

void remove_units(CupState& state, const EmptyDecision& decision, FillIndex* index) {
  for (const CupId cup : decision.cups) {
    Rational& fill = state.fills[cup];
    const Rational before = fill;
    fill -= 1;
    if (index) index->update(cup, before, fill);
  }
}

void truncate(CupState& state, const FillMove& move, std::int64_t h, FillIndex* index, StepEffects& effects) {
  const Rational cap(h);
  for (const auto& pl : move.placements()) {
    Rational& fill = state.fills[pl.cup];
    if (fill <= cap) continue;
    const Rational before = fill;
    // Smallest k with fill - k <= h.
    Rational excess = fill - cap;
    std::int64_t k = excess.floor();
    if (!excess.is_integer()) ++k;
    fill -= Rational(k);
    effects.truncations.emplace_back(pl.cup, static_cast<std::uint32_t>(k));
    if (index) index->update(pl.cup, before, fill);
  }
}

}  // namespace detail

StepEffects apply_step(CupState& state, const FillMove& move, const EmptyDecision& decision,
                       const GameConfig& config) {
  detail::check_fill_move(move, config);
  detail::check_decision(state, move, decision, config);
  StepEffects effects;
  detail::pour(state, move, nullptr, effects);
  detail::remove_units(state, decision, nullptr);
  if (config.truncation_h) detail::truncate(state, move, *config.truncation_h, nullptr, effects);
  ++state.step_index;
  return effects;
}

CupState fractional_reset(const CupState& state) {
  CupState out = state;
  for (auto& fill : out.fills) fill = fill.frac();
  return out;
}

}  // namespace cupgame
