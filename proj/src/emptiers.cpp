#include "cupgame/emptiers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace cupgame {

ThresholdQueue queue_view(const CupState& state) {
  ThresholdQueue q;
  for (CupId j = 0; j < state.size(); ++j) {
    const std::int64_t whole = state.fills[j].floor();
    if (whole < 1) continue;
    q.queued.push_back(j);
    for (std::int64_t i = 1; i <= whole; ++i) q.thresholds.push_back(Threshold{j, static_cast<std::uint32_t>(i)});
  }
  return q;
}

namespace {

std::vector<CupId> fullest_order(const CupState& state) {
  std::vector<CupId> order(state.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](CupId a, CupId b) { return state.fills[a] > state.fills[b]; });
  return order;
}

}  // namespace

EmptyDecision greedy_select(const CupState& state, std::uint32_t p) {
  EmptyDecision d;
  for (const CupId cup : fullest_order(state)) {
    if (d.cups.size() == p || state.fills[cup] < 1) break;
    d.cups.push_back(cup);
  }
  return d;
}

EmptyDecision asymmetric_select(const CupState& state, std::uint32_t p) {
  EmptyDecision d;
  for (const CupId cup : fullest_order(state)) {
    if (d.cups.size() == p || state.fills[cup] < 2) break;
    d.cups.push_back(cup);
  }
  if (d.cups.size() == p) return d;
  for (const CupId cup : cups_by_priority(state)) {
    if (d.cups.size() == p) break;
    const Rational& f = state.fills[cup];
    if (f >= 1 && f < 2) d.cups.push_back(cup);
  }
  return d;
}

EmptyDecision greedy_select(const FillIndex& index, std::uint32_t p) {
  EmptyDecision d;
  for (const auto& entry : index.by_fill()) {
    if (d.cups.size() == p || entry.fill < 1) break;
    d.cups.push_back(entry.cup);
  }
  return d;
}

EmptyDecision asymmetric_select(const FillIndex& index, std::uint32_t p) {
  EmptyDecision d;
  if (index.tail_size() > 0) {
    for (const auto& entry : index.by_fill()) {
      if (d.cups.size() == p || entry.fill < 2) break;
      d.cups.push_back(entry.cup);
    }
  }
  for (const std::uint32_t rank : index.light_ranks()) {
    if (d.cups.size() == p) break;
    d.cups.push_back(index.cup_at_rank(rank));
  }
  return d;
}

namespace {

bool multiple_of(const Rational& x, const Rational& granule) { return (x / granule).is_integer(); }

}  // namespace

CupId score_argmax(const ScoreFunction& score, std::span<const Rational> fills) {
  CupId best = 0;
  for (CupId j = 1; j < fills.size(); ++j) {
    if (score.compare(j, fills[j], best, fills[best]) > 0) best = j;
  }
  return best;
}

EmptyDecision score_select(const ScoreFunction& score, const CupState& state, const SkipRule& skip,
                           const Rational& granule) {
  if (score.size() != state.size()) throw ConfigError("score covers " + std::to_string(score.size()) + " cups, game has " +
                                                      std::to_string(state.size()), "score");
  const bool halves = granule == Rational::fraction(1, 2);
  for (CupId j = 0; j < state.size(); ++j) {
    const Rational& f = state.fills[j];
    if (halves ? !f.is_half_integral() : !multiple_of(f, granule)) {
      throw RuleViolation(Rule::fill_not_half_integral,
                          "cup " + std::to_string(j) + " holds " + f.str() + ", not a multiple of " + granule.str());
    }
  }
  EmptyDecision d;
  if (state.size() == 0) return d;
  const CupId best = score_argmax(score, state.fills);
  if (skip.removes(state.fills[best])) d.cups.push_back(best);
  return d;
}

EmptyDecision dynamic_score_select(const std::vector<ScoreFunction>& schedule, std::uint64_t t,
                                   const CupState& state, const SkipRule& skip, const Rational& granule) {
  if (schedule.empty()) throw ConfigError("empty score schedule", "schedule");
  if (t == 0) throw ConfigError("steps are 1-based", "t");
  return score_select(schedule[(t - 1) % schedule.size()], state, skip, granule);
}

std::uint32_t priority_level(const Rational& priority, std::uint32_t q) {
  const std::int64_t cell = (priority * Rational(static_cast<std::int64_t>(q))).floor();
  return static_cast<std::uint32_t>(std::clamp<std::int64_t>(cell, 0, q - 1)) + 1;
}

std::uint32_t default_level_count(std::uint32_t n) {
  if (n < 2) return 2;
  // ceil(log2 log2 n) computed from integer bit widths: log2 n <= 2^k iff n <= 2^(2^k).
  std::uint32_t k = 0;
  const double lg = std::log2(static_cast<double>(n));
  while (std::ldexp(1.0, static_cast<int>(k)) < lg) ++k;
  return std::max<std::uint32_t>(2, 4 * k);
}

EmptyDecision GreedyEmptier::select(const GameView& view) {
  if (use_index_) return greedy_select(view.index, view.config.p);
  return greedy_select(view.state, view.config.p);
}

ojson GreedyEmptier::describe() const {
  ojson out;
  out["kind"] = smoothed_ ? "smoothed" : "greedy";
  return out;
}

EmptyDecision AsymmetricEmptier::select(const GameView& view) {
  if (use_index_) return asymmetric_select(view.index, view.config.p);
  return asymmetric_select(view.state, view.config.p);
}

ojson AsymmetricEmptier::describe() const {
  ojson out;
  out["kind"] = "asymmetric";
  return out;
}

ScoreEmptier::ScoreEmptier(std::vector<ScoreFunction> schedule, SkipRule skip, Rational granule)
    : schedule_(std::move(schedule)), skip_(std::move(skip)), granule_(std::move(granule)) {
  if (schedule_.empty()) throw ConfigError("empty score schedule", "schedule");
}

void ScoreEmptier::validate(const GameConfig& config) const {
  if (config.p != 1) throw ConfigError("score-based emptiers are single-processor", "p");
  for (const auto& s : schedule_) {
    if (s.size() != config.n) throw ConfigError("score covers " + std::to_string(s.size()) + " cups, n = " +
                                                std::to_string(config.n), "score");
  }
  if (skip_.remove_at < 1) throw ConfigError("must be >= 1", "remove_at");
  if (granule_ <= 0) throw ConfigError("must be positive", "granule");
}

EmptyDecision ScoreEmptier::select(const GameView& view) {
  return dynamic_score_select(schedule_, view.step, view.state, skip_, granule_);
}

ojson ScoreEmptier::describe() const {
  ojson out;
  out["kind"] = schedule_.size() == 1 ? "score" : "dynamic_score";
  ojson sched = ojson::array();
  for (const auto& s : schedule_) sched.push_back(s.describe());
  out["schedule"] = std::move(sched);
  out["remove_at"] = skip_.remove_at.str();
  out["granule"] = granule_.str();
  return out;
}

}  // namespace cupgame
