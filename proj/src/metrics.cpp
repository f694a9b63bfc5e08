#include "cupgame/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cupgame/emptiers.hpp"

namespace cupgame {

std::vector<Rational> fills_for_metrics(const CupState& state, bool true_fill) {
  if (!true_fill) return state.fills;
  std::vector<Rational> out(state.size());
  for (CupId j = 0; j < state.size(); ++j) out[j] = state.true_fill(j);
  return out;
}

Rational backlog(std::span<const Rational> fills) {
  Rational best;
  for (const auto& f : fills) {
    if (f > best) best = f;
  }
  return best;
}

std::uint32_t tail_size(std::span<const Rational> fills, const Rational& c) {
  std::uint32_t count = 0;
  for (const auto& f : fills) count += f >= c ? 1 : 0;
  return count;
}

NormValue shifted_lp_norm(std::span<const Rational> fills, const Rational& c, std::optional<std::uint32_t> p_exp) {
  if (c.is_negative()) throw ConfigError("shift must be non-negative", "c");
  if (p_exp && *p_exp == 0) throw ConfigError("must be >= 1", "p");
  NormValue out;
  if (!p_exp || *p_exp == 1) {
    Rational acc;
    for (const auto& f : fills) {
      if (f <= c) continue;
      const Rational excess = f - c;
      if (!p_exp) {
        if (excess > acc) acc = excess;
      } else {
        acc += excess;
      }
    }
    out.exact = acc;
    out.approx = acc.to_double();
    return out;
  }
  const double p = *p_exp;
  double sum = 0;
  for (const auto& f : fills) {
    if (f <= c) continue;
    sum += std::pow((f - c).to_double(), p);
  }
  out.approx = std::pow(sum, 1.0 / p);
  return out;
}

IntervalFillLog IntervalFillLog::from_trace(const Trace& trace, std::uint64_t t1, std::uint64_t t2) {
  if (t1 < 1 || t2 < t1 || t2 > trace.records.size()) {
    throw Error("interval [" + std::to_string(t1) + ", " + std::to_string(t2) + "] outside the trace");
  }
  IntervalFillLog log(trace.final_state.size());
  for (std::uint64_t t = t1; t <= t2; ++t) log.add(trace.records[t - 1].move);
  return log;
}

void IntervalFillLog::add(const FillMove& move) {
  for (const auto& pl : move.placements()) amounts_[pl.cup] += pl.amount;
}

IntervalFillLog& IntervalFillLog::operator+=(const IntervalFillLog& other) {
  if (other.amounts_.size() != amounts_.size()) throw Error("interval logs over different cup counts");
  for (std::size_t j = 0; j < amounts_.size(); ++j) amounts_[j] += other.amounts_[j];
  return *this;
}

Rational influence(const IntervalFillLog& log) {
  Rational sum;
  for (const auto& c : log.amounts()) sum += c < 1 ? c : Rational(1);
  return sum;
}

std::uint64_t crossing_count(const Trace& trace, std::uint64_t t1, std::uint64_t t2, CupId cup) {
  if (t1 < 1 || t2 < t1 || t2 > trace.records.size()) {
    throw Error("interval [" + std::to_string(t1) + ", " + std::to_string(t2) + "] outside the trace");
  }
  std::uint64_t count = 0;
  for (std::uint64_t t = t1; t <= t2; ++t) {
    for (const auto& [c, k] : trace.records[t - 1].effects.crossings) {
      if (c == cup) count += k;
    }
  }
  return count;
}

std::vector<std::uint64_t> queued_by_level(const CupState& state, std::uint32_t q) {
  if (q == 0) throw ConfigError("must be >= 1", "q");
  std::vector<std::uint64_t> counts(q);
  for (CupId j = 0; j < state.size(); ++j) {
    if (state.fills[j] >= 1) ++counts[priority_level(state.priorities[j], q) - 1];
  }
  return counts;
}

bool fully_queued(const CupState& state, std::span<const CupId> cups) {
  return std::all_of(cups.begin(), cups.end(), [&](CupId j) { return state.fills.at(j) >= 1; });
}

std::vector<std::uint64_t> rest_steps(const Trace& trace) {
  std::vector<std::uint64_t> out;
  for (const auto& r : trace.records) {
    if (r.rest) out.push_back(r.step);
  }
  return out;
}

std::uint64_t rest_free_windows(const Trace& trace, std::uint64_t window) {
  if (window == 0) throw ConfigError("must be >= 1", "window");
  std::uint64_t run = 0;
  std::uint64_t count = 0;
  for (const auto& r : trace.records) {
    run = r.rest ? 0 : run + 1;
    if (run >= window) ++count;
  }
  return count;
}

bool is_wasted(const StepRecord& record, const std::function<std::uint32_t(CupId)>& label_of) {
  if (!record.phase || !record.phase->active) {
    throw Error("step " + std::to_string(record.step) + " has no active-prefix annotation");
  }
  if (record.emptied.skip()) return true;
  const std::uint32_t active = *record.phase->active;
  return std::none_of(record.emptied.cups.begin(), record.emptied.cups.end(),
                      [&](CupId cup) { return label_of(cup) < active; });
}

std::map<std::uint64_t, std::uint64_t> wasted_steps(const std::vector<StepRecord>& records,
                                                    const std::function<std::uint32_t(CupId)>& label_of) {
  std::map<std::uint64_t, std::uint64_t> out;
  for (const auto& r : records) {
    const bool wasted = is_wasted(r, label_of);
    out[r.phase->phase] += wasted ? 1 : 0;
  }
  return out;
}

BolusVariation bolus_and_variation(const std::vector<Rational>& fills, const ScoreFunction& score) {
  if (fills.empty()) throw ConfigError("need at least one cup", "fills");
  if (fills.size() != score.size()) throw ConfigError("score and fills differ in size", "score");
  BolusVariation out;
  for (CupId j = 0; j < fills.size(); ++j) {
    if (!fills[j].is_half_integral() || fills[j].is_negative()) {
      throw RuleViolation(Rule::fill_not_half_integral, "cup " + std::to_string(j) + " holds " + fills[j].str());
    }
    out.m += fills[j];
  }
  out.equilibrium = equilibrium(score, static_cast<std::uint32_t>(fills.size()), out.m + 1);
  const Rational excess = fills.back() - out.equilibrium.back();
  out.bolus = excess.is_negative() ? Rational(0) : excess;
  for (std::size_t j = 0; j < fills.size(); ++j) out.variation += abs(fills[j] - out.equilibrium[j]);
  return out;
}

Divergence twin_divergence(const Trace& a, const Trace& b) {
  Divergence d;
  const std::size_t n = std::min(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.records[i].emptied == b.records[i].emptied) continue;
    if (!d.first_step) d.first_step = a.records[i].step;
    ++d.differing_steps;
  }
  const std::size_t extra = std::max(a.records.size(), b.records.size()) - n;
  if (extra > 0 && !d.first_step) d.first_step = n + 1;
  d.differing_steps += extra;
  return d;
}

void MaxTracker::on_start(const CupState& /*state*/, const FillIndex& index, const GameConfig& /*config*/) {
  max_backlog = index.max_fill();
  max_tail = index.tail_size();
  max_queue = index.queue_size();
}

void MaxTracker::on_step(const StepContext& ctx) {
  if (ctx.record.backlog > max_backlog) max_backlog = ctx.record.backlog;
  max_tail = std::max(max_tail, ctx.record.tail);
  max_queue = std::max(max_queue, ctx.record.queue);
}

void RestWindowMonitor::on_step(const StepContext& ctx) {
  if (ctx.record.rest) {
    ++rests_;
    run_ = 0;
    return;
  }
  ++run_;
  longest_ = std::max(longest_, run_);
  if (run_ >= window_) ++violations_;
}

ProbeMonitor::ProbeMonitor(std::vector<CupId> cups, std::vector<std::uint64_t> only_steps)
    : cups_(std::move(cups)), only_(std::move(only_steps)) {
  std::sort(only_.begin(), only_.end());
}

void ProbeMonitor::refresh(const CupState& state, CupId cup) {
  std::int8_t& flag = member_[cup];
  if (flag < 0) return;
  const std::int8_t now = state.fills[cup] >= 1 ? 1 : 0;
  if (now == flag) return;
  queued_ += now ? 1 : -1;
  flag = now;
}

void ProbeMonitor::on_start(const CupState& state, const FillIndex& /*index*/, const GameConfig& /*config*/) {
  member_.assign(state.size(), -1);
  queued_ = 0;
  distinct_ = 0;
  for (const CupId c : cups_) {
    if (c >= state.size()) throw ConfigError("probe cup " + std::to_string(c) + " out of range", "probe");
    if (member_[c] >= 0) continue;
    member_[c] = 0;
    ++distinct_;
    refresh(state, c);
  }
}

void ProbeMonitor::on_step(const StepContext& ctx) {
  for (const auto& pl : ctx.record.move.placements()) refresh(ctx.state, pl.cup);
  for (const CupId c : ctx.record.emptied.cups) refresh(ctx.state, c);
  for (const auto& tr : ctx.record.effects.truncations) refresh(ctx.state, tr.first);
  max_queued_ = std::max(max_queued_, queued_);
  if (!only_.empty()) {
    while (next_only_ < only_.size() && only_[next_only_] < ctx.record.step) ++next_only_;
    if (next_only_ == only_.size() || only_[next_only_] != ctx.record.step) return;
  }
  ++checked_;
  if (queued_ == distinct_) ++hits_;
}

void WastedStepCounter::on_step(const StepContext& ctx) {
  if (!ctx.record.phase || !ctx.record.phase->active) return;
  auto& slot = phases_[ctx.record.phase->phase];
  ++slot.first;
  if (is_wasted(ctx.record, [&](CupId c) { return ctx.filler.label_of(c); })) ++slot.second;
  active_[ctx.record.phase->phase] = *ctx.record.phase->active;
}

namespace {

std::vector<Rational> label_order(const CupState& state, const FillSchedule& filler) {
  std::vector<Rational> out(state.size());
  for (CupId j = 0; j < state.size(); ++j) out[filler.label_of(j)] = state.fills[j];
  return out;
}

}  // namespace

void PhaseStartRecorder::on_start(const CupState& state, const FillIndex& /*index*/, const GameConfig& /*config*/) {
  starts_.clear();
  first_seen_ = false;
  initial_ = state.fills;
}

void PhaseStartRecorder::on_step(const StepContext& ctx) {
  if (!first_seen_) {
    // Labels become known with the filler; map the initial fills now.
    std::vector<Rational> start(initial_.size());
    for (CupId j = 0; j < initial_.size(); ++j) start[ctx.filler.label_of(j)] = initial_[j];
    starts_.push_back(std::move(start));
    first_seen_ = true;
  }
  if (ctx.record.step % phase_len_ == 0) starts_.push_back(label_order(ctx.state, ctx.filler));
}

void QueueMonotonicityMonitor::on_step(const StepContext& ctx) {
  if (remaining_ > 0) {
    --remaining_;
    auto check = [&](CupId cup) {
      const Rational& post = ctx.state.fills[cup];
      if (post >= 1) return;
      Rational pre = post - ctx.record.move.amount(cup);
      for (const CupId c : ctx.record.emptied.cups) pre += c == cup ? 1 : 0;
      for (const auto& [c, k] : ctx.record.effects.truncations) {
        if (c == cup) pre += Rational(static_cast<std::int64_t>(k));
      }
      if (pre >= 1) ++violations_;
    };
    for (const CupId c : ctx.record.emptied.cups) check(c);
  }
  if (ctx.record.tail >= threshold_) {
    if (remaining_ == 0) ++windows_;
    remaining_ = span_;
  }
}

void CrossingTally::on_step(const StepContext& ctx) {
  if (ctx.record.step < t1_ || ctx.record.step > t2_) return;
  for (const auto& [c, k] : ctx.record.effects.crossings) counts_[c] += k;
}

const std::vector<std::string>& SeriesSampler::known_metrics() {
  static const std::vector<std::string> names = {"backlog", "tail_size", "queue_size", "queued",
                                                 "rest",    "wasted",    "levels"};
  return names;
}

SeriesSampler::SeriesSampler(std::vector<std::string> metrics, std::uint64_t stride, bool true_fill,
                             std::optional<std::uint32_t> levels)
    : metrics_(std::move(metrics)), stride_(stride), true_fill_(true_fill), levels_(levels) {
  if (stride_ == 0) throw ConfigError("must be >= 1", "sample_stride");
  for (const auto& m : metrics_) {
    const auto& known = known_metrics();
    if (std::find(known.begin(), known.end(), m) == known.end()) throw ConfigError("unknown metric '" + m + "'", "metrics");
  }
}

void SeriesSampler::on_start(const CupState& state, const FillIndex& /*index*/, const GameConfig& /*config*/) {
  samples_.clear();
  q_ = levels_ ? *levels_ : default_level_count(state.size());
}

void SeriesSampler::on_step(const StepContext& ctx) {
  const std::uint64_t t = ctx.record.step;
  if (t % stride_ != 0) return;
  std::vector<Rational> fills;
  if (true_fill_) fills = fills_for_metrics(ctx.state, true);
  for (const auto& m : metrics_) {
    if (m == "backlog") {
      samples_.push_back({t, m, true_fill_ ? backlog(fills) : ctx.record.backlog});
    } else if (m == "tail_size") {
      samples_.push_back({t, m, Rational(true_fill_ ? tail_size(fills) : ctx.record.tail)});
    } else if (m == "queue_size") {
      samples_.push_back({t, m, Rational(static_cast<std::int64_t>(ctx.record.queue))});
    } else if (m == "queued") {
      samples_.push_back({t, m, Rational(ctx.index.queued_count())});
    } else if (m == "rest") {
      samples_.push_back({t, m, Rational(ctx.record.rest ? 1 : 0)});
    } else if (m == "wasted") {
      if (ctx.record.phase && ctx.record.phase->active) {
        const bool w = is_wasted(ctx.record, [&](CupId c) { return ctx.filler.label_of(c); });
        samples_.push_back({t, m, Rational(w ? 1 : 0)});
      }
    } else if (m == "levels") {
      const auto counts = queued_by_level(ctx.state, q_);
      for (std::uint32_t l = 0; l < q_; ++l) {
        samples_.push_back({t, "level_" + std::to_string(l + 1), Rational(static_cast<std::int64_t>(counts[l]))});
      }
    }
  }
}

}  // namespace cupgame
