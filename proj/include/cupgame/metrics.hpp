#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cupgame/engine.hpp"
#include "cupgame/score.hpp"

namespace cupgame {

/// Fill values a metric sees: bookkeeping fills, or max(0, fill - offset).
std::vector<Rational> fills_for_metrics(const CupState& state, bool true_fill);

Rational backlog(std::span<const Rational> fills);
inline Rational backlog(const CupState& state) { return backlog(state.fills); }

/// |{j : fill_j >= c}|.
std::uint32_t tail_size(std::span<const Rational> fills, const Rational& c = 2);
inline std::uint32_t tail_size(const CupState& state, const Rational& c = 2) { return tail_size(state.fills, c); }

struct NormValue {
  std::optional<Rational> exact;  // set for p = 1 and p = infinity
  double approx = 0;
};
/// (sum max(f - c, 0)^p)^(1/p); p_exp = nullopt means infinity.
NormValue shifted_lp_norm(std::span<const Rational> fills, const Rational& c, std::optional<std::uint32_t> p_exp);

/// c_j(I): water placed into each cup over a step interval.
class IntervalFillLog {
 public:
  explicit IntervalFillLog(std::uint32_t n) : amounts_(n) {}
  IntervalFillLog(std::vector<Rational> amounts) : amounts_(std::move(amounts)) {}  // NOLINT(implicit)

  /// Log of steps [t1, t2] of a full trace.
  static IntervalFillLog from_trace(const Trace& trace, std::uint64_t t1, std::uint64_t t2);

  void add(const FillMove& move);
  /// Concatenation with an adjacent interval.
  IntervalFillLog& operator+=(const IntervalFillLog& other);

  const std::vector<Rational>& amounts() const noexcept { return amounts_; }

 private:
  std::vector<Rational> amounts_;
};

/// sum_j min(1, c_j(I)).
Rational influence(const IntervalFillLog& log);

/// Thresholds crossed by `cup` during steps [t1, t2] of a full trace.
std::uint64_t crossing_count(const Trace& trace, std::uint64_t t1, std::uint64_t t2, CupId cup);

/// Queued cups per priority level 1..q (index level - 1).
std::vector<std::uint64_t> queued_by_level(const CupState& state, std::uint32_t q);

/// Every cup of S has fill >= 1 (vacuously true for S empty).
bool fully_queued(const CupState& state, std::span<const CupId> cups);

/// Steps where fewer than p cups were emptied (for p = 1: skips).
std::vector<std::uint64_t> rest_steps(const Trace& trace);
/// Number of length-`window` step windows with no rest step.
std::uint64_t rest_free_windows(const Trace& trace, std::uint64_t window);

/// Skipped steps, or steps whose emptied cup carries a label outside the
/// active prefix.
bool is_wasted(const StepRecord& record, const std::function<std::uint32_t(CupId)>& label_of);
/// Wasted-step count for each phase id. Throws Error if a record lacks an
/// active-prefix tag.
std::map<std::uint64_t, std::uint64_t> wasted_steps(const std::vector<StepRecord>& records,
                                                    const std::function<std::uint32_t(CupId)>& label_of);

struct BolusVariation {
  Rational bolus;
  Rational variation;
  Rational m;
  std::vector<Rational> equilibrium;
};
/// `fills` are cups 1..l+1 in label order and `score` their score functions.
/// E = equilibrium(score, l+1, m+1) with m = sum of fills.
BolusVariation bolus_and_variation(const std::vector<Rational>& fills, const ScoreFunction& score);

/// First step at which two traces' emptier decisions differ, and how many do.
struct Divergence {
  std::optional<std::uint64_t> first_step;
  std::uint64_t differing_steps = 0;
};
Divergence twin_divergence(const Trace& a, const Trace& b);

// Streaming observers.

class MaxTracker : public Observer {
 public:
  void on_start(const CupState& state, const FillIndex& index, const GameConfig& config) override;
  void on_step(const StepContext& ctx) override;

  Rational max_backlog;
  std::uint32_t max_tail = 0;
  std::uint64_t max_queue = 0;
};

class RestWindowMonitor : public Observer {
 public:
  explicit RestWindowMonitor(std::uint64_t window) : window_(window) {}
  void on_step(const StepContext& ctx) override;

  std::uint64_t violations() const noexcept { return violations_; }
  std::uint64_t longest_run() const noexcept { return longest_; }
  std::uint64_t rest_count() const noexcept { return rests_; }

 private:
  std::uint64_t window_;
  std::uint64_t run_ = 0;
  std::uint64_t longest_ = 0;
  std::uint64_t violations_ = 0;
  std::uint64_t rests_ = 0;
};

/// Counts steps at which every cup of a fixed set is queued.
class ProbeMonitor : public Observer {
 public:
  explicit ProbeMonitor(std::vector<CupId> cups, std::vector<std::uint64_t> only_steps = {});
  void on_start(const CupState& state, const FillIndex& index, const GameConfig& config) override;
  void on_step(const StepContext& ctx) override;

  std::uint64_t fully_queued_steps() const noexcept { return hits_; }
  std::uint64_t checked_steps() const noexcept { return checked_; }
  std::uint32_t max_queued() const noexcept { return max_queued_; }

 private:
  void refresh(const CupState& state, CupId cup);

  std::vector<CupId> cups_;
  std::vector<std::uint64_t> only_;  // sorted; empty = every step
  std::size_t next_only_ = 0;
  std::vector<std::int8_t> member_;  // -1 not in S, else queued flag
  std::uint32_t queued_ = 0;
  std::uint32_t max_queued_ = 0;
  std::uint64_t hits_ = 0;
  std::uint64_t checked_ = 0;
  std::uint32_t distinct_ = 0;
};

class WastedStepCounter : public Observer {
 public:
  void on_step(const StepContext& ctx) override;
  /// Phase id -> (steps seen, wasted steps).
  const std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>>& per_phase() const noexcept {
    return phases_;
  }
  /// Phase id -> active prefix size.
  const std::map<std::uint64_t, std::uint32_t>& active() const noexcept { return active_; }

 private:
  std::map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> phases_;
  std::map<std::uint64_t, std::uint32_t> active_;
};

/// Fills in label order at the start of each phase of a fixed-length phase
/// schedule (phase 1 starts at step 0).
class PhaseStartRecorder : public Observer {
 public:
  explicit PhaseStartRecorder(std::uint64_t phase_len) : phase_len_(phase_len) {}
  void on_start(const CupState& state, const FillIndex& index, const GameConfig& config) override;
  void on_step(const StepContext& ctx) override;

  const std::vector<std::vector<Rational>>& starts() const noexcept { return starts_; }

 private:
  std::uint64_t phase_len_;
  std::vector<std::vector<Rational>> starts_;
  bool first_seen_ = false;
  std::vector<Rational> initial_;
};

/// After any step with tail_size >= threshold, watches the next `span` steps
/// for a cup leaving the queued set.
class QueueMonotonicityMonitor : public Observer {
 public:
  QueueMonotonicityMonitor(std::uint32_t threshold, std::uint64_t span) : threshold_(threshold), span_(span) {}
  void on_step(const StepContext& ctx) override;

  std::uint64_t windows() const noexcept { return windows_; }
  std::uint64_t violations() const noexcept { return violations_; }

 private:
  std::uint32_t threshold_;
  std::uint64_t span_;
  std::uint64_t remaining_ = 0;
  std::uint64_t windows_ = 0;
  std::uint64_t violations_ = 0;
};

/// Thresholds crossed per cup during steps [t1, t2].
class CrossingTally : public Observer {
 public:
  CrossingTally(std::uint32_t n, std::uint64_t t1, std::uint64_t t2) : counts_(n), t1_(t1), t2_(t2) {}
  void on_step(const StepContext& ctx) override;
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t t1_, t2_;
};

struct Sample {
  std::uint64_t step = 0;
  std::string metric;
  Rational value;
};

/// Sampled metric series. Known metrics: backlog, tail_size, queue_size,
/// queued, rest, wasted, levels (one "level_<i>" series per priority level).
class SeriesSampler : public Observer {
 public:
  SeriesSampler(std::vector<std::string> metrics, std::uint64_t stride, bool true_fill = false,
                std::optional<std::uint32_t> levels = std::nullopt);
  void on_start(const CupState& state, const FillIndex& index, const GameConfig& config) override;
  void on_step(const StepContext& ctx) override;

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  static const std::vector<std::string>& known_metrics();

 private:
  std::vector<std::string> metrics_;
  std::uint64_t stride_;
  bool true_fill_;
  std::optional<std::uint32_t> levels_;
  std::uint32_t q_ = 2;
  std::vector<Sample> samples_;
};

}  // namespace cupgame
