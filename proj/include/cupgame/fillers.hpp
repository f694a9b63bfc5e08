#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cupgame/engine.hpp"
#include "cupgame/rng.hpp"

namespace cupgame {

// e^{-c} and e^{c} to 64 fractional bits, exact roundings of the true values.
Rational exp_neg_upper(std::uint32_t c);  // ceil(2^64 e^{-c}) / 2^64
Rational exp_neg_lower(std::uint32_t c);  // floor(2^64 e^{-c}) / 2^64
/// ceil(c * e^c).
std::uint64_t ceil_c_exp_c(std::uint32_t c);

struct PkcParams {
  std::uint32_t p = 1;
  std::uint32_t k = 1;
  std::uint32_t c = 2;
  /// Overrides the step count t; the k - p t >= p guard still applies.
  std::optional<std::uint64_t> steps;
};

/// t = floor((k/p)(1 - e^{-c})) - 1 with e^{-c} rounded up, or params.steps.
std::uint64_t pkc_step_count(const PkcParams& params);
/// Sum over r = 1..i of p / (k - p(r - 1)).
Rational pkc_fill_after(std::uint32_t p, std::uint32_t k, std::uint64_t i);
/// Throws ConfigError unless k <= n, p <= k, c >= 2 (c >= 1 when relaxed),
/// k e^{-c} >= 2p, t >= 1 and k - p t >= p.
void validate_pkc(const PkcParams& params, std::uint32_t n, bool relaxed = true);

/// One run of the (p, k, c) strategy over an explicit label set.
class PkcRound {
 public:
  PkcRound() = default;
  PkcRound(const PkcParams& params, std::vector<CupId> initial);

  bool done() const noexcept { return taken_ >= steps_; }
  std::uint64_t steps() const noexcept { return steps_; }
  std::uint64_t taken() const noexcept { return taken_; }
  /// S_{i+1} after i steps: the cups the next step fills, or the survivors.
  const std::vector<CupId>& active() const noexcept { return active_; }
  /// p / (k - p i) for the next step.
  Rational amount() const;
  /// Records that the next step was played, then drops p cups from the set:
  /// first any of `touched` that are present, then uniformly random ones.
  void advance(Xoshiro256ss& rng, const std::vector<CupId>& touched = {});

 private:
  PkcParams params_{};
  std::uint64_t steps_ = 0;
  std::uint64_t taken_ = 0;
  std::vector<CupId> active_;
};

/// Oblivious (p, k, c) schedule, repeated `rounds` times (0 = forever). Each
/// round fills cups 0..k-1 ("prefix") or a fresh random k-subset ("random").
class PkcSchedule : public FillSchedule {
 public:
  enum class Subset { prefix, random };

  PkcSchedule(const PkcParams& params, const GameConfig& config, std::uint64_t rounds, Subset subset,
              std::uint64_t seed);

  FillMove next(std::uint64_t step) override;
  std::optional<PhaseTag> phase_tag() const override { return tag_; }
  ojson describe() const override;

  const PkcRound& round() const noexcept { return round_; }

 protected:
  /// Oblivious play drops random cups right away.
  virtual void after_move() {
    round_.advance(rng_);
    pending_ = false;
  }
  bool start_round_if_needed();

  PkcParams params_;
  std::uint32_t n_;
  Rational scale_;
  std::uint64_t rounds_;
  Subset subset_;
  Xoshiro256ss rng_;
  PkcRound round_;
  std::uint64_t round_index_ = 0;
  std::optional<PhaseTag> tag_;
  bool pending_ = false;
};

/// The same amounts, but each S_{i+1} drops exactly the cups the
/// (deterministic) emptier touched, padded with random ones.
class ClairvoyantPkc : public PkcSchedule {
 public:
  using PkcSchedule::PkcSchedule;

  Capability capability() const noexcept override { return Capability::adaptive_simulated; }
  void observe_emptier(const EmptyDecision& decision) override;
  ojson describe() const override;

 protected:
  void after_move() override {}
};

struct TailAmplifierParams {
  Rational c1 = 2;
  /// f(n) = coeff * n^degree bounds the emptier's backlog.
  std::uint64_t coeff = 1;
  std::uint32_t degree = 1;
  /// Optional cap on every w_i, for desk-scale runs.
  std::optional<std::uint64_t> max_w;
  /// Use the emptier's decisions to pick the swap target (deterministic
  /// emptiers only).
  bool adaptive = false;
};

/// p - 1 phases; phase i plays w_i mini-phases, then swaps label i with the
/// inner strategy's surviving cup.
class TailAmplifier : public FillSchedule {
 public:
  TailAmplifier(const TailAmplifierParams& params, const GameConfig& config, std::uint64_t seed);

  Capability capability() const noexcept override {
    return params_.adaptive ? Capability::adaptive_simulated : Capability::oblivious;
  }
  FillMove next(std::uint64_t step) override;
  std::optional<PhaseTag> phase_tag() const override { return tag_; }
  std::uint32_t label_of(CupId cup) const override { return label_of_[cup]; }
  void observe_emptier(const EmptyDecision& decision) override;
  ojson describe() const override;
  ojson annotations() const override;

  std::uint32_t c() const noexcept { return c_; }
  std::uint32_t inner_k() const noexcept { return inner_.k; }
  std::uint64_t inner_steps() const noexcept { return inner_steps_; }
  const std::vector<std::uint64_t>& w() const noexcept { return w_; }
  /// Physical cup at each label.
  const std::vector<CupId>& cup_at_label() const noexcept { return cup_at_label_; }
  /// Physical cups swapped into labels 0..p-2, one per finished phase.
  const std::vector<CupId>& swapped_in() const noexcept { return swapped_in_; }
  bool finished() const noexcept { return phase_ > p_ - 1; }

 private:
  void begin_mini_phase();
  void finish_step();

  TailAmplifierParams params_;
  std::uint32_t n_, p_;
  Rational scale_;
  std::uint32_t c_;
  PkcParams inner_;
  std::uint64_t inner_steps_;
  Xoshiro256ss rng_;
  std::vector<std::uint64_t> w_;
  std::vector<CupId> cup_at_label_;
  std::vector<std::uint32_t> label_of_;
  std::vector<CupId> swapped_in_;

  std::uint32_t phase_ = 1;
  std::uint64_t mini_ = 0;        // mini-phases started in this phase
  std::uint64_t phase_step_ = 0;  // steps played in this phase
  PkcRound round_;
  bool in_round_ = false;
  bool pending_ = false;
  std::vector<CupId> touched_;
  std::optional<PhaseTag> tag_;
};

/// n phases; the i-th uses the first n - i + 1 labels of a random relabeling.
/// Each step pours `unit` into each of two uniform draws from that prefix.
class FuzzingSchedule : public FillSchedule {
 public:
  FuzzingSchedule(std::uint32_t n, std::uint64_t phase_len, const Rational& unit, const GameConfig& config,
                  std::uint64_t seed);

  FillMove next(std::uint64_t step) override;
  std::optional<PhaseTag> phase_tag() const override { return tag_; }
  std::uint32_t label_of(CupId cup) const override { return label_of_[cup]; }
  ojson describe() const override;

  std::uint64_t phase_len() const noexcept { return phase_len_; }
  const std::vector<CupId>& cup_at_label() const noexcept { return cup_at_label_; }
  /// (x1, x2) label draws of the last move.
  std::pair<std::uint32_t, std::uint32_t> last_draws() const noexcept { return draws_; }

 private:
  std::uint32_t n_;
  std::uint64_t phase_len_;
  Rational unit_;
  Xoshiro256ss rng_;
  std::vector<CupId> cup_at_label_;
  std::vector<std::uint32_t> label_of_;
  std::pair<std::uint32_t, std::uint32_t> draws_{0, 0};
  std::optional<PhaseTag> tag_;
};

/// Plays `base` for t steps, then one unit into each of cups 0..cR-1, p cups
/// per step, over ceil(cR/p) steps. With repeat_every = r the attack window
/// reopens at steps t + r, t + 2r, ... and `base` resumes in between.
class UnpredictabilityAttack : public FillSchedule {
 public:
  UnpredictabilityAttack(std::unique_ptr<FillSchedule> base, std::uint64_t t, std::uint64_t R, std::uint64_t c,
                         const GameConfig& config, std::optional<std::uint64_t> repeat_every = std::nullopt);

  Capability capability() const noexcept override { return base_->capability(); }
  FillMove next(std::uint64_t step) override;
  std::optional<PhaseTag> phase_tag() const override { return tag_; }
  std::uint32_t label_of(CupId cup) const override { return base_->label_of(cup); }
  void observe_emptier(const EmptyDecision& decision) override;
  ojson describe() const override;
  ojson annotations() const override;

  std::uint64_t attack_len() const noexcept { return len_; }
  std::vector<CupId> probe_set() const;
  /// Probe steps (end of each attack window) up to `horizon`.
  std::vector<std::uint64_t> probe_steps(std::uint64_t horizon) const;

 private:
  std::unique_ptr<FillSchedule> base_;
  std::uint64_t t_, R_, c_, set_size_, len_;
  std::uint32_t p_;
  Rational unit_;
  std::optional<std::uint64_t> every_;
  std::uint64_t base_steps_ = 0;
  bool last_was_base_ = false;
  std::optional<PhaseTag> tag_;
};

/// Calibration fillers. `amount` is per cup per step (default 1 - epsilon).
class BaselineSchedule : public FillSchedule {
 public:
  enum class Kind { uniform, single_cup, round_robin };

  BaselineSchedule(Kind kind, const GameConfig& config, std::uint64_t seed,
                   std::optional<Rational> amount = std::nullopt);

  FillMove next(std::uint64_t step) override;
  ojson describe() const override;

 private:
  Kind kind_;
  std::uint32_t n_, p_;
  Rational amount_;
  Xoshiro256ss rng_;
};

const char* baseline_name(BaselineSchedule::Kind kind);

}  // namespace cupgame
