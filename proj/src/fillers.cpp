#include "cupgame/fillers.hpp"

#include <algorithm>
#include <gmpxx.h>

namespace cupgame {

namespace {

struct ExpBounds {
  mpq_class lower;  // <= e^c
  mpq_class upper;  // >= e^c
};

// Partial sums of the series for e^c with a geometric tail bound.
ExpBounds exp_bounds(std::uint32_t c, std::uint32_t terms) {
  mpq_class sum = 0;
  mpq_class term = 1;
  for (std::uint32_t i = 0; i <= terms; ++i) {
    if (i > 0) term = term * c / i;
    sum += term;
  }
  const mpq_class next = term * c / (terms + 1);
  const mpq_class ratio(c, terms + 2);
  ExpBounds b;
  b.lower = sum;
  b.upper = sum + next / (1 - ratio);
  return b;
}

mpz_class ceil_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// 2^64 * x rounded (up or down) for x = 1/e^c, refined until both bounds agree.
mpz_class scaled_exp_neg(std::uint32_t c, bool up) {
  const mpz_class two64 = mpz_class(1) << 64;
  for (std::uint32_t terms = 2 * c + 8;; terms *= 2) {
    const ExpBounds b = exp_bounds(c, terms);
    // 1/upper <= e^{-c} <= 1/lower
    const mpz_class lo_num = two64 * b.upper.get_den();
    const mpz_class hi_num = two64 * b.lower.get_den();
    const mpz_class from_upper = up ? ceil_div(lo_num, b.upper.get_num()) : floor_div(lo_num, b.upper.get_num());
    const mpz_class from_lower = up ? ceil_div(hi_num, b.lower.get_num()) : floor_div(hi_num, b.lower.get_num());
    if (from_upper == from_lower) return from_upper;
  }
}

Rational over_two64(const mpz_class& k) { return Rational::parse(k.get_str() + "/18446744073709551616"); }

}  // namespace

Rational exp_neg_upper(std::uint32_t c) { return over_two64(scaled_exp_neg(c, true)); }
Rational exp_neg_lower(std::uint32_t c) { return over_two64(scaled_exp_neg(c, false)); }

std::uint64_t ceil_c_exp_c(std::uint32_t c) {
  for (std::uint32_t terms = 2 * c + 8;; terms *= 2) {
    const ExpBounds b = exp_bounds(c, terms);
    const mpq_class lo = b.lower * c;
    const mpq_class hi = b.upper * c;
    const mpz_class a = ceil_div(lo.get_num(), lo.get_den());
    const mpz_class z = ceil_div(hi.get_num(), hi.get_den());
    if (a == z) return a.get_ui();
  }
}

std::uint64_t pkc_step_count(const PkcParams& params) {
  if (params.steps) return *params.steps;
  if (params.p == 0) throw ConfigError("must be positive", "p");
  const Rational span = Rational(static_cast<std::int64_t>(params.k)) / Rational(static_cast<std::int64_t>(params.p)) *
                        (Rational(1) - exp_neg_upper(params.c));
  const std::int64_t t = span.floor() - 1;
  return t > 0 ? static_cast<std::uint64_t>(t) : 0;
}

Rational pkc_fill_after(std::uint32_t p, std::uint32_t k, std::uint64_t i) {
  Rational sum;
  for (std::uint64_t r = 1; r <= i; ++r) {
    sum += Rational::fraction(p, static_cast<std::int64_t>(k) - static_cast<std::int64_t>(p * (r - 1)));
  }
  return sum;
}

void validate_pkc(const PkcParams& params, std::uint32_t n, bool relaxed) {
  if (params.p == 0) throw ConfigError("must be positive", "p");
  if (params.k < params.p) throw ConfigError("k must be at least p", "k");
  if (params.k > n) throw ConfigError("k = " + std::to_string(params.k) + " exceeds n = " + std::to_string(n), "k");
  if (params.c < (relaxed ? 1u : 2u)) throw ConfigError(relaxed ? "must be >= 1" : "must be >= 2", "c");
  if (Rational(static_cast<std::int64_t>(params.k)) * exp_neg_lower(params.c) < Rational(2 * params.p)) {
    throw ConfigError("k / (p e^c) must be at least 2", "k");
  }
  const std::uint64_t t = pkc_step_count(params);
  if (t == 0) throw ConfigError("strategy would take no steps", "steps");
  if (static_cast<std::uint64_t>(params.p) * (t + 1) > params.k) {
    throw ConfigError("k - p t = " + std::to_string(static_cast<std::int64_t>(params.k) -
                                                    static_cast<std::int64_t>(params.p * t)) +
                          " < p", "steps");
  }
}

PkcRound::PkcRound(const PkcParams& params, std::vector<CupId> initial)
    : params_(params), steps_(pkc_step_count(params)), active_(std::move(initial)) {
  if (active_.size() != params.k) throw ConfigError("initial set must have k cups", "k");
}

Rational PkcRound::amount() const {
  return Rational::fraction(params_.p, static_cast<std::int64_t>(params_.k - params_.p * taken_));
}

void PkcRound::advance(Xoshiro256ss& rng, const std::vector<CupId>& touched) {
  ++taken_;
  std::uint32_t removed = 0;
  for (const CupId cup : touched) {
    if (removed == params_.p) break;
    auto it = std::find(active_.begin(), active_.end(), cup);
    if (it == active_.end()) continue;
    active_.erase(it);
    ++removed;
  }
  for (; removed < params_.p && !active_.empty(); ++removed) {
    active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(rng.below(active_.size())));
  }
}

PkcSchedule::PkcSchedule(const PkcParams& params, const GameConfig& config, std::uint64_t rounds, Subset subset,
                         std::uint64_t seed)
    : params_(params),
      n_(config.n),
      scale_(Rational(1) - config.epsilon),
      rounds_(rounds),
      subset_(subset),
      rng_(seed) {
  if (params.p != config.p) throw ConfigError("must equal the game's p", "p");
  validate_pkc(params, config.n, true);
  params_.steps = pkc_step_count(params);  // once, not per round
}

bool PkcSchedule::start_round_if_needed() {
  if (round_index_ > 0 && !round_.done()) return true;
  if (rounds_ != 0 && round_index_ >= rounds_) return false;
  std::vector<CupId> initial;
  if (subset_ == Subset::prefix) {
    initial.resize(params_.k);
    for (CupId j = 0; j < params_.k; ++j) initial[j] = j;
  } else {
    initial = sample_distinct(n_, params_.k, rng_);
  }
  round_ = PkcRound(params_, std::move(initial));
  ++round_index_;
  return true;
}

FillMove PkcSchedule::next(std::uint64_t /*step*/) {
  if (pending_) {
    round_.advance(rng_);
    pending_ = false;
  }
  if (!start_round_if_needed()) {
    tag_.reset();
    return {};
  }
  FillMove move;
  const Rational amount = round_.amount() * scale_;
  for (const CupId cup : round_.active()) move.add(cup, amount);
  tag_ = PhaseTag{round_index_, round_.taken() + 1, std::nullopt};
  pending_ = true;
  after_move();
  return move;
}

ojson PkcSchedule::describe() const {
  ojson out;
  out["kind"] = "pkc";
  out["p"] = params_.p;
  out["k"] = params_.k;
  out["c"] = params_.c;
  out["t"] = pkc_step_count(params_);
  out["rounds"] = rounds_;
  out["subset"] = subset_ == Subset::prefix ? "prefix" : "random";
  return out;
}

void ClairvoyantPkc::observe_emptier(const EmptyDecision& decision) {
  if (!pending_) return;
  round_.advance(rng_, decision.cups);
  pending_ = false;
}

ojson ClairvoyantPkc::describe() const {
  ojson out = PkcSchedule::describe();
  out["kind"] = "clairvoyant_pkc";
  return out;
}

TailAmplifier::TailAmplifier(const TailAmplifierParams& params, const GameConfig& config, std::uint64_t seed)
    : params_(params), n_(config.n), p_(config.p), scale_(Rational(1) - config.epsilon), rng_(seed) {
  if (p_ < 2) throw ConfigError("tail_amplifier needs p >= 2", "p");
  const std::int64_t need = std::max<std::int64_t>(2, [&] {
    std::int64_t f = params.c1.floor();
    return params.c1.is_integer() ? f : f + 1;
  }());
  c_ = static_cast<std::uint32_t>(need);
  const std::uint64_t K = ceil_c_exp_c(c_);
  if (static_cast<std::uint64_t>(n_) < p_ + K) {
    throw ConfigError("n must be at least p + ceil(c e^c) = " + std::to_string(p_ + K), "n");
  }
  inner_ = PkcParams{1, static_cast<std::uint32_t>(K), c_, std::nullopt};
  inner_.steps = pkc_step_count(inner_);
  validate_pkc(inner_, n_ - p_ + 1, false);
  inner_steps_ = pkc_step_count(inner_);

  if (params.coeff == 0) throw ConfigError("must be positive", "coeff");
  // W = coeff * n^(degree + 2), saturating.
  std::uint64_t W = params.coeff;
  for (std::uint32_t e = 0; e < params.degree + 2; ++e) {
    if (W > UINT64_MAX / n_) {
      W = UINT64_MAX;
      break;
    }
    W *= n_;
  }
  if (params.max_w) {
    if (*params.max_w == 0) throw ConfigError("must be positive", "max_w");
    W = std::min(W, *params.max_w);
  }
  for (std::uint32_t i = 1; i < p_; ++i) w_.push_back(rng_.between(1, W));

  cup_at_label_.resize(n_);
  label_of_.resize(n_);
  for (CupId j = 0; j < n_; ++j) cup_at_label_[j] = label_of_[j] = j;
}

void TailAmplifier::begin_mini_phase() {
  ++mini_;
  std::vector<CupId> labels = sample_distinct(n_ - p_ + 1, inner_.k, rng_);
  for (auto& l : labels) l += p_ - 1;
  round_ = PkcRound(inner_, std::move(labels));
  in_round_ = true;
}

FillMove TailAmplifier::next(std::uint64_t /*step*/) {
  if (pending_) finish_step();
  if (finished()) {
    tag_.reset();
    return {};
  }
  if (!in_round_) begin_mini_phase();
  FillMove move;
  for (std::uint32_t l = 0; l + 1 < p_; ++l) move.add(cup_at_label_[l], scale_);
  const Rational amount = round_.amount() * scale_;
  for (const CupId label : round_.active()) move.add(cup_at_label_[label], amount);
  ++phase_step_;
  tag_ = PhaseTag{phase_, phase_step_, std::nullopt};
  pending_ = true;
  if (!params_.adaptive) finish_step();
  return move;
}

void TailAmplifier::observe_emptier(const EmptyDecision& decision) {
  if (!params_.adaptive || !pending_) return;
  touched_.clear();
  for (const CupId cup : decision.cups) touched_.push_back(label_of_[cup]);
  finish_step();
}

void TailAmplifier::finish_step() {
  pending_ = false;
  round_.advance(rng_, touched_);
  touched_.clear();
  if (!round_.done()) return;
  in_round_ = false;
  if (mini_ < w_[phase_ - 1]) return;
  const std::uint32_t a = phase_ - 1;
  const std::uint32_t j = round_.active().front();
  std::swap(cup_at_label_[a], cup_at_label_[j]);
  label_of_[cup_at_label_[a]] = a;
  label_of_[cup_at_label_[j]] = j;
  swapped_in_.push_back(cup_at_label_[a]);
  ++phase_;
  mini_ = 0;
  phase_step_ = 0;
}

ojson TailAmplifier::describe() const {
  ojson out;
  out["kind"] = "tail_amplifier";
  out["c1"] = params_.c1.str();
  out["coeff"] = params_.coeff;
  out["degree"] = params_.degree;
  if (params_.max_w) {
    out["max_w"] = *params_.max_w;
  } else {
    out["max_w"] = nullptr;
  }
  out["adaptive"] = params_.adaptive;
  return out;
}

ojson TailAmplifier::annotations() const {
  ojson note;
  note["kind"] = "tail_amplifier";
  note["c"] = c_;
  note["inner_k"] = inner_.k;
  note["inner_steps"] = inner_steps_;
  note["w"] = w_;
  return ojson::array({note});
}

FuzzingSchedule::FuzzingSchedule(std::uint32_t n, std::uint64_t phase_len, const Rational& unit,
                                 const GameConfig& config, std::uint64_t seed)
    : n_(n), phase_len_(phase_len), unit_(unit), rng_(seed) {
  if (config.p != 1) throw ConfigError("fuzzing is single-processor", "p");
  if (n != config.n) throw ConfigError("must equal the game's n", "n");
  if (phase_len == 0) throw ConfigError("must be >= 1", "phase_len");
  const Rational half = Rational::fraction(1, 2);
  const Rational augmented = (Rational(1) - config.epsilon) * half;
  if (unit != half && unit != augmented) throw ConfigError("must be 1/2 or (1 - epsilon)/2", "unit");
  if (unit * 2 > config.budget()) throw ConfigError("two units exceed the step budget", "unit");
  cup_at_label_.resize(n);
  for (CupId j = 0; j < n; ++j) cup_at_label_[j] = j;
  shuffle(cup_at_label_, rng_);
  label_of_.resize(n);
  for (std::uint32_t l = 0; l < n; ++l) label_of_[cup_at_label_[l]] = l;
}

FillMove FuzzingSchedule::next(std::uint64_t step) {
  const std::uint64_t phase = (step - 1) / phase_len_ + 1;
  if (phase > n_) {
    tag_.reset();
    return {};
  }
  const auto active = static_cast<std::uint32_t>(n_ - phase + 1);
  draws_.first = static_cast<std::uint32_t>(rng_.below(active));
  draws_.second = static_cast<std::uint32_t>(rng_.below(active));
  FillMove move;
  move.add(cup_at_label_[draws_.first], unit_);
  move.add(cup_at_label_[draws_.second], unit_);
  tag_ = PhaseTag{phase, (step - 1) % phase_len_ + 1, active};
  return move;
}

ojson FuzzingSchedule::describe() const {
  ojson out;
  out["kind"] = "fuzzing";
  out["phase_len"] = phase_len_;
  out["unit"] = unit_.str();
  return out;
}

UnpredictabilityAttack::UnpredictabilityAttack(std::unique_ptr<FillSchedule> base, std::uint64_t t, std::uint64_t R,
                                               std::uint64_t c, const GameConfig& config,
                                               std::optional<std::uint64_t> repeat_every)
    : base_(std::move(base)), t_(t), R_(R), c_(c), p_(config.p), unit_(Rational(1) - config.epsilon),
      every_(repeat_every) {
  if (!base_) throw ConfigError("missing base schedule", "base");
  if (R == 0 || c == 0) throw ConfigError("must be positive", "R");
  if (c > config.n / R) throw ConfigError("cR = " + std::to_string(c * R) + " exceeds n", "R");
  set_size_ = c * R;
  len_ = (set_size_ + p_ - 1) / p_;
  if (every_ && *every_ <= len_) throw ConfigError("must exceed the attack length", "repeat_every");
}

FillMove UnpredictabilityAttack::next(std::uint64_t step) {
  if (step > t_) {
    const std::uint64_t d = step - t_ - 1;
    const std::uint64_t window = every_ ? d / *every_ : 0;
    const std::uint64_t m = every_ ? d % *every_ : d;
    if (m < len_ && (every_ || window == 0)) {
      FillMove move;
      const std::uint64_t lo = m * p_;
      const std::uint64_t hi = std::min<std::uint64_t>(lo + p_, set_size_);
      for (std::uint64_t cup = lo; cup < hi; ++cup) move.add(static_cast<CupId>(cup), unit_);
      tag_ = PhaseTag{window + 1, m + 1, std::nullopt};
      last_was_base_ = false;
      return move;
    }
  }
  FillMove move = base_->next(++base_steps_);
  tag_ = base_->phase_tag();
  last_was_base_ = true;
  return move;
}

void UnpredictabilityAttack::observe_emptier(const EmptyDecision& decision) {
  if (last_was_base_) base_->observe_emptier(decision);
}

std::vector<CupId> UnpredictabilityAttack::probe_set() const {
  std::vector<CupId> cups(set_size_);
  for (std::uint64_t j = 0; j < set_size_; ++j) cups[j] = static_cast<CupId>(j);
  return cups;
}

std::vector<std::uint64_t> UnpredictabilityAttack::probe_steps(std::uint64_t horizon) const {
  std::vector<std::uint64_t> out;
  std::uint64_t s = t_ + len_;
  while (s <= horizon) {
    out.push_back(s);
    if (!every_) break;
    s += *every_;
  }
  return out;
}

ojson UnpredictabilityAttack::describe() const {
  ojson out;
  out["kind"] = "unpredictability_attack";
  out["t"] = t_;
  out["R"] = R_;
  out["c"] = c_;
  if (every_) {
    out["repeat_every"] = *every_;
  } else {
    out["repeat_every"] = nullptr;
  }
  out["base"] = base_->describe();
  return out;
}

ojson UnpredictabilityAttack::annotations() const {
  ojson notes = base_->annotations();
  ojson probe;
  probe["kind"] = "probe";
  probe["cups"] = probe_set();
  probe["first_step"] = t_ + len_;
  if (every_) {
    probe["every"] = *every_;
  } else {
    probe["every"] = nullptr;
  }
  notes.push_back(std::move(probe));
  return notes;
}

const char* baseline_name(BaselineSchedule::Kind kind) {
  switch (kind) {
    case BaselineSchedule::Kind::uniform: return "uniform";
    case BaselineSchedule::Kind::single_cup: return "single_cup";
    case BaselineSchedule::Kind::round_robin: return "round_robin";
  }
  return "unknown";
}

BaselineSchedule::BaselineSchedule(Kind kind, const GameConfig& config, std::uint64_t seed,
                                   std::optional<Rational> amount)
    : kind_(kind), n_(config.n), p_(config.p), amount_(amount ? *amount : Rational(1) - config.epsilon), rng_(seed) {
  if (amount_ <= 0) throw ConfigError("must be positive", "amount");
  if (amount_ * Rational(static_cast<std::int64_t>(p_)) > config.budget()) {
    throw ConfigError("p * amount exceeds the step budget", "amount");
  }
  if (p_ > 1 && amount_ > 1) throw ConfigError("must be at most 1 when p > 1", "amount");
}

FillMove BaselineSchedule::next(std::uint64_t step) {
  FillMove move;
  switch (kind_) {
    case Kind::uniform:
      if (p_ == 1) {
        move.add(static_cast<CupId>(rng_.below(n_)), amount_);
      } else {
        for (const auto cup : sample_distinct(n_, p_, rng_)) move.add(cup, amount_);
      }
      break;
    case Kind::single_cup:
      for (CupId j = 0; j < p_; ++j) move.add(j, amount_);
      break;
    case Kind::round_robin:
      for (std::uint32_t s = 0; s < p_; ++s) {
        move.add(static_cast<CupId>(((step - 1) * p_ + s) % n_), amount_);
      }
      break;
  }
  return move;
}

ojson BaselineSchedule::describe() const {
  ojson out;
  out["kind"] = "baseline";
  out["baseline"] = baseline_name(kind_);
  out["amount"] = amount_.str();
  return out;
}

}  // namespace cupgame
