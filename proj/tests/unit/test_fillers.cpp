#include <doctest.h>

#include <gmpxx.h>

#include <cmath>
#include <set>

#include "cupgame/emptiers.hpp"
#include "cupgame/engine.hpp"
#include "cupgame/fillers.hpp"
#include "helpers.hpp"

using namespace cupgame;
using testutil::R;

namespace {

GameConfig game(std::uint32_t n, std::uint32_t p = 1, const char* eps = "0", std::uint64_t steps = 0) {
  GameConfig g;
  g.n = n;
  g.p = p;
  g.epsilon = R(eps);
  g.steps = steps;
  g.seed = 17;
  return g;
}

// Harmonic tail sum_{r=1}^{i} p/(k - p(r-1)) computed with GMP directly.
std::string harmonic_oracle(unsigned p, unsigned k, unsigned i) {
  mpq_class sum = 0;
  for (unsigned r = 1; r <= i; ++r) sum += mpq_class(p, k - p * (r - 1));
  sum.canonicalize();
  return sum.get_str();
}

void all_moves_valid(FillSchedule& f, const GameConfig& g, std::uint64_t steps) {
  for (std::uint64_t t = 1; t <= steps; ++t) {
    const FillMove mv = f.next(t);
    const auto v = validate_fill_move(mv, g);
    if (v) FAIL("step " << t << ": " << v->message());
  }
}

}  // namespace

TEST_CASE("exponential bounds bracket e^-c") {
  for (std::uint32_t c = 1; c <= 6; ++c) {
    const double e = std::exp(-static_cast<double>(c));
    CHECK(exp_neg_lower(c) < exp_neg_upper(c));
    CHECK(exp_neg_lower(c).to_double() == doctest::Approx(e).epsilon(1e-12));
    CHECK((exp_neg_upper(c) - exp_neg_lower(c)) == Rational::dyadic(1, 63) * R("1/2"));
  }
  CHECK(ceil_c_exp_c(2) == 15);
  CHECK(ceil_c_exp_c(1) == 3);
}

TEST_CASE("pkc step count and fill") {
  CHECK(pkc_step_count(PkcParams{1, 8, 1}) == 4);
  CHECK(pkc_step_count(PkcParams{1, 64, 2}) == 54);
  CHECK(pkc_step_count(PkcParams{1, 16, 2}) == 12);
  CHECK(pkc_fill_after(1, 8, 4) == R("533/840"));
  CHECK(pkc_fill_after(1, 8, 4).str() == harmonic_oracle(1, 8, 4));
  CHECK(pkc_fill_after(1, 64, 54).str() == harmonic_oracle(1, 64, 54));
  CHECK(pkc_fill_after(2, 40, 7).str() == harmonic_oracle(2, 40, 7));
  // k - p t < p
  CHECK_THROWS_AS(validate_pkc(PkcParams{1, 8, 1, 8}, 8), ConfigError);
  CHECK_THROWS_AS(validate_pkc(PkcParams{1, 9, 1}, 8), ConfigError);
  CHECK_THROWS_AS(validate_pkc(PkcParams{1, 8, 1}, 8, false), ConfigError);
  CHECK_NOTHROW(validate_pkc(PkcParams{1, 8, 1}, 8, true));
}

TEST_CASE("pkc schedule places p/(k - p(i-1)) into each live cup") {
  auto g = game(8);
  PkcSchedule pkc(PkcParams{1, 8, 1}, g, 1, PkcSchedule::Subset::prefix, 5);
  const FillMove first = pkc.next(1);
  CHECK(first.size() == 8);
  for (const auto& pl : first.placements()) CHECK(pl.amount == R("1/8"));
  for (std::uint64_t t = 2; t <= 4; ++t) {
    const FillMove mv = pkc.next(t);
    CHECK(mv.size() == 9 - t);
    CHECK(mv.total() == 1);
  }
  CHECK(pkc.next(5).empty());
  CHECK(pkc.round().active().size() == 4);
}

TEST_CASE("clairvoyant pkc vs greedy, k = 8") {
  auto g = game(8, 1, "0", 4);
  ClairvoyantPkc pkc(PkcParams{1, 8, 1}, g, 1, PkcSchedule::Subset::prefix, 3);
  GreedyEmptier greedy(false);
  const Trace t = run_game(g, pkc, greedy);
  const auto& live = pkc.round().active();
  CHECK(live.size() == 4);
  for (CupId c : live) CHECK(t.final_state.fills[c] == R("533/840"));
  CHECK(live.size() >= static_cast<std::size_t>(std::floor(8 / (2 * std::exp(1.0)))));
}

TEST_CASE("clairvoyant pkc vs greedy, k = 64, survivors exceed ln(k/(k-pt)) - 1") {
  auto g = game(64, 1, "0", 54);
  ClairvoyantPkc pkc(PkcParams{1, 64, 2}, g, 1, PkcSchedule::Subset::prefix, 3);
  GreedyEmptier greedy(false);
  const Trace t = run_game(g, pkc, greedy);
  const auto& live = pkc.round().active();
  CHECK(live.size() == 10);
  for (CupId c : live) {
    CHECK(t.final_state.fills[c].str() == harmonic_oracle(1, 64, 54));
    CHECK(t.final_state.fills[c].to_double() >= std::log(64.0 / 10.0) - 1);
  }
}

TEST_CASE("clairvoyant pkc refuses randomized emptiers") {
  auto g = game(8, 1, "0", 4);
  ClairvoyantPkc pkc(PkcParams{1, 8, 1}, g, 1, PkcSchedule::Subset::prefix, 3);
  GreedyEmptier smoothed(true);
  CHECK_THROWS_AS(run_game(g, pkc, smoothed), CapabilityMismatch);
}

TEST_CASE("oblivious schedules ignore the emptier") {
  auto g = game(32, 1, "1/10", 300);
  auto moves = [&](Emptier& e) {
    PkcSchedule pkc(PkcParams{1, 16, 2}, g, 0, PkcSchedule::Subset::random, 44);
    RunOptions opts;
    opts.mode = TraceMode::full;
    const Trace t = run_game(g, pkc, e, {}, opts);
    std::vector<FillMove> out;
    for (const auto& r : t.records) out.push_back(r.move);
    return out;
  };
  GreedyEmptier smoothed(true);
  AsymmetricEmptier asym;
  CHECK(moves(smoothed) == moves(asym));
}

TEST_CASE("tail amplifier parameters") {
  auto g4 = game(40, 4);
  TailAmplifierParams params;
  params.max_w = 3;
  TailAmplifier amp(params, g4, 9);
  CHECK(amp.c() == 2);
  CHECK(amp.inner_k() == 15);
  CHECK(amp.inner_steps() == 11);
  const FillMove first = amp.next(1);
  for (CupId l = 0; l < 3; ++l) CHECK(first.amount(amp.cup_at_label()[l]) == 1);
  CHECK(first.size() == 3 + 15);
  CHECK(first.total() == 4);

  auto g2 = game(20, 2);
  TailAmplifierParams f_n;  // f(n) = n
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    TailAmplifier a(f_n, g2, seed);
    REQUIRE(a.w().size() == 1);
    CHECK(a.w()[0] >= 1);
    CHECK(a.w()[0] <= 8000);
  }
  CHECK_THROWS_AS(TailAmplifier(f_n, game(40, 1), 1), ConfigError);
  CHECK_THROWS_AS(TailAmplifier(f_n, game(16, 2), 1), ConfigError);  // needs n >= 17
}

TEST_CASE("tail amplifier relabeling stays a permutation") {
  auto g = game(24, 3, "0", 2000);
  TailAmplifierParams params;
  params.max_w = 4;
  TailAmplifier amp(params, g, 2);
  all_moves_valid(amp, g, 2000);
  CHECK(amp.finished());
  CHECK(amp.swapped_in().size() == 2);
  std::set<CupId> seen(amp.cup_at_label().begin(), amp.cup_at_label().end());
  CHECK(seen.size() == 24);
  for (CupId c = 0; c < 24; ++c) CHECK(amp.cup_at_label()[amp.label_of(c)] == c);
}

TEST_CASE("adaptive tail amplifier plays against greedy") {
  auto g = game(24, 2, "0", 400);
  TailAmplifierParams params;
  params.max_w = 2;
  params.adaptive = true;
  TailAmplifier amp(params, g, 2);
  GreedyEmptier greedy(false);
  CHECK_NOTHROW(run_game(g, amp, greedy));
  CHECK(amp.finished());
}

TEST_CASE("fuzzing schedule") {
  auto g = game(5, 1, "0");
  FuzzingSchedule fz(5, 3, R("1/2"), g, 12);
  bool saw_double = false, saw_split = false;
  for (std::uint64_t t = 1; t <= 15; ++t) {
    const FillMove mv = fz.next(t);
    const auto tag = fz.phase_tag();
    REQUIRE(tag);
    CHECK(tag->phase == (t - 1) / 3 + 1);
    CHECK(*tag->active == 5 - (t - 1) / 3);
    CHECK(mv.total() == 1);
    const auto [x1, x2] = fz.last_draws();
    CHECK(x1 < *tag->active);
    CHECK(x2 < *tag->active);
    if (x1 == x2) {
      saw_double = true;
      CHECK(mv.amount(fz.cup_at_label()[x1]) == 1);
    } else {
      saw_split = true;
      CHECK(mv.amount(fz.cup_at_label()[x1]) == R("1/2"));
      CHECK(mv.amount(fz.cup_at_label()[x2]) == R("1/2"));
    }
  }
  CHECK(saw_split);
  CHECK(fz.next(16).empty());
  // Labels are a permutation.
  std::set<CupId> seen(fz.cup_at_label().begin(), fz.cup_at_label().end());
  CHECK(seen.size() == 5);
  (void)saw_double;

  auto ge = game(6, 1, "1/10");
  FuzzingSchedule aug(6, 10, (Rational(1) - ge.epsilon) / 2, ge, 1);
  for (std::uint64_t t = 1; t <= 60; ++t) CHECK(aug.next(t).total() == R("9/10"));
}

TEST_CASE("unpredictability attack windows") {
  auto g = game(64, 2, "0");
  auto base = std::make_unique<BaselineSchedule>(BaselineSchedule::Kind::round_robin, g, 1);
  UnpredictabilityAttack atk(std::move(base), 7, 10, 4, g);
  CHECK(atk.attack_len() == 20);
  CHECK(atk.probe_set().size() == 40);
  CHECK(atk.probe_set().back() == 39);
  CHECK(atk.probe_steps(1000) == std::vector<std::uint64_t>{27});
  std::set<CupId> covered;
  for (std::uint64_t t = 1; t <= 30; ++t) {
    const FillMove mv = atk.next(t);
    if (t >= 8 && t <= 27) {
      CHECK(mv.size() == 2);
      for (const auto& pl : mv.placements()) {
        CHECK(pl.amount == 1);
        CHECK(covered.insert(pl.cup).second);
      }
    }
  }
  CHECK(covered.size() == 40);

  auto g1 = game(8, 1, "0");
  UnpredictabilityAttack small(std::make_unique<BaselineSchedule>(BaselineSchedule::Kind::single_cup, g1, 1), 2, 3,
                               1, g1);
  small.next(1);
  small.next(2);
  CHECK(small.next(3) == FillMove{{0, 1}});
  CHECK(small.next(4) == FillMove{{1, 1}});
  CHECK(small.next(5) == FillMove{{2, 1}});
  CHECK_THROWS_AS(UnpredictabilityAttack(std::make_unique<BaselineSchedule>(BaselineSchedule::Kind::uniform, g1, 1),
                                         2, 3, 3, g1),
                  ConfigError);
}

TEST_CASE("repeated attack windows") {
  auto g = game(16, 1, "0");
  UnpredictabilityAttack atk(std::make_unique<BaselineSchedule>(BaselineSchedule::Kind::uniform, g, 1), 5, 2, 2, g,
                             10);
  CHECK(atk.probe_steps(40) == std::vector<std::uint64_t>{9, 19, 29, 39});
}

TEST_CASE("baselines") {
  auto g = game(3, 1, "0");
  BaselineSchedule single(BaselineSchedule::Kind::single_cup, g, 1);
  for (std::uint64_t t = 1; t < 5; ++t) CHECK(single.next(t) == FillMove{{0, 1}});
  BaselineSchedule rr(BaselineSchedule::Kind::round_robin, g, 1);
  std::vector<CupId> order;
  for (std::uint64_t t = 1; t <= 4; ++t) order.push_back(rr.next(t).placements()[0].cup);
  CHECK(order == std::vector<CupId>{0, 1, 2, 0});
  auto g2 = game(10, 2, "0");
  BaselineSchedule uni(BaselineSchedule::Kind::uniform, g2, 4);
  for (std::uint64_t t = 1; t < 50; ++t) {
    const FillMove mv = uni.next(t);
    CHECK(mv.size() == 2);
    for (const auto& pl : mv.placements()) CHECK(pl.amount == 1);
  }
}

TEST_CASE("every schedule emits valid moves") {
  auto g = game(48, 2, "1/8");
  PkcSchedule pkc(PkcParams{2, 32, 2}, g, 0, PkcSchedule::Subset::random, 1);
  all_moves_valid(pkc, g, 500);
  BaselineSchedule uni(BaselineSchedule::Kind::uniform, g, 1);
  all_moves_valid(uni, g, 500);
  UnpredictabilityAttack atk(std::make_unique<BaselineSchedule>(BaselineSchedule::Kind::round_robin, g, 1), 40, 8, 3,
                             g, 50);
  all_moves_valid(atk, g, 500);
  auto g1 = game(12, 1, "1/8");
  FuzzingSchedule fz(12, 20, (Rational(1) - g1.epsilon) / 2, g1, 3);
  all_moves_valid(fz, g1, 300);
}
