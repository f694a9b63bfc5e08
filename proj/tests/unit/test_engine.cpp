#include <doctest.h>

#include <sstream>

#include "cupgame/emptiers.hpp"
#include "cupgame/engine.hpp"
#include "cupgame/fill_index.hpp"
#include "cupgame/fillers.hpp"
#include "cupgame/metrics.hpp"
#include "helpers.hpp"
#include "scripted.hpp"

using namespace cupgame;
using testutil::R;
using testutil::Rs;
using testutil::ScriptedEmptier;
using testutil::ScriptedFiller;

namespace {

GameConfig game(std::uint32_t n, std::uint32_t p = 1, const char* eps = "0", std::uint64_t steps = 0,
                std::uint64_t seed = 1) {
  GameConfig g;
  g.n = n;
  g.p = p;
  g.epsilon = R(eps);
  g.steps = steps;
  g.seed = seed;
  return g;
}

CupState state_with(std::vector<Rational> fills) {
  CupState s;
  s.offsets.assign(fills.size(), Rational(0));
  s.priorities.assign(fills.size(), Rational(0));
  s.fills = std::move(fills);
  return s;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(game(3, 3).validate());
  CHECK_THROWS_AS(game(2, 3).validate(), ConfigError);
  CHECK_THROWS_AS(game(2, 1, "1").validate(), ConfigError);
  try {
    game(2, 3).validate();
  } catch (const ConfigError& e) {
    CHECK(e.key() == "p");
  }
}

TEST_CASE("new_game reproduces and starts at the offsets") {
  const auto g = game(3, 1, "0", 0, 77);
  const CupState a = new_game(g);
  const CupState b = new_game(g);
  CHECK(a.offsets == b.offsets);
  CHECK(a.priorities == b.priorities);
  CHECK(a.fills == a.offsets);
  CHECK(a.offsets != a.priorities);
  for (const auto& r : a.offsets) {
    CHECK(r >= 0);
    CHECK(r < 1);
  }
  const CupState z = new_game(g, false);
  for (const auto& r : z.offsets) CHECK(r.is_zero());
  CHECK(z.priorities == a.priorities);
}

TEST_CASE("deterministic greedy games run on zero offsets") {
  auto g = game(4, 1, "0", 5);
  ScriptedFiller filler({});
  GreedyEmptier greedy(false);
  const Trace t = run_game(g, filler, greedy);
  for (const auto& r : t.final_state.offsets) CHECK(r.is_zero());
}

TEST_CASE("validate_fill_move") {
  auto v = validate_fill_move(FillMove{{0, R("19/20")}}, game(1, 1, "1/10"));
  REQUIRE(v);
  CHECK(v->rule == Rule::budget_exceeded);
  v = validate_fill_move(FillMove{{0, R("3/2")}}, game(2, 2));
  REQUIRE(v);
  CHECK(v->rule == Rule::per_cup_cap_exceeded);
  CHECK(v->cup == 0u);
  CHECK_FALSE(validate_fill_move(FillMove{{0, R("1")}, {1, R("1/2")}, {2, R("1/2")}}, game(3, 2)));
  v = validate_fill_move(FillMove{{1, R("0")}}, game(3));
  REQUIRE(v);
  CHECK(v->rule == Rule::non_positive_placement);
  // Single processor: no per-cup cap, only the budget.
  CHECK_FALSE(validate_fill_move(FillMove{{0, R("1")}}, game(2, 1)));
}

TEST_CASE("apply_step") {
  auto g = game(1);
  CupState s = state_with(Rs({"1/2"}));
  apply_step(s, FillMove{{0, R("7/10")}}, EmptyDecision{{0}}, g);
  CHECK(s.fills[0] == R("1/5"));

  CupState bad = state_with(Rs({"1/2"}));
  try {
    apply_step(bad, FillMove{{0, R("3/10")}}, EmptyDecision{{0}}, g);
    FAIL("expected IllegalEmpty");
  } catch (const RuleViolation& e) {
    CHECK(e.rule() == Rule::illegal_empty);
  }
  CHECK(bad.fills[0] == R("1/2"));

  auto g2 = game(2, 2);
  CupState d = state_with(Rs({"2", "2"}));
  try {
    apply_step(d, FillMove{}, EmptyDecision{{1, 1}}, g2);
    FAIL("expected DuplicateCup");
  } catch (const RuleViolation& e) {
    CHECK(e.rule() == Rule::duplicate_cup);
  }
}

TEST_CASE("truncation happens after the emptier") {
  auto g = game(2);
  g.truncation_h = 3;
  CupState s = state_with(Rs({"29/10", "0"}));
  const auto fx = apply_step(s, FillMove{{0, R("1/2")}}, EmptyDecision{}, g);
  CHECK(s.fills[0] == R("12/5"));
  REQUIRE(fx.truncations.size() == 1);
  CHECK(fx.truncations[0] == std::pair<CupId, std::uint32_t>{0, 1});

  // The emptier's removal brings 3.4 to 2.4 first, so nothing is truncated.
  CupState e = state_with(Rs({"29/10", "0"}));
  const auto fe = apply_step(e, FillMove{{0, R("1/2")}}, EmptyDecision{{0}}, g);
  CHECK(e.fills[0] == R("12/5"));
  CHECK(fe.truncations.empty());
}

TEST_CASE("fractional_reset") {
  CupState s = state_with(Rs({"23/10", "7/10"}));
  CHECK(fractional_reset(s).fills == Rs({"3/10", "7/10"}));
  CHECK(fractional_reset(state_with(Rs({"2", "1"}))).fills == Rs({"0", "0"}));
  const CupState f = state_with(Rs({"1/3", "0"}));
  CHECK(fractional_reset(f).fills == f.fills);
}

TEST_CASE("run_game determinism and trace hash") {
  auto g = game(16, 1, "1/8", 500, 5);
  auto run = [&](std::ostream* sink) {
    BaselineSchedule filler(BaselineSchedule::Kind::uniform, g, 9);
    GreedyEmptier emptier(true);
    RunOptions opts;
    opts.mode = TraceMode::full;
    opts.sink = sink;
    return run_game(g, filler, emptier, {}, opts);
  };
  std::ostringstream text;
  const Trace a = run(&text);
  const Trace b = run(nullptr);
  REQUIRE(a.hash);
  CHECK(a.hash == b.hash);
  CHECK(a.records.size() == 500);
  std::istringstream in(text.str());
  CHECK(hash_trace_stream(in) == *a.hash);
}

TEST_CASE("empty game hashes the header alone") {
  auto g = game(3, 1, "0", 0);
  ScriptedFiller filler({});
  GreedyEmptier emptier(true);
  std::ostringstream text;
  RunOptions opts;
  opts.sink = &text;
  const Trace t = run_game(g, filler, emptier, {}, opts);
  CHECK(t.records.empty());
  const std::string line = t.header.dump() + "\n";
  CHECK(text.str() == line);
  CHECK(*t.hash == fnv1a64(line));
}

TEST_CASE("adaptive filler against a randomized emptier") {
  auto g = game(8, 1, "0", 10);
  ScriptedFiller filler({}, Capability::adaptive_simulated);
  GreedyEmptier smoothed(true);
  CHECK_THROWS_AS(run_game(g, filler, smoothed), CapabilityMismatch);
  AsymmetricEmptier asym;
  CHECK_THROWS_AS(run_game(g, filler, asym), CapabilityMismatch);
  GreedyEmptier greedy(false);
  CHECK_NOTHROW(run_game(g, filler, greedy));
}

TEST_CASE("rule violations carry the step") {
  auto g = game(2, 1, "0", 3);
  ScriptedFiller filler({FillMove{{0, R("1/2")}}, FillMove{{0, R("1/4")}}, FillMove{{0, R("1/2")}}});
  ScriptedEmptier emptier({EmptyDecision{}, EmptyDecision{{0}}});
  try {
    run_game(g, filler, emptier);
    FAIL("expected a violation");
  } catch (const RuleViolation& e) {
    CHECK(e.rule() == Rule::illegal_empty);
    CHECK(e.step() == 2u);
  }
}

TEST_CASE("conservation, non-negativity and fractional invariance") {
  auto g = game(12, 2, "1/10", 2000, 21);
  g.truncation_h = 3;
  struct Audit : Observer {
    Rational total;
    Rational last_total;
    bool ok = true;
    bool nonneg = true;
    void on_start(const CupState& s, const FillIndex&, const GameConfig&) override {
      for (const auto& f : s.fills) total += f;
    }
    void on_step(const StepContext& ctx) override {
      Rational expect = total + ctx.record.move.total() - Rational(static_cast<std::int64_t>(ctx.record.emptied.cups.size()));
      for (const auto& [cup, k] : ctx.record.effects.truncations) expect -= Rational(static_cast<std::int64_t>(k));
      Rational now;
      for (const auto& f : ctx.state.fills) {
        now += f;
        if (f.is_negative()) nonneg = false;
      }
      if (now != expect) ok = false;
      total = now;
    }
  };
  auto run = [&](Emptier& emptier) {
    BaselineSchedule filler(BaselineSchedule::Kind::uniform, g, 4);
    Audit audit;
    Observer* obs[] = {&audit};
    RunOptions opts;
    opts.mode = TraceMode::none;
    opts.initial = new_game(g);
    Trace t = run_game(g, filler, emptier, obs, opts);
    CHECK(audit.ok);
    CHECK(audit.nonneg);
    return t.final_state;
  };
  GreedyEmptier greedy(true);
  AsymmetricEmptier asym;
  const CupState a = run(greedy);
  const CupState b = run(asym);
  for (CupId j = 0; j < g.n; ++j) CHECK(a.fills[j].frac() == b.fills[j].frac());
}
