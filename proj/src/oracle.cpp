#include "cupgame/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cupgame/emptiers.hpp"
#include "cupgame/fillers.hpp"
#include "cupgame/metrics.hpp"
#include "cupgame/rng.hpp"

namespace cupgame {

namespace {

const Rational kHalf = Rational::fraction(1, 2);

std::int64_t halves_of(const Rational& x, const char* key) {
  if (x.is_negative() || !x.is_half_integral()) throw ConfigError("must be a non-negative multiple of 1/2", key);
  return (x * 2).floor();
}

void enumerate_into(std::uint32_t k, std::int64_t remaining, std::int64_t cap, std::vector<std::int64_t>& cur,
                    std::vector<std::vector<Rational>>& out) {
  if (cur.size() + 1 == k) {
    if (remaining > cap) return;
    cur.push_back(remaining);
    std::vector<Rational> state;
    for (const auto h : cur) state.push_back(Rational::fraction(h, 2));
    out.push_back(std::move(state));
    cur.pop_back();
    return;
  }
  for (std::int64_t h = 0; h <= std::min(cap, remaining); ++h) {
    cur.push_back(h);
    enumerate_into(k, remaining - h, cap, cur, out);
    cur.pop_back();
  }
}

bool pairwise_equilibrium(const ScoreFunction& score, const std::vector<Rational>& s) {
  for (CupId i = 0; i < s.size(); ++i) {
    for (CupId j = 0; j < s.size(); ++j) {
      if (i != j && !(score.value(i, s[i] + kHalf) > score.value(j, s[j]))) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<std::vector<Rational>> enumerate_states(std::uint32_t k, const Rational& m, std::optional<Rational> cap) {
  if (k == 0 || k > 6) throw ConfigError("enumeration guard: need 1 <= k <= 6", "k");
  const std::int64_t mh = halves_of(m, "m");
  if (mh > 16) throw ConfigError("enumeration guard: m <= 8", "m");
  const std::int64_t ch = cap ? halves_of(*cap, "cap") : 2 * mh;
  std::vector<std::vector<Rational>> out;
  std::vector<std::int64_t> cur;
  enumerate_into(k, mh, ch, cur, out);
  return out;
}

std::vector<std::vector<Rational>> enumerate_equilibria(const ScoreFunction& score, std::uint32_t k,
                                                        const Rational& m, std::optional<Rational> cap) {
  if (k > score.size()) throw ConfigError("k exceeds the score's cup count", "k");
  std::vector<std::vector<Rational>> out;
  for (auto& s : enumerate_states(k, m, cap)) {
    if (pairwise_equilibrium(score, s)) out.push_back(std::move(s));
  }
  return out;
}

namespace {

CrossingReport crossing_attempt(const GameConfig& base, const FillerFactory& factory, std::uint64_t t1,
                                std::uint64_t t2, std::uint64_t trials, std::uint64_t seed) {
  const std::uint32_t n = base.n;
  CrossingReport report;
  report.trials = trials;
  report.seed = seed;

  // c_j(I) from one replay; the filler is the same object every trial.
  IntervalFillLog placed(n);
  {
    GameConfig cfg = base;
    cfg.steps = t2;
    auto filler = factory(cfg);
    for (std::uint64_t t = 1; t <= t2; ++t) {
      FillMove move = filler->next(t);
      if (t >= t1) placed.add(move);
    }
  }

  std::vector<std::vector<std::uint8_t>> extra(n, std::vector<std::uint8_t>(trials));
  std::vector<std::uint64_t> out_of_support(n);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    GameConfig cfg = base;
    cfg.steps = t2;
    cfg.seed = derive_seed(seed, stream_id(StreamRole::oracle, static_cast<std::uint32_t>(trial)));
    auto filler = factory(cfg);
    GreedyEmptier emptier(true);
    CrossingTally tally(n, t1, t2);
    Observer* obs[] = {&tally};
    run_game(cfg, *filler, emptier, obs, RunOptions{TraceMode::none, nullptr, std::nullopt});
    for (CupId j = 0; j < n; ++j) {
      const auto fl = static_cast<std::uint64_t>(placed.amounts()[j].floor());
      const std::uint64_t c = tally.counts()[j];
      if (c == fl + 1) {
        extra[j][trial] = 1;
      } else if (c != fl) {
        ++out_of_support[j];
      }
    }
  }

  const double T = static_cast<double>(trials);
  bool pass = true;
  std::vector<CupId> varying;
  for (CupId j = 0; j < n; ++j) {
    CrossingCupStat st;
    st.cup = j;
    st.placed = placed.amounts()[j];
    st.expected = st.placed.frac().to_double();
    const double hits = std::accumulate(extra[j].begin(), extra[j].end(), 0.0);
    st.frequency = hits / T;
    st.out_of_support = out_of_support[j];
    const double se = std::sqrt(st.frequency * (1 - st.frequency) / T);
    const double diff = st.frequency - st.expected;
    if (se > 0) {
      st.z = diff / se;
      varying.push_back(j);
    } else {
      st.z = diff == 0 ? 0 : std::copysign(INFINITY, diff);
    }
    if (!(std::abs(st.z) <= 4) || st.out_of_support > 0) pass = false;
    report.cups.push_back(st);
  }
  for (std::size_t x = 0; x < varying.size(); ++x) {
    for (std::size_t y = x + 1; y < varying.size(); ++y) {
      const auto& a = extra[varying[x]];
      const auto& b = extra[varying[y]];
      const double ma = report.cups[varying[x]].frequency;
      const double mb = report.cups[varying[y]].frequency;
      double cov = 0;
      for (std::uint64_t t = 0; t < trials; ++t) cov += (a[t] - ma) * (b[t] - mb);
      cov /= T;
      const double r = cov / std::sqrt(ma * (1 - ma) * mb * (1 - mb));
      CrossingPair pr{varying[x], varying[y], r, r * std::sqrt(T)};
      if (!(std::abs(pr.z) <= 4)) pass = false;
      report.pairs.push_back(pr);
    }
  }
  report.pass = pass;
  return report;
}

}  // namespace

CrossingReport crossing_distribution_test(const GameConfig& config, const FillerFactory& filler, std::uint64_t t1,
                                          std::uint64_t t2, std::uint64_t trials) {
  config.validate();
  if (config.n > 16) throw ConfigError("crossing test guard: n <= 16", "n");
  if (trials < 10000) throw ConfigError("crossing test guard: trials >= 10^4", "trials");
  if (t1 < 1 || t2 < t1) throw ConfigError("need 1 <= t1 <= t2", "interval");
  {
    GameConfig cfg = config;
    cfg.steps = t2;
    if (filler(cfg)->capability() != Capability::oblivious) {
      throw CapabilityMismatch("crossing test needs an oblivious filler");
    }
  }
  CrossingReport first = crossing_attempt(config, filler, t1, t2, trials, config.seed);
  if (first.pass) return first;
  CrossingReport second = crossing_attempt(config, filler, t1, t2, trials, mix64(config.seed ^ 0x5eedULL));
  second.reran = true;
  return second;
}

std::vector<MonotonicityViolation> monotonicity_check(const Chooser& choose, std::uint32_t k, const Rational& cap) {
  if (k == 0 || k > 4) throw ConfigError("monotonicity guard: need 1 <= k <= 4", "k");
  const std::int64_t ch = halves_of(cap, "cap");
  if (ch > 6) throw ConfigError("monotonicity guard: cap <= 3", "cap");
  std::vector<MonotonicityViolation> out;
  std::vector<std::int64_t> h(k, 0);
  std::vector<Rational> s(k);
  for (;;) {
    for (std::uint32_t i = 0; i < k; ++i) s[i] = Rational::fraction(h[i], 2);
    const CupId j = choose(s);
    for (CupId i = 0; i < k; ++i) {
      if (i == j || h[i] == 0) continue;
      std::vector<Rational> lowered = s;
      lowered[i] -= kHalf;
      const CupId got = choose(lowered);
      if (got != j) out.push_back(MonotonicityViolation{s, i, j, got});
    }
    std::uint32_t pos = 0;
    while (pos < k && h[pos] == ch) h[pos++] = 0;
    if (pos == k) break;
    ++h[pos];
  }
  return out;
}

CupId emptiest_cup(const std::vector<Rational>& fills) {
  CupId best = 0;
  for (CupId j = 1; j < fills.size(); ++j) {
    if (fills[j] < fills[best]) best = j;
  }
  return best;
}

namespace {

ojson state_json(const std::vector<Rational>& s) {
  ojson out = ojson::array();
  for (const auto& x : s) out.push_back(x.str());
  return out;
}

}  // namespace

ojson run_oracle_suite(std::uint64_t seed, std::uint64_t crossing_trials) {
  ojson report;
  bool all = true;

  // Equilibria: every lex permutation, k <= 5, m in {0, 1/2, ..., 6}.
  {
    std::uint64_t instances = 0, failures = 0;
    ojson first_failure = nullptr;
    for (std::uint32_t k = 1; k <= 5; ++k) {
      std::vector<std::uint32_t> perm(k);
      std::iota(perm.begin(), perm.end(), 0u);
      do {
        const ScoreFunction score = ScoreFunction::lex(perm);
        for (std::int64_t mh = 0; mh <= 12; ++mh) {
          const Rational m = Rational::fraction(mh, 2);
          ++instances;
          const auto eq = enumerate_equilibria(score, k, m);
          const auto local = equilibrium(score, k, m);
          if (eq.size() != 1 || eq.front() != local) {
            ++failures;
            if (first_failure.is_null()) {
              first_failure = ojson{{"k", k}, {"m", m.str()}, {"rank", perm}, {"found", eq.size()}};
            }
          }
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    all = all && failures == 0;
    report["equilibrium"] = ojson{{"instances", instances}, {"failures", failures}, {"pass", failures == 0},
                                  {"first_failure", first_failure}};
  }

  // Monotonicity of lex score emptiers, and the emptiest-cup control.
  {
    std::uint64_t violations = 0, checked = 0;
    for (std::uint32_t k = 1; k <= 4; ++k) {
      std::vector<std::uint32_t> perm(k);
      std::iota(perm.begin(), perm.end(), 0u);
      do {
        const ScoreFunction score = ScoreFunction::lex(perm);
        violations += monotonicity_check([&](const std::vector<Rational>& f) { return score_argmax(score, f); }, k, 3)
                          .size();
        ++checked;
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    const auto control = monotonicity_check(emptiest_cup, 3, 3);
    const bool pass = violations == 0 && !control.empty();
    all = all && pass;
    ojson example = nullptr;
    if (!control.empty()) {
      example = ojson{{"state", state_json(control.front().state)},
                      {"lowered", control.front().lowered},
                      {"expected", control.front().expected},
                      {"got", control.front().got}};
    }
    report["monotonicity"] = ojson{{"score_functions", checked},
                                   {"violations", violations},
                                   {"control_violations", control.size()},
                                   {"control_example", example},
                                   {"pass", pass}};
  }

  // Crossing law: one step of 2/5 into cup 0, and a round-robin pass over all cups.
  {
    GameConfig cfg;
    cfg.n = 8;
    cfg.p = 1;
    cfg.seed = seed;
    const Rational amount = Rational::fraction(2, 5);
    auto single = [&](const GameConfig& c) -> std::unique_ptr<FillSchedule> {
      return std::make_unique<BaselineSchedule>(BaselineSchedule::Kind::single_cup, c, 0, amount);
    };
    auto robin = [&](const GameConfig& c) -> std::unique_ptr<FillSchedule> {
      return std::make_unique<BaselineSchedule>(BaselineSchedule::Kind::round_robin, c, 0, amount);
    };
    const auto a = crossing_distribution_test(cfg, single, 1, 1, crossing_trials);
    const auto b = crossing_distribution_test(cfg, robin, 1, cfg.n, crossing_trials);
    double max_pair_z = 0;
    for (const auto& pr : b.pairs) max_pair_z = std::max(max_pair_z, std::abs(pr.z));
    const bool pass = a.pass && b.pass;
    all = all && pass;
    report["crossing"] = ojson{{"trials", crossing_trials},
                               {"frequency", a.cups[0].frequency},
                               {"z", a.cups[0].z},
                               {"max_pair_z", max_pair_z},
                               {"reran", a.reran || b.reran},
                               {"pass", pass}};
  }

  report["pass"] = all;
  return report;
}

}  // namespace cupgame
