#include <doctest.h>

#include "cupgame/experiment.hpp"

using namespace cupgame;

namespace {

ojson base_doc() {
  return ojson::parse(R"({
    "game": {"n": 32, "p": 1, "epsilon": "1/8", "steps": 3000, "seed": 11},
    "filler": {"kind": "pkc", "k": 8, "c": 1, "rounds": 0, "subset": "random"},
    "emptier": {"kind": "asymmetric"},
    "trials": 6,
    "metrics": ["backlog", "tail_size", "queue_size"],
    "sample_stride": 500
  })");
}

std::string key_of(const ojson& doc) {
  try {
    parse_experiment(doc);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("strict parsing names the offending key") {
  auto doc = base_doc();
  doc["filler"]["kk"] = 3;
  CHECK(key_of(doc) == "filler.kk");
  doc = base_doc();
  doc["filler"]["k"] = 64;
  CHECK(key_of(doc) == "filler.k");
  doc = base_doc();
  doc["game"]["epsilon"] = "2";
  CHECK(key_of(doc) == "game.epsilon");
  doc = base_doc();
  doc["trials"] = 0;
  CHECK(key_of(doc) == "trials");
  doc = base_doc();
  doc["emptier"] = ojson{{"kind", "score"}};
  doc["filler"] = ojson{{"kind", "baseline"}};
  doc["game"]["p"] = 2;
  CHECK(key_of(doc).rfind("emptier", 0) == 0);
  doc = base_doc();
  doc["metrics"] = ojson::array({"backlog", "bogus"});
  CHECK(key_of(doc) == "metrics");
  doc = base_doc();
  doc["extra"] = true;
  CHECK(key_of(doc) == "extra");
  doc = base_doc();
  doc["filler"] = ojson{{"kind", "unpredictability_attack"}, {"t", 5}, {"R", 2}, {"base", {{"kind", "nope"}}}};
  CHECK(key_of(doc) == "filler.base.kind");
  CHECK(key_of(base_doc()) == "<none>");
}

TEST_CASE("rationals accepted as strings, integers and plain decimals") {
  auto doc = base_doc();
  doc["game"]["epsilon"] = 0.125;
  CHECK(parse_experiment(doc).game.epsilon == Rational::fraction(1, 8));
  doc["game"]["epsilon"] = 0;
  CHECK(parse_experiment(doc).game.epsilon == 0);
  doc["game"]["epsilon"] = 1e-30;
  CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
}

TEST_CASE("trial seeds are distinct") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(trial_seed(11, i));
  CHECK(seeds.size() == 1000);
}

TEST_CASE("parallel and serial runners agree") {
  const auto cfg = parse_experiment(base_doc());
  RunSettings hashed;
  hashed.mode = TraceMode::hash_only;
  const auto par = run_trials(cfg, 3, hashed);
  const auto ser = run_trials_serial(cfg, hashed);
  REQUIRE(par.size() == 6);
  CHECK(results_csv(par) == results_csv(ser));
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].trace_hash == ser[i].trace_hash);
    CHECK(par[i].seed == ser[i].seed);
    CHECK(par[i].max_backlog == ser[i].max_backlog);
  }
  CHECK(summary_json(summary_key(cfg), par).dump() == summary_json(summary_key(cfg), ser).dump());
}

TEST_CASE("csv layout") {
  auto doc = base_doc();
  doc["trials"] = 2;
  const auto results = run_trials_serial(parse_experiment(doc));
  const std::string csv = results_csv(results);
  CHECK(csv.rfind("trial,step,metric,value_num,value_den\n", 0) == 0);
  CHECK(csv.find("\n1,3000,queue_size,") != std::string::npos);
  std::size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == 1 + 2 * 6 * 3);
}

TEST_CASE("parallel_for_trials rethrows the lowest failing index") {
  try {
    parallel_for_trials(10, 2, [](std::uint64_t i) {
      if (i == 3 || i == 7) throw Error("trial " + std::to_string(i));
    });
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "trial 3");
  }
}

TEST_CASE("aggregation is order independent and associative") {
  auto doc = base_doc();
  doc["trials"] = 2;
  const auto cfg = parse_experiment(doc);
  const auto both = run_trials_serial(cfg);
  const ojson key = summary_key(cfg);
  const ojson one = summary_json(key, {both[0]});
  const ojson two = summary_json(key, {both[1]});
  const ojson whole = summary_json(key, both);
  CHECK(aggregate_summaries({one, two})["aggregates"] == whole["aggregates"]);
  CHECK(aggregate_summaries({two, one}).dump() == aggregate_summaries({one, two}).dump());
  CHECK(aggregate_summaries({aggregate_summaries({one, two}), whole})["aggregates"]["trials"] == 4);
  CHECK_THROWS_AS(aggregate_summaries({}), ConfigError);

  auto other = doc;
  other["game"]["n"] = 64;
  const auto cfg2 = parse_experiment(other);
  const ojson alien = summary_json(summary_key(cfg2), run_trials_serial(cfg2));
  try {
    aggregate_summaries({one, alien});
    FAIL("expected a mismatch");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "key.n");
  }
}

TEST_CASE("quantiles") {
  const auto q = quantiles({3, 1, 2, 4});
  CHECK(q.max == 4);
  CHECK(q.mean == doctest::Approx(2.5));
  CHECK(q.p99 == 4);
  std::vector<double> many;
  for (int i = 1; i <= 200; ++i) many.push_back(i);
  CHECK(quantiles(many).p99 == 198);
}

TEST_CASE("every descriptor kind builds") {
  const char* fillers[] = {
      R"({"kind": "pkc", "k": 8, "c": 1})",
      R"({"kind": "tail_amplifier", "max_w": 2})",
      R"({"kind": "fuzzing", "phase_len": 10, "unit": "augmented"})",
      R"({"kind": "unpredictability_attack", "t": 10, "R": 3, "c": 2, "base": {"kind": "baseline"}})",
      R"({"kind": "baseline", "baseline": "round_robin", "amount": "1/2"})",
  };
  for (const char* f : fillers) {
    auto doc = base_doc();
    doc["filler"] = ojson::parse(f);
    doc["trials"] = 1;
    doc["game"]["steps"] = 200;
    if (doc["filler"]["kind"] == "tail_amplifier") doc["game"]["p"] = 2;
    if (doc["filler"]["kind"] == "fuzzing") doc["emptier"] = ojson{{"kind", "smoothed"}};
    CAPTURE(f);
    const auto cfg = parse_experiment(doc);
    CHECK_NOTHROW(run_trials_serial(cfg));
  }
  auto doc = base_doc();
  doc["filler"] = ojson::parse(R"({"kind": "baseline", "amount": "1/2"})");
  doc["game"]["epsilon"] = 0;
  doc["emptier"] = ojson::parse(R"({"kind": "dynamic_score", "schedule": [{"rank": "lowest_index"}, {}]})");
  CHECK_NOTHROW(run_trials_serial(parse_experiment(doc)));
  doc["filler"] = ojson::parse(R"({"kind": "fuzzing", "phase_len": 5})");
  doc["emptier"] = ojson::parse(R"({"kind": "score", "score": {"rank": "random"}})");
  CHECK_NOTHROW(run_trials_serial(parse_experiment(doc)));
  doc["emptier"] = ojson::parse(R"({"kind": "score", "granule": "augmented"})");
  CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
  doc["emptier"] = ojson::parse(R"({"kind": "score", "score": {"family": "affine", "a": [], "b": []}})");
  CHECK_THROWS_AS(parse_experiment(doc), ConfigError);
}

TEST_CASE("clairvoyant filler against a randomized emptier") {
  auto doc = base_doc();
  doc["filler"]["kind"] = "clairvoyant_pkc";
  CHECK_THROWS_AS(run_trials_serial(parse_experiment(doc)), CapabilityMismatch);
}
