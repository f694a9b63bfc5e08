#include "cupgame/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <omp.h>

namespace cupgame {

namespace {

// Reads fields of one JSON object and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const ojson& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj.is_object()) throw ConfigError("must be an object", path_.empty() ? "<root>" : path_);
  }

  std::string key(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }

  const ojson* get(const std::string& name) {
    used_.insert(name);
    auto it = obj_.find(name);
    if (it == obj_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const ojson& need(const std::string& name) {
    const ojson* v = get(name);
    if (!v) throw ConfigError("required", key(name));
    return *v;
  }

  std::uint64_t u64(const std::string& name, std::optional<std::uint64_t> fallback = std::nullopt) {
    const ojson* v = get(name);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("required", key(name));
    }
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
      throw ConfigError("must be a non-negative integer", key(name));
    }
    return v->get<std::uint64_t>();
  }

  std::optional<std::uint64_t> opt_u64(const std::string& name) {
    if (!get(name)) return std::nullopt;
    return u64(name);
  }

  std::uint32_t u32(const std::string& name, std::optional<std::uint32_t> fallback = std::nullopt) {
    const std::uint64_t v = u64(name, fallback);
    if (v > UINT32_MAX) throw ConfigError("out of range", key(name));
    return static_cast<std::uint32_t>(v);
  }

  bool boolean(const std::string& name, bool fallback) {
    const ojson* v = get(name);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError("must be true or false", key(name));
    return v->get<bool>();
  }

  std::string str(const std::string& name, std::optional<std::string> fallback = std::nullopt) {
    const ojson* v = get(name);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("required", key(name));
    }
    if (!v->is_string()) throw ConfigError("must be a string", key(name));
    return v->get<std::string>();
  }

  Rational rational(const std::string& name, std::optional<Rational> fallback = std::nullopt);
  std::optional<Rational> opt_rational(const std::string& name) {
    if (!get(name)) return std::nullopt;
    return rational(name);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError("unknown key", key(it.key()));
    }
  }

 private:
  const ojson& obj_;
  std::string path_;
  std::set<std::string> used_;
};

Rational rational_value(const ojson& v, const std::string& key) {
  try {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number_float()) {
      // Floats are read through their shortest decimal text.
      const std::string text = v.dump();
      if (text.find_first_of("eE") != std::string::npos) throw std::invalid_argument(text);
      return Rational::parse(text);
    }
  } catch (const std::invalid_argument&) {
    throw ConfigError("not a rational number", key);
  }
  throw ConfigError("must be a rational (string such as \"1/8\" or a number)", key);
}

Rational Fields::rational(const std::string& name, std::optional<Rational> fallback) {
  const ojson* v = get(name);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError("required", key(name));
  }
  return rational_value(*v, key(name));
}

GameConfig parse_game(const ojson& obj) {
  Fields f(obj, "game");
  GameConfig g;
  g.n = f.u32("n");
  g.p = f.u32("p", 1);
  g.epsilon = f.rational("epsilon", Rational(0));
  g.steps = f.u64("steps");
  g.seed = f.u64("seed", 0);
  if (auto h = f.opt_u64("truncation_h")) {
    if (*h > static_cast<std::uint64_t>(INT64_MAX)) throw ConfigError("out of range", "game.truncation_h");
    g.truncation_h = static_cast<std::int64_t>(*h);
  }
  g.snapshot_stride = f.u64("snapshot_stride", 1000);
  f.finish();
  try {
    g.validate();
  } catch (const ConfigError& e) {
    throw e.under("game");
  }
  return g;
}

ojson rational_json(const Rational& r) { return r.str(); }

// Normalized descriptor: defaults filled in, rationals as canonical strings.
ojson normalize_filler(const ojson& obj, const std::string& path, const GameConfig& g);

ojson normalize_pkc(Fields& f, const std::string& kind, const GameConfig& g) {
  ojson out;
  out["kind"] = kind;
  out["p"] = f.u32("p", g.p);
  out["k"] = f.u32("k");
  out["c"] = f.u32("c", 2);
  if (auto t = f.opt_u64("steps")) {
    out["steps"] = *t;
  } else {
    out["steps"] = nullptr;
  }
  out["rounds"] = f.u64("rounds", 1);
  const std::string subset = f.str("subset", std::string("prefix"));
  if (subset != "prefix" && subset != "random") throw ConfigError("must be \"prefix\" or \"random\"", f.key("subset"));
  out["subset"] = subset;
  return out;
}

ojson normalize_filler(const ojson& obj, const std::string& path, const GameConfig& g) {
  Fields f(obj, path);
  const std::string kind = f.str("kind");
  ojson out;
  if (kind == "pkc" || kind == "clairvoyant_pkc") {
    out = normalize_pkc(f, kind, g);
  } else if (kind == "tail_amplifier") {
    out["kind"] = kind;
    out["c1"] = rational_json(f.rational("c1", Rational(2)));
    out["coeff"] = f.u64("coeff", 1);
    out["degree"] = f.u32("degree", 1);
    if (auto m = f.opt_u64("max_w")) {
      out["max_w"] = *m;
    } else {
      out["max_w"] = nullptr;
    }
    out["adaptive"] = f.boolean("adaptive", false);
  } else if (kind == "fuzzing") {
    out["kind"] = kind;
    out["phase_len"] = f.u64("phase_len");
    const ojson* unit = f.get("unit");
    if (!unit || (unit->is_string() && unit->get<std::string>() == "augmented")) {
      out["unit"] = rational_json((Rational(1) - g.epsilon) * Rational::fraction(1, 2));
    } else {
      out["unit"] = rational_json(rational_value(*unit, f.key("unit")));
    }
  } else if (kind == "unpredictability_attack") {
    out["kind"] = kind;
    out["t"] = f.u64("t");
    out["R"] = f.u64("R");
    out["c"] = f.u64("c", 1);
    if (auto r = f.opt_u64("repeat_every")) {
      out["repeat_every"] = *r;
    } else {
      out["repeat_every"] = nullptr;
    }
    out["base"] = normalize_filler(f.need("base"), f.key("base"), g);
  } else if (kind == "baseline") {
    out["kind"] = kind;
    const std::string which = f.str("baseline", std::string("uniform"));
    if (which != "uniform" && which != "single_cup" && which != "round_robin") {
      throw ConfigError("must be uniform, single_cup or round_robin", f.key("baseline"));
    }
    out["baseline"] = which;
    if (auto a = f.opt_rational("amount")) {
      out["amount"] = rational_json(*a);
    } else {
      out["amount"] = nullptr;
    }
  } else {
    throw ConfigError("unknown filler kind '" + kind + "'", f.key("kind"));
  }
  f.finish();
  return out;
}

ojson normalize_score(const ojson& obj, const std::string& path) {
  Fields f(obj, path);
  ojson out;
  const std::string family = f.str("family", std::string("lex"));
  out["family"] = family;
  if (family == "lex") {
    const ojson* rank = f.get("rank");
    if (!rank) {
      out["rank"] = "random";
    } else if (rank->is_string()) {
      const std::string r = rank->get<std::string>();
      if (r != "random" && r != "lowest_index") throw ConfigError("must be a permutation, \"random\" or \"lowest_index\"", f.key("rank"));
      out["rank"] = r;
    } else if (rank->is_array()) {
      std::vector<std::uint32_t> perm;
      for (const auto& x : *rank) {
        if (!x.is_number_unsigned()) throw ConfigError("ranks must be non-negative integers", f.key("rank"));
        perm.push_back(x.get<std::uint32_t>());
      }
      out["rank"] = perm;
    } else {
      throw ConfigError("must be a permutation, \"random\" or \"lowest_index\"", f.key("rank"));
    }
  } else if (family == "affine") {
    for (const char* name : {"a", "b"}) {
      const ojson& arr = f.need(name);
      if (!arr.is_array()) throw ConfigError("must be an array", f.key(name));
      ojson vals = ojson::array();
      for (const auto& x : arr) vals.push_back(rational_json(rational_value(x, f.key(name))));
      out[name] = std::move(vals);
    }
    out["cap"] = rational_json(f.rational("cap", Rational(8)));
  } else {
    throw ConfigError("unknown score family '" + family + "'", f.key("family"));
  }
  f.finish();
  return out;
}

ojson normalize_emptier(const ojson& obj) {
  Fields f(obj, "emptier");
  const std::string kind = f.str("kind");
  ojson out;
  out["kind"] = kind;
  if (kind == "greedy" || kind == "smoothed" || kind == "asymmetric") {
    out["index"] = f.boolean("index", true);
  } else if (kind == "score" || kind == "dynamic_score") {
    if (kind == "score") {
      out["score"] = normalize_score(f.get("score") ? f.need("score") : ojson::object(), "emptier.score");
    } else {
      const ojson& sched = f.need("schedule");
      if (!sched.is_array() || sched.empty()) throw ConfigError("must be a non-empty array", "emptier.schedule");
      ojson list = ojson::array();
      for (std::size_t i = 0; i < sched.size(); ++i) {
        list.push_back(normalize_score(sched[i], "emptier.schedule[" + std::to_string(i) + "]"));
      }
      out["schedule"] = std::move(list);
    }
    out["remove_at"] = rational_json(f.rational("remove_at", Rational(1)));
    out["granule"] = rational_json(f.rational("granule", Rational::fraction(1, 2)));
  } else {
    throw ConfigError("unknown emptier kind '" + kind + "'", "emptier.kind");
  }
  f.finish();
  return out;
}

Rational desc_rational(const ojson& v) { return Rational::parse(v.get<std::string>()); }

std::optional<std::uint64_t> desc_opt(const ojson& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<std::uint64_t>();
}

std::unique_ptr<FillSchedule> build_filler(const ojson& d, const GameConfig& g, std::uint64_t seed) {
  const std::string kind = d.at("kind").get<std::string>();
  if (kind == "pkc" || kind == "clairvoyant_pkc") {
    PkcParams params{d.at("p").get<std::uint32_t>(), d.at("k").get<std::uint32_t>(), d.at("c").get<std::uint32_t>(),
                     desc_opt(d.at("steps"))};
    const auto subset =
        d.at("subset").get<std::string>() == "random" ? PkcSchedule::Subset::random : PkcSchedule::Subset::prefix;
    const auto rounds = d.at("rounds").get<std::uint64_t>();
    if (kind == "pkc") return std::make_unique<PkcSchedule>(params, g, rounds, subset, seed);
    return std::make_unique<ClairvoyantPkc>(params, g, rounds, subset, seed);
  }
  if (kind == "tail_amplifier") {
    TailAmplifierParams params;
    params.c1 = desc_rational(d.at("c1"));
    params.coeff = d.at("coeff").get<std::uint64_t>();
    params.degree = d.at("degree").get<std::uint32_t>();
    params.max_w = desc_opt(d.at("max_w"));
    params.adaptive = d.at("adaptive").get<bool>();
    return std::make_unique<TailAmplifier>(params, g, seed);
  }
  if (kind == "fuzzing") {
    return std::make_unique<FuzzingSchedule>(g.n, d.at("phase_len").get<std::uint64_t>(), desc_rational(d.at("unit")),
                                             g, seed);
  }
  if (kind == "unpredictability_attack") {
    std::unique_ptr<FillSchedule> base;
    try {
      base = build_filler(d.at("base"), g, seed);
    } catch (const ConfigError& e) {
      throw e.under("base");
    }
    return std::make_unique<UnpredictabilityAttack>(std::move(base), d.at("t").get<std::uint64_t>(),
                                                    d.at("R").get<std::uint64_t>(), d.at("c").get<std::uint64_t>(), g,
                                                    desc_opt(d.at("repeat_every")));
  }
  if (kind == "baseline") {
    const std::string which = d.at("baseline").get<std::string>();
    const auto k = which == "uniform"      ? BaselineSchedule::Kind::uniform
                   : which == "single_cup" ? BaselineSchedule::Kind::single_cup
                                           : BaselineSchedule::Kind::round_robin;
    std::optional<Rational> amount;
    if (!d.at("amount").is_null()) amount = desc_rational(d.at("amount"));
    return std::make_unique<BaselineSchedule>(k, g, seed, amount);
  }
  throw ConfigError("unknown filler kind '" + kind + "'", "kind");
}

ScoreFunction build_score(const ojson& d, std::uint32_t n, Xoshiro256ss& rng) {
  if (d.at("family").get<std::string>() == "lex") {
    const ojson& rank = d.at("rank");
    if (rank.is_string() && rank.get<std::string>() == "lowest_index") return ScoreFunction::lex_lowest_index(n);
    if (rank.is_string()) {
      std::vector<std::uint32_t> perm(n);
      for (std::uint32_t j = 0; j < n; ++j) perm[j] = j;
      shuffle(perm, rng);
      return ScoreFunction::lex(std::move(perm));
    }
    return ScoreFunction::lex(rank.get<std::vector<std::uint32_t>>());
  }
  std::vector<Rational> a, b;
  for (const auto& x : d.at("a")) a.push_back(desc_rational(x));
  for (const auto& x : d.at("b")) b.push_back(desc_rational(x));
  return ScoreFunction::affine(std::move(a), std::move(b), desc_rational(d.at("cap")));
}

}  // namespace

std::unique_ptr<FillSchedule> make_filler(const ojson& desc, const GameConfig& game) {
  try {
    return build_filler(desc, game, derive_seed(game.seed, stream_id(StreamRole::filler, 0)));
  } catch (const ConfigError& e) {
    throw e.under("filler");
  }
}

std::unique_ptr<Emptier> make_emptier(const ojson& desc, const GameConfig& game) {
  try {
    const std::string kind = desc.at("kind").get<std::string>();
    if (kind == "greedy" || kind == "smoothed") {
      return std::make_unique<GreedyEmptier>(kind == "smoothed", desc.at("index").get<bool>());
    }
    if (kind == "asymmetric") return std::make_unique<AsymmetricEmptier>(desc.at("index").get<bool>());
    Xoshiro256ss rng(game.seed, StreamRole::emptier, 0);
    SkipRule skip{desc_rational(desc.at("remove_at"))};
    const Rational granule = desc_rational(desc.at("granule"));
    if (kind == "score") {
      return std::make_unique<ScoreEmptier>(build_score(desc.at("score"), game.n, rng), skip, granule);
    }
    std::vector<ScoreFunction> schedule;
    for (const auto& s : desc.at("schedule")) schedule.push_back(build_score(s, game.n, rng));
    return std::make_unique<ScoreEmptier>(std::move(schedule), skip, granule);
  } catch (const ConfigError& e) {
    throw e.under("emptier");
  }
}

ExperimentConfig parse_experiment(const ojson& doc) {
  Fields f(doc, "");
  ExperimentConfig cfg;
  cfg.game = parse_game(f.need("game"));
  cfg.filler = normalize_filler(f.need("filler"), "filler", cfg.game);
  cfg.emptier = normalize_emptier(f.need("emptier"));
  cfg.trials = f.u64("trials", 1);
  if (cfg.trials == 0) throw ConfigError("must be >= 1", "trials");
  cfg.first_trial = f.u64("first_trial", 0);
  if (const ojson* m = f.get("metrics")) {
    if (!m->is_array()) throw ConfigError("must be an array of metric names", "metrics");
    cfg.metrics.clear();
    for (const auto& x : *m) {
      if (!x.is_string()) throw ConfigError("must be an array of metric names", "metrics");
      cfg.metrics.push_back(x.get<std::string>());
    }
  }
  cfg.sample_stride = f.u64("sample_stride", 1000);
  cfg.true_fill = f.boolean("true_fill", false);
  if (auto q = f.opt_u64("levels")) {
    if (*q == 0 || *q > 1u << 16) throw ConfigError("must be in [1, 65536]", "levels");
    cfg.levels = static_cast<std::uint32_t>(*q);
  }
  cfg.output = f.str("output", std::string("out"));
  f.finish();

  // Instantiate once so descriptor errors surface before any trial runs.
  SeriesSampler probe(cfg.metrics, cfg.sample_stride, cfg.true_fill, cfg.levels);
  GameConfig g = cfg.game;
  g.seed = trial_seed(cfg.game.seed, 0);
  auto filler = make_filler(cfg.filler, g);
  auto emptier = make_emptier(cfg.emptier, g);
  try {
    emptier->validate(g);
  } catch (const ConfigError& e) {
    throw e.under("emptier");
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'", "config");
  ojson doc;
  try {
    doc = ojson::parse(in);
  } catch (const ojson::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what(), "config");
  }
  return parse_experiment(doc);
}

std::uint64_t trial_seed(std::uint64_t root, std::uint64_t index) {
  return derive_seed(root, stream_id(StreamRole::trial, static_cast<std::uint32_t>(index)));
}

namespace {

class TrueFillMax : public Observer {
 public:
  void on_step(const StepContext& ctx) override {
    const auto fills = fills_for_metrics(ctx.state, true);
    const Rational b = backlog(fills);
    if (b > max_backlog) max_backlog = b;
    max_tail = std::max(max_tail, tail_size(fills));
  }
  Rational max_backlog;
  std::uint32_t max_tail = 0;
};

}  // namespace

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t index, const RunSettings& settings) {
  GameConfig g = config.game;
  g.seed = trial_seed(config.game.seed, index);
  auto filler = make_filler(config.filler, g);
  auto emptier = make_emptier(config.emptier, g);

  MaxTracker maxima;
  TrueFillMax true_max;
  RestWindowMonitor rests(UINT64_MAX);
  WastedStepCounter wasted;
  SeriesSampler sampler(config.metrics, config.sample_stride, config.true_fill, config.levels);
  std::vector<Observer*> observers{&maxima, &rests, &wasted, &sampler};
  if (config.true_fill) observers.push_back(&true_max);
  std::unique_ptr<ProbeMonitor> probe;
  if (auto* attack = dynamic_cast<UnpredictabilityAttack*>(filler.get())) {
    probe = std::make_unique<ProbeMonitor>(attack->probe_set());
    observers.push_back(probe.get());
  }

  std::ofstream trace_file;
  RunOptions options{settings.mode, nullptr, std::nullopt};
  if (settings.trace_dir) {
    const auto path = std::filesystem::path(*settings.trace_dir) / ("trace_" + std::to_string(index) + ".ndjson");
    trace_file.open(path, std::ios::binary);
    if (!trace_file) throw Error("cannot write " + path.string());
    options.sink = &trace_file;
    if (options.mode == TraceMode::none) options.mode = TraceMode::hash_only;
  }
  const Trace trace = run_game(g, *filler, *emptier, observers, options);

  TrialResult r;
  r.trial = index;
  r.seed = g.seed;
  r.max_backlog = config.true_fill ? true_max.max_backlog : maxima.max_backlog;
  r.max_tail = config.true_fill ? true_max.max_tail : maxima.max_tail;
  r.max_queue = maxima.max_queue;
  r.rest_steps = rests.rest_count();
  if (!wasted.per_phase().empty()) {
    std::uint64_t total = 0;
    for (const auto& [phase, counts] : wasted.per_phase()) total += counts.second;
    r.wasted_steps = total;
  }
  if (probe) r.probe_fully_queued = probe->fully_queued_steps();
  r.trace_hash = trace.hash;
  r.samples = sampler.samples();
  return r;
}

void parallel_for_trials(std::uint64_t count, int threads, const std::function<void(std::uint64_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::uint64_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void serial_for_trials(std::uint64_t count, const std::function<void(std::uint64_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<TrialResult> run_trials(const ExperimentConfig& config, int threads, const RunSettings& settings) {
  std::vector<TrialResult> out(config.trials);
  parallel_for_trials(config.trials, threads,
                      [&](std::uint64_t i) { out[i] = run_trial(config, config.first_trial + i, settings); });
  return out;
}

std::vector<TrialResult> run_trials_serial(const ExperimentConfig& config, const RunSettings& settings) {
  std::vector<TrialResult> out(config.trials);
  serial_for_trials(config.trials, [&](std::uint64_t i) { out[i] = run_trial(config, config.first_trial + i, settings); });
  return out;
}

std::string results_csv(const std::vector<TrialResult>& results) {
  std::vector<const TrialResult*> order;
  for (const auto& r : results) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->trial < b->trial; });
  std::ostringstream out;
  out << "trial,step,metric,value_num,value_den\n";
  for (const auto* r : order) {
    for (const auto& s : r->samples) {
      out << r->trial << ',' << s.step << ',' << s.metric << ',' << s.value.numerator_str() << ','
          << s.value.denominator_str() << '\n';
    }
  }
  return out.str();
}

Quantiles quantiles(std::vector<double> values) {
  Quantiles q;
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  q.max = values.back();
  double sum = 0;
  for (const double v : values) sum += v;  // sorted order keeps the sum order-independent
  q.mean = sum / static_cast<double>(values.size());
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(values.size())));
  q.p99 = values[std::max<std::size_t>(rank, 1) - 1];
  return q;
}

ojson summary_key(const ExperimentConfig& config) {
  ojson key;
  key["n"] = config.game.n;
  key["p"] = config.game.p;
  key["epsilon"] = config.game.epsilon.str();
  key["filler"] = config.filler;
  key["emptier"] = config.emptier;
  key["true_fill"] = config.true_fill;
  return key;
}

namespace {

ojson quantiles_json(const Quantiles& q) { return ojson{{"max", q.max}, {"mean", q.mean}, {"p99", q.p99}}; }

ojson aggregates_json(const ojson& trials) {
  std::vector<double> backlog, tail, queue;
  std::optional<Rational> exact_max;
  for (const auto& t : trials) {
    const Rational b = Rational::parse(t.at("max_backlog").get<std::string>());
    if (!exact_max || b > *exact_max) exact_max = b;
    backlog.push_back(b.to_double());
    tail.push_back(t.at("max_tail").get<double>());
    queue.push_back(t.at("max_queue").get<double>());
  }
  ojson agg;
  agg["trials"] = trials.size();
  agg["max_backlog"] = quantiles_json(quantiles(backlog));
  agg["max_backlog"]["max_exact"] = exact_max ? exact_max->str() : "0";
  agg["max_tail"] = quantiles_json(quantiles(tail));
  agg["max_queue"] = quantiles_json(quantiles(queue));
  return agg;
}

ojson sorted_trials(ojson trials) {
  std::vector<ojson> items(trials.begin(), trials.end());
  std::stable_sort(items.begin(), items.end(), [](const ojson& a, const ojson& b) {
    const auto ka = std::make_pair(a.at("seed").get<std::uint64_t>(), a.at("trial").get<std::uint64_t>());
    const auto kb = std::make_pair(b.at("seed").get<std::uint64_t>(), b.at("trial").get<std::uint64_t>());
    return ka < kb;
  });
  ojson out = ojson::array();
  for (auto& x : items) out.push_back(std::move(x));
  return out;
}

}  // namespace

ojson summary_json(const ojson& key, const std::vector<TrialResult>& results) {
  ojson trials = ojson::array();
  std::vector<const TrialResult*> order;
  for (const auto& r : results) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->trial < b->trial; });
  for (const auto* r : order) {
    ojson t;
    t["trial"] = r->trial;
    t["seed"] = r->seed;
    t["max_backlog"] = r->max_backlog.str();
    t["max_backlog_approx"] = r->max_backlog.to_double();
    t["max_tail"] = r->max_tail;
    t["max_queue"] = r->max_queue;
    t["rest_steps"] = r->rest_steps;
    if (r->wasted_steps) t["wasted_steps"] = *r->wasted_steps;
    if (r->probe_fully_queued) t["probe_fully_queued_steps"] = *r->probe_fully_queued;
    if (r->trace_hash) {
      t["trace_hash"] = hex64(*r->trace_hash);
    } else {
      t["trace_hash"] = nullptr;
    }
    trials.push_back(std::move(t));
  }
  ojson out;
  out["schema"] = "cupgames.summary/1";
  out["key"] = key;
  out["aggregates"] = aggregates_json(trials);
  out["trials"] = std::move(trials);
  return out;
}

ojson aggregate_summaries(const std::vector<ojson>& summaries) {
  if (summaries.empty()) throw ConfigError("no summaries to aggregate", "inputs");
  const ojson& key = summaries.front().at("key");
  ojson trials = ojson::array();
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const ojson& s = summaries[i];
    if (!s.contains("schema") || s.at("schema") != "cupgames.summary/1") {
      throw ConfigError("input " + std::to_string(i) + " is not a cupgames summary", "schema");
    }
    const ojson& k = s.at("key");
    if (k != key) {
      std::string field = "key";
      for (auto it = key.begin(); it != key.end(); ++it) {
        if (!k.contains(it.key()) || k.at(it.key()) != it.value()) {
          field = "key." + it.key();
          break;
        }
      }
      throw ConfigError("schema mismatch between inputs 0 and " + std::to_string(i), field);
    }
    for (const auto& t : s.at("trials")) trials.push_back(t);
  }
  trials = sorted_trials(std::move(trials));
  ojson out;
  out["schema"] = "cupgames.summary/1";
  out["key"] = key;
  out["aggregates"] = aggregates_json(trials);
  out["trials"] = std::move(trials);
  return out;
}

}  // namespace cupgame
