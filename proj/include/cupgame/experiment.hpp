#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cupgame/emptiers.hpp"
#include "cupgame/fillers.hpp"
#include "cupgame/metrics.hpp"

namespace cupgame {

struct ExperimentConfig {
  GameConfig game;
  ojson filler;   // normalized descriptors; also the aggregation key
  ojson emptier;
  std::uint64_t trials = 1;
  /// Trials run as indices first_trial .. first_trial + trials - 1, so split
  /// runs can be merged with aggregate.
  std::uint64_t first_trial = 0;
  std::vector<std::string> metrics{"backlog", "tail_size", "queue_size"};
  std::uint64_t sample_stride = 1000;
  bool true_fill = false;
  std::optional<std::uint32_t> levels;
  std::string output = "out";
};

/// Strict parse: unknown keys and bad values throw ConfigError naming the key
/// path (e.g. "filler.k").
ExperimentConfig parse_experiment(const ojson& doc);
/// Reads and parses a JSON file; syntax errors are ConfigErrors too.
ExperimentConfig load_experiment(const std::string& path);

/// Builds a filler for one game; randomness comes from game.seed.
std::unique_ptr<FillSchedule> make_filler(const ojson& desc, const GameConfig& game);
std::unique_ptr<Emptier> make_emptier(const ojson& desc, const GameConfig& game);

/// Seed of trial `index` under `root`.
std::uint64_t trial_seed(std::uint64_t root, std::uint64_t index);

struct TrialResult {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  Rational max_backlog;
  std::uint32_t max_tail = 0;
  std::uint64_t max_queue = 0;
  std::uint64_t rest_steps = 0;
  std::optional<std::uint64_t> wasted_steps;
  std::optional<std::uint64_t> probe_fully_queued;
  std::optional<std::uint64_t> trace_hash;
  std::vector<Sample> samples;
};

struct RunSettings {
  TraceMode mode = TraceMode::none;
  /// When set, trial i writes <trace_dir>/trace_<i>.ndjson.
  std::optional<std::string> trace_dir;
};

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t index, const RunSettings& settings = {});

/// Runs body(i) for i in [0, count): OpenMP dynamic schedule over `threads`
/// threads. Exceptions are captured per index; the lowest failing index is
/// rethrown after all work ends.
void parallel_for_trials(std::uint64_t count, int threads, const std::function<void(std::uint64_t)>& body);
/// The same contract, one index after another.
void serial_for_trials(std::uint64_t count, const std::function<void(std::uint64_t)>& body);

std::vector<TrialResult> run_trials(const ExperimentConfig& config, int threads, const RunSettings& settings = {});
std::vector<TrialResult> run_trials_serial(const ExperimentConfig& config, const RunSettings& settings = {});

/// "trial,step,metric,value_num,value_den" rows, by trial then sample order.
std::string results_csv(const std::vector<TrialResult>& results);

struct Quantiles {
  double max = 0;
  double mean = 0;
  double p99 = 0;  // nearest rank
};
Quantiles quantiles(std::vector<double> values);

ojson summary_key(const ExperimentConfig& config);
ojson summary_json(const ojson& key, const std::vector<TrialResult>& results);

/// Merges summary.json documents with equal keys; throws ConfigError on an
/// empty list or on mismatched keys.
ojson aggregate_summaries(const std::vector<ojson>& summaries);

}  // namespace cupgame
