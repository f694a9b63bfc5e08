#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cupgame/experiment.hpp"
#include "cupgame/oracle.hpp"

namespace fs = std::filesystem;
using namespace cupgame;

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, capability = 3, invariant = 4 };

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> first_trial;
  int parallel = 1;
  bool trace = false;
  bool true_fill = false;
  std::optional<std::string> out;
};

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv("CUPGAMES_SEED");
  if (!text || !*text) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 0);
    if (used != std::string(text).size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("not an unsigned integer: '" + std::string(text) + "'", "CUPGAMES_SEED");
  }
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
}

int run(const RunArgs& args) {
  ExperimentConfig cfg = load_experiment(args.config);
  if (args.seed) {
    cfg.game.seed = *args.seed;
  } else if (auto s = env_seed()) {
    cfg.game.seed = *s;
  }
  if (args.trials) {
    if (*args.trials == 0) throw ConfigError("must be >= 1", "trials");
    cfg.trials = *args.trials;
  }
  if (args.first_trial) cfg.first_trial = *args.first_trial;
  if (args.true_fill) cfg.true_fill = true;
  if (args.out) cfg.output = *args.out;

  const fs::path dir(cfg.output);
  fs::create_directories(dir);
  RunSettings settings;
  if (args.trace) {
    fs::create_directories(dir / "traces");
    settings.mode = TraceMode::full;
    settings.trace_dir = (dir / "traces").string();
  }
  const auto results = run_trials(cfg, args.parallel, settings);
  write_file(dir / "results.csv", results_csv(results));
  write_file(dir / "summary.json", summary_json(summary_key(cfg), results).dump(2) + "\n");
  std::cerr << "wrote " << results.size() << " trials to " << dir.string() << "\n";
  return ok;
}

int aggregate(const std::vector<std::string>& inputs, const std::optional<std::string>& out) {
  std::vector<ojson> docs;
  for (const auto& in : inputs) {
    fs::path path(in);
    if (fs::is_directory(path)) path /= "summary.json";
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot read " + path.string(), "inputs");
    try {
      docs.push_back(ojson::parse(file));
    } catch (const ojson::parse_error& e) {
      throw ConfigError(path.string() + " is not JSON: " + e.what(), "inputs");
    }
  }
  const std::string body = aggregate_summaries(docs).dump(2) + "\n";
  if (out) {
    fs::path path(*out);
    if (fs::is_directory(path)) path /= "summary.json";
    write_file(path, body);
  } else {
    std::cout << body;
  }
  return ok;
}

int oracle(std::uint64_t seed, std::uint64_t trials, const std::optional<std::string>& out) {
  const ojson report = run_oracle_suite(seed, trials);
  const std::string body = report.dump(2) + "\n";
  if (out) {
    write_file(*out, body);
  } else {
    std::cout << body;
  }
  return report.at("pass").get<bool>() ? ok : failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cup game experiment runner"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run the trials described by a config");
  run_cmd->add_option("--config", run_args.config, "Experiment JSON")->required();
  run_cmd->add_option("--seed", run_args.seed, "Root seed (overrides CUPGAMES_SEED and the config)");
  run_cmd->add_option("--trials", run_args.trials, "Number of trials");
  run_cmd->add_option("--first-trial", run_args.first_trial, "Index of the first trial (for split runs)");
  run_cmd->add_option("--parallel", run_args.parallel, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--trace", run_args.trace, "Write NDJSON traces under <out>/traces");
  run_cmd->add_flag("--true-fill", run_args.true_fill, "Report metrics on max(0, fill - offset)");
  run_cmd->add_option("--out", run_args.out, "Output directory");

  std::vector<std::string> agg_inputs;
  std::optional<std::string> agg_out;
  auto* agg_cmd = app.add_subcommand("aggregate", "Merge summary.json files from several runs");
  agg_cmd->add_option("inputs", agg_inputs, "Run directories or summary files")->required();
  agg_cmd->add_option("--out", agg_out, "Output file or directory (default stdout)");

  std::uint64_t oracle_seed = 1;
  std::uint64_t oracle_trials = 100000;
  std::optional<std::string> oracle_out;
  auto* oracle_cmd = app.add_subcommand("oracle", "Run the brute-force oracle suite");
  oracle_cmd->add_option("--seed", oracle_seed, "Seed for the crossing test");
  oracle_cmd->add_option("--trials", oracle_trials, "Crossing test trials");
  oracle_cmd->add_option("--out", oracle_out, "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : config_error;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*agg_cmd) return aggregate(agg_inputs, agg_out);
    if (*oracle_cmd) return oracle(oracle_seed, oracle_trials, oracle_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const CapabilityMismatch& e) {
    std::cerr << "capability mismatch: " << e.what() << "\n";
    return capability;
  } catch (const RuleViolation& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return invariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
  return failure;
}
