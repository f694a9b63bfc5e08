#include "cupgame/engine.hpp"

namespace cupgame {

ojson trace_header(const GameConfig& config, const FillSchedule& filler, const Emptier& emptier,
                   const CupState& state) {
  ojson game;
  game["n"] = config.n;
  game["p"] = config.p;
  game["epsilon"] = config.epsilon.str();
  game["steps"] = config.steps;
  game["seed"] = config.seed;
  if (config.truncation_h) {
    game["truncation_h"] = *config.truncation_h;
  } else {
    game["truncation_h"] = nullptr;
  }
  game["snapshot_stride"] = config.snapshot_stride;

  ojson header;
  header["trace"] = "cupgames";
  header["version"] = 1;
  header["game"] = std::move(game);
  header["filler"] = filler.describe();
  header["emptier"] = emptier.describe();
  ojson offsets = ojson::array();
  ojson priorities = ojson::array();
  for (CupId j = 0; j < state.size(); ++j) {
    offsets.push_back(state.offsets[j].str());
    priorities.push_back(state.priorities[j].str());
  }
  header["offsets"] = std::move(offsets);
  header["priorities"] = std::move(priorities);
  header["annotations"] = filler.annotations();
  return header;
}

Trace run_game(const GameConfig& config, FillSchedule& filler, Emptier& emptier,
               std::span<Observer* const> observers, RunOptions options) {
  config.validate();
  emptier.validate(config);
  if (filler.capability() == Capability::adaptive_simulated && !emptier.deterministic()) {
    throw CapabilityMismatch("adaptive-simulated filler requires a deterministic emptier");
  }

  CupState state = options.initial ? std::move(*options.initial) : new_game(config, emptier.uses_offsets());
  if (state.size() != config.n) throw ConfigError("initial state has the wrong cup count", "n");
  FillIndex index(state);

  Trace trace;
  trace.header = trace_header(config, filler, emptier, state);
  TraceWriter writer(options.mode, options.sink);
  writer.header(trace.header);

  for (Observer* obs : observers) obs->on_start(state, index, config);

  const GameConfig& cfg = config;
  for (std::uint64_t t = 1; t <= cfg.steps; ++t) {
    StepRecord record;
    record.step = t;
    try {
      record.move = filler.next(t);
      record.phase = filler.phase_tag();
      detail::check_fill_move(record.move, cfg);
      detail::pour(state, record.move, &index, record.effects);
      record.emptied = emptier.select(GameView{state, index, cfg, t});
      detail::check_decision(state, FillMove{}, record.emptied, cfg);
    } catch (const RuleViolation& violation) {
      throw violation.at_step(t);
    }
    detail::remove_units(state, record.emptied, &index);
    if (cfg.truncation_h) detail::truncate(state, record.move, *cfg.truncation_h, &index, record.effects);
    state.step_index = t;

    record.backlog = index.max_fill();
    record.tail = index.tail_size();
    record.queue = index.queue_size();
    record.rest = record.emptied.cups.size() < cfg.p;

    if (filler.capability() == Capability::adaptive_simulated) filler.observe_emptier(record.emptied);

    const StepContext ctx{state, index, record, filler, cfg};
    for (Observer* obs : observers) obs->on_step(ctx);

    writer.record(record);
    const bool snap = t % cfg.snapshot_stride == 0;
    if (snap) writer.snapshot(Snapshot{t, state.fills});
    if (options.mode == TraceMode::full) {
      if (snap) trace.snapshots.push_back(Snapshot{t, state.fills});
      trace.records.push_back(std::move(record));
    }
  }

  trace.steps = cfg.steps;
  if (writer.active()) trace.hash = writer.hash();
  trace.final_state = std::move(state);
  return trace;
}

}  // namespace cupgame
