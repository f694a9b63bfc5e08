#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>

#include "cupgame/fill_index.hpp"
#include "cupgame/game.hpp"
#include "cupgame/trace.hpp"

namespace cupgame {

enum class Capability {
  oblivious,
  /// Reads the emptier's decisions; legal only against deterministic emptiers,
  /// whose decisions an oblivious filler could have simulated in advance.
  adaptive_simulated,
};

/// A filling strategy. Schedules own their RNG stream and are driven by the
/// step index alone.
class FillSchedule {
 public:
  virtual ~FillSchedule() = default;

  virtual Capability capability() const noexcept { return Capability::oblivious; }
  /// The move for step `step` (1-based). Called once per step, in order.
  virtual FillMove next(std::uint64_t step) = 0;
  /// Tag for the move most recently returned by next().
  virtual std::optional<PhaseTag> phase_tag() const { return std::nullopt; }
  /// The schedule's own label for a physical cup.
  virtual std::uint32_t label_of(CupId cup) const { return cup; }
  /// Adaptive-simulated schedules only: the decision made after the last move.
  virtual void observe_emptier(const EmptyDecision& /*decision*/) {}

  virtual ojson describe() const = 0;
  /// Static facts committed at construction (probe sets and the like).
  virtual ojson annotations() const { return ojson::array(); }
};

/// Post-pour view handed to an emptier.
struct GameView {
  const CupState& state;
  const FillIndex& index;
  const GameConfig& config;
  std::uint64_t step;
};

class Emptier {
 public:
  virtual ~Emptier() = default;

  /// True when decisions are a function of the visible fills alone.
  virtual bool deterministic() const noexcept = 0;
  /// False for emptiers that run on zero offsets.
  virtual bool uses_offsets() const noexcept = 0;
  /// Checks the emptier can play this game; throws ConfigError otherwise.
  virtual void validate(const GameConfig& /*config*/) const {}
  virtual EmptyDecision select(const GameView& view) = 0;
  virtual ojson describe() const = 0;
};

struct StepContext {
  const CupState& state;
  const FillIndex& index;
  const StepRecord& record;
  const FillSchedule& filler;
  const GameConfig& config;
};

/// Receives the post-step state of every step, read-only.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual void on_start(const CupState& /*state*/, const FillIndex& /*index*/, const GameConfig& /*config*/) {}
  virtual void on_step(const StepContext& ctx) = 0;
};

struct RunOptions {
  TraceMode mode = TraceMode::hash_only;
  /// Receives the NDJSON trace when set.
  std::ostream* sink = nullptr;
  /// Start from this state instead of new_game(); must have n cups.
  std::optional<CupState> initial;
};

/// Plays `config.steps` steps. Any rule violation is rethrown carrying the
/// step index.
Trace run_game(const GameConfig& config, FillSchedule& filler, Emptier& emptier,
               std::span<Observer* const> observers = {}, RunOptions options = {});

ojson trace_header(const GameConfig& config, const FillSchedule& filler, const Emptier& emptier,
                   const CupState& state);

}  // namespace cupgame
