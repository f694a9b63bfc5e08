#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cupgame/game.hpp"

namespace cupgame {

using ojson = nlohmann::ordered_json;

enum class TraceMode {
  full,       // keep every record in memory and hash it
  hash_only,  // serialize and hash, keep nothing
  none,       // no serialization at all
};

/// Where a filler is inside its own schedule.
struct PhaseTag {
  std::uint64_t phase = 0;
  std::uint64_t local_step = 0;
  /// Size of the active label prefix, for schedules that have one.
  std::optional<std::uint32_t> active;

  friend bool operator==(const PhaseTag&, const PhaseTag&) = default;
};

struct StepRecord {
  std::uint64_t step = 0;
  FillMove move;
  EmptyDecision emptied;
  StepEffects effects;
  Rational backlog;
  std::uint32_t tail = 0;
  std::uint64_t queue = 0;
  bool rest = false;
  std::optional<PhaseTag> phase;
};

struct Snapshot {
  std::uint64_t step = 0;
  std::vector<Rational> fills;
};

constexpr std::uint64_t kFnvBasis = 0xcbf29ce484222325ULL;
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = kFnvBasis) noexcept;
std::string hex64(std::uint64_t value);

/// FNV-1a over "cup:amount;" for each placement.
std::uint64_t move_digest(const FillMove& move);

ojson record_json(const StepRecord& record);
ojson snapshot_json(const Snapshot& snapshot);

/// Serializes trace lines in canonical order and folds them into the hash.
class TraceWriter {
 public:
  explicit TraceWriter(TraceMode mode, std::ostream* sink = nullptr) : mode_(mode), sink_(sink) {}

  void header(const ojson& header);
  void record(const StepRecord& record);
  void snapshot(const Snapshot& snapshot);

  bool active() const noexcept { return mode_ != TraceMode::none || sink_ != nullptr; }
  std::uint64_t hash() const noexcept { return hash_; }

 private:
  void line(const ojson& value);

  TraceMode mode_;
  std::ostream* sink_;
  std::uint64_t hash_ = kFnvBasis;
};

struct Trace {
  ojson header;
  std::vector<StepRecord> records;  // only in TraceMode::full
  std::vector<Snapshot> snapshots;  // only in TraceMode::full
  std::uint64_t steps = 0;
  std::optional<std::uint64_t> hash;
  CupState final_state;
};

/// Hash of an NDJSON trace as written by TraceWriter (every line, with its
/// newline).
std::uint64_t hash_trace_stream(std::istream& in);

}  // namespace cupgame
