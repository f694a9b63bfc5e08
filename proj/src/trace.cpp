#include "cupgame/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

namespace cupgame {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash) noexcept {
  for (const char ch : bytes) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t move_digest(const FillMove& move) {
  std::uint64_t hash = kFnvBasis;
  for (const auto& pl : move.placements()) {
    hash = fnv1a64(std::to_string(pl.cup), hash);
    hash = fnv1a64(":", hash);
    hash = fnv1a64(pl.amount.str(), hash);
    hash = fnv1a64(";", hash);
  }
  return hash;
}

namespace {

ojson pairs_json(const std::vector<std::pair<CupId, std::uint32_t>>& pairs) {
  ojson out = ojson::array();
  for (const auto& [cup, count] : pairs) out.push_back(ojson::array({cup, count}));
  return out;
}

}  // namespace

ojson record_json(const StepRecord& record) {
  ojson out;
  out["step"] = record.step;
  ojson move = ojson::array();
  for (const auto& pl : record.move.placements()) move.push_back(ojson::array({pl.cup, pl.amount.str()}));
  out["move"] = std::move(move);
  out["move_digest"] = hex64(move_digest(record.move));
  out["emptied"] = record.emptied.cups;
  out["truncated"] = pairs_json(record.effects.truncations);
  out["crossings"] = pairs_json(record.effects.crossings);
  out["backlog"] = record.backlog.str();
  out["tail"] = record.tail;
  out["queue"] = record.queue;
  out["rest"] = record.rest;
  if (record.phase) {
    ojson tag;
    tag["id"] = record.phase->phase;
    tag["local"] = record.phase->local_step;
    if (record.phase->active) tag["active"] = *record.phase->active;
    out["phase"] = std::move(tag);
  }
  return out;
}

ojson snapshot_json(const Snapshot& snapshot) {
  ojson out;
  out["snapshot"] = snapshot.step;
  ojson fills = ojson::array();
  for (const auto& f : snapshot.fills) fills.push_back(f.str());
  out["fills"] = std::move(fills);
  return out;
}

void TraceWriter::line(const ojson& value) {
  std::string text = value.dump();
  text.push_back('\n');
  hash_ = fnv1a64(text, hash_);
  if (sink_) *sink_ << text;
}

void TraceWriter::header(const ojson& header) {
  if (active()) line(header);
}

void TraceWriter::record(const StepRecord& record) {
  if (active()) line(record_json(record));
}

void TraceWriter::snapshot(const Snapshot& snapshot) {
  if (active()) line(snapshot_json(snapshot));
}

std::uint64_t hash_trace_stream(std::istream& in) {
  std::uint64_t hash = kFnvBasis;
  std::string text;
  while (std::getline(in, text)) {
    text.push_back('\n');
    hash = fnv1a64(text, hash);
  }
  return hash;
}

}  // namespace cupgame
