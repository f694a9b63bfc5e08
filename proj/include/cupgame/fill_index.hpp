#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "cupgame/game.hpp"

namespace cupgame {

/// Incrementally maintained orderings of a CupState.
///
/// Engine-side mirror of the threshold queue: cups ordered by fill (ties to
/// the lower index), cups with fill in [1, 2) ordered by priority, and the
/// running counts |Q| = sum floor(fill), #{fill >= 1}, #{fill >= 2}. Every
/// fill change must be reported through update().
class FillIndex {
 public:
  struct Entry {
    Rational fill;
    CupId cup;
  };
  struct FullestFirst {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.fill != b.fill) return a.fill > b.fill;
      return a.cup < b.cup;
    }
  };

  explicit FillIndex(const CupState& state);

  void update(CupId cup, const Rational& old_fill, const Rational& new_fill);

  const std::set<Entry, FullestFirst>& by_fill() const noexcept { return by_fill_; }
  /// Light cups as priority ranks; rank 0 is the highest priority.
  const std::set<std::uint32_t>& light_ranks() const noexcept { return light_; }
  CupId cup_at_rank(std::uint32_t rank) const { return cup_at_rank_[rank]; }
  std::uint32_t rank_of(CupId cup) const { return rank_of_[cup]; }

  Rational max_fill() const;
  std::uint64_t queue_size() const noexcept { return queue_size_; }
  std::uint32_t queued_count() const noexcept { return queued_; }
  std::uint32_t tail_size() const noexcept { return heavy_; }

 private:
  void account(CupId cup, const Rational& fill, int sign);

  std::set<Entry, FullestFirst> by_fill_;
  std::set<std::uint32_t> light_;
  std::vector<std::uint32_t> rank_of_;
  std::vector<CupId> cup_at_rank_;
  std::uint64_t queue_size_ = 0;
  std::uint32_t queued_ = 0;
  std::uint32_t heavy_ = 0;
};

/// Priority ranks: cups sorted by decreasing priority, ties to the lower index.
std::vector<CupId> cups_by_priority(const CupState& state);

}  // namespace cupgame
