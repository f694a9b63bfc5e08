#include "cupgame/fill_index.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cupgame {

std::vector<CupId> cups_by_priority(const CupState& state) {
  std::vector<CupId> order(state.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](CupId a, CupId b) { return state.priorities[a] > state.priorities[b]; });
  return order;
}

FillIndex::FillIndex(const CupState& state)
    : rank_of_(state.size()), cup_at_rank_(cups_by_priority(state)) {
  for (std::uint32_t r = 0; r < cup_at_rank_.size(); ++r) rank_of_[cup_at_rank_[r]] = r;
  for (CupId cup = 0; cup < state.size(); ++cup) {
    by_fill_.insert(Entry{state.fills[cup], cup});
    account(cup, state.fills[cup], +1);
  }
}

void FillIndex::account(CupId cup, const Rational& fill, int sign) {
  if (fill < 1) return;
  const auto whole = static_cast<std::uint64_t>(fill.floor());
  if (sign > 0) {
    queue_size_ += whole;
    ++queued_;
    if (whole >= 2) {
      ++heavy_;
    } else {
      light_.insert(rank_of_[cup]);
    }
  } else {
    queue_size_ -= whole;
    --queued_;
    if (whole >= 2) {
      --heavy_;
    } else {
      light_.erase(rank_of_[cup]);
    }
  }
}

void FillIndex::update(CupId cup, const Rational& old_fill, const Rational& new_fill) {
  auto node = by_fill_.extract(Entry{old_fill, cup});
  if (node.empty()) throw std::logic_error("FillIndex: stale fill for cup " + std::to_string(cup));
  node.value().fill = new_fill;
  by_fill_.insert(std::move(node));
  account(cup, old_fill, -1);
  account(cup, new_fill, +1);
}

Rational FillIndex::max_fill() const {
  if (by_fill_.empty()) return 0;
  return by_fill_.begin()->fill;
}

}  // namespace cupgame
