#include "ebr/elite_pool.hpp"

#include <algorithm>

namespace ebr {

ElitePool::ElitePool(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw Error("pool capacity must be >= 1");
  entries_.reserve(capacity + 1);
}

bool ElitePool::ranks_before(const ScoredBasis& a, const ScoredBasis& b) {
  if (a.abs_corr != b.abs_corr) return a.abs_corr > b.abs_corr;
  return a.matrix < b.matrix;
}

bool ElitePool::offer(ScoredBasis candidate) {
  int duplicate_below = -1;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (near_duplicate(entries_[i].abs_corr, candidate.abs_corr)) {
      if (entries_[i].abs_corr >= candidate.abs_corr) return false;
      duplicate_below = static_cast<int>(i);
    }
  }
  if (full() && !ranks_before(candidate, entries_.back())) return false;

  if (duplicate_below >= 0) entries_.erase(entries_.begin() + duplicate_below);
  const auto pos = std::lower_bound(entries_.begin(), entries_.end(), candidate,
                                    ranks_before);
  entries_.insert(pos, std::move(candidate));
  if (static_cast<int>(entries_.size()) > capacity_) entries_.pop_back();
  return true;
}

}  // namespace ebr
