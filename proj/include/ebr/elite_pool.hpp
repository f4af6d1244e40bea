#pragma once

#include <vector>

#include "ebr/scoring.hpp"

namespace ebr {

// Bounded pool of the best-correlated bases, ordered by (abs_corr descending,
// canonical matrix ascending). Holds no two near-duplicate scores and no two
// entries with the same canonical key; callers offer each distinct key once.
class ElitePool {
 public:
  explicit ElitePool(int capacity);

  // Insertion per the preserve-and-update rule:
  //   1. reject when a member within the near-duplicate window scores >= the
  //      candidate (the member already carries this information);
  //   2. reject when full and the candidate does not outrank the minimum;
  //   3. otherwise drop the (at most one) lower near-duplicate member, insert,
  //      and evict the minimum when over capacity.
  bool offer(ScoredBasis candidate);

  // True when offer() could mutate the pool for this score; lets callers skip
  // building a candidate that would be rejected by rule 2. Exact for callers
  // that offer in ascending canonical-matrix order.
  bool would_consider(double score) const {
    return !full() || score > entries_.back().abs_corr;
  }

  bool full() const { return static_cast<int>(entries_.size()) >= capacity_; }
  int size() const { return static_cast<int>(entries_.size()); }
  int capacity() const { return capacity_; }
  const std::vector<ScoredBasis>& entries() const { return entries_; }
  std::vector<ScoredBasis>& mutable_entries() { return entries_; }

  static bool ranks_before(const ScoredBasis& a, const ScoredBasis& b);

 private:
  int capacity_;
  std::vector<ScoredBasis> entries_;  // kept sorted, best first
};

}  // namespace ebr
