#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ebr/dataset.hpp"
#include "ebr/elite_pool.hpp"
#include "ebr/expr.hpp"
#include "ebr/scoring.hpp"

namespace ebr {

struct SearchConfig {
  int n_presv = 35;   // elite pool capacity, the outer complexity control
  int row_count = 3;  // parse-matrix order, the inner complexity control
  int dimension = 1;
  MappingRules rules = MappingRules::for_dimension(1);

  static SearchConfig create(int n_presv, int row_count, int dimension);
  void validate() const;
};

struct SearchReport {
  std::uint64_t total_enumerated = 0;  // raw matrices in the search space
  std::uint64_t total_valid = 0;       // distinct trees with all-finite values
  ElitePool pool{1};
  double wall_seconds = 0.0;
};

// Size of the raw lexicographic enumeration space: (13*(d+1)^2)^row_count.
std::uint64_t candidate_space_size(const SearchConfig& config);

// The index-th matrix in lexicographic order of the flattened rows.
ParseMatrix matrix_at(const SearchConfig& config, std::uint64_t index);

// Serial dedup'd stream: every in-range matrix in lexicographic order, exactly
// one representative (the lexicographically first) per canonical key.
void for_each_candidate(const SearchConfig& config,
                        const std::function<void(const ParseMatrix&, std::uint64_t)>& fn);

// Scan the whole space: decode, dedup structurally, evaluate, score, and keep
// the elite pool. Deterministic and bit-identical for any worker count;
// num_threads <= 0 means the OpenMP default.
SearchReport run_search(const SearchConfig& config, const Dataset& data,
                        int num_threads = 0);

// Single-threaded reference kept for testing and benchmarking: tree-walking
// evaluation and string-keyed dedup, no sharding. Must match run_search
// bit for bit.
SearchReport run_search_reference(const SearchConfig& config, const Dataset& data);

namespace detail {

// Canonical serialization computed by row-level string simulation (no tree);
// must agree byte for byte with canonical_key(decode(matrix)).
std::string canonical_key_rowwise(const ParseMatrix& matrix, const MappingRules& rules);

}  // namespace detail

}  // namespace ebr
