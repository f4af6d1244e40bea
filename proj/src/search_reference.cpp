#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "ebr/search.hpp"

namespace ebr {

// The obvious implementation: walk the whole space in order, dedup on the
// canonical key string, evaluate through the expression-tree interpreter and
// stream every survivor into one pool. Slow, allocation-heavy, and easy to
// trust; the parallel kernel must reproduce it bit for bit.
SearchReport run_search_reference(const SearchConfig& config, const Dataset& data) {
  config.validate();
  if (data.dimension() != config.dimension) {
    throw Error("dataset dimension does not match search config");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t n = candidate_space_size(config);

  SearchReport report;
  report.total_enumerated = n;
  report.pool = ElitePool(config.n_presv);

  std::unordered_set<std::string> seen;
  for (std::uint64_t i = 0; i < n; ++i) {
    const ParseMatrix matrix = matrix_at(config, i);
    ExpressionTree tree = decode(matrix, config.rules);
    std::string key = canonical_key(tree);
    if (!seen.insert(key).second) continue;

    Evaluation ev = evaluate(tree, data);
    if (!ev.all_valid) continue;
    ++report.total_valid;

    ScoredBasis candidate;
    candidate.matrix = matrix;
    candidate.tree = std::move(tree);
    candidate.abs_corr = std::min(std::fabs(correlation(ev.values, data.y)), 1.0);
    candidate.values = std::move(ev.values);
    candidate.canonical_key = std::move(key);
    report.pool.offer(std::move(candidate));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace ebr
