#include "ebr/search.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_set>

namespace ebr {

SearchConfig SearchConfig::create(int n_presv, int row_count, int dimension) {
  SearchConfig c;
  c.n_presv = n_presv;
  c.row_count = row_count;
  c.dimension = dimension;
  c.rules = MappingRules::for_dimension(dimension);
  c.validate();
  return c;
}

void SearchConfig::validate() const {
  if (n_presv < 1) throw Error("n_presv must be >= 1");
  if (row_count < 1) throw Error("row_count must be >= 1");
  if (row_count > 8) throw Error("row_count > 8 is not supported");
  if (dimension < 1) throw Error("dimension must be >= 1");
  if (rules.dimension != dimension) throw Error("mapping rules disagree with dimension");
}

std::uint64_t candidate_space_size(const SearchConfig& config) {
  const std::uint64_t per_row = static_cast<std::uint64_t>(kOperatorCount) *
                                config.rules.operand_code_count() *
                                config.rules.operand_code_count();
  std::uint64_t n = 1;
  for (int r = 0; r < config.row_count; ++r) {
    if (n > std::numeric_limits<std::uint64_t>::max() / per_row) {
      throw Error("search space overflows 64 bits");
    }
    n *= per_row;
  }
  return n;
}

namespace {

constexpr std::uint64_t kMaxSearchSpace = 1ULL << 31;

// Row digits for one matrix, decoded from a mixed-radix index. Row 0 is the
// most significant group so indices follow flattened lexicographic order.
struct Digits {
  int rows;
  std::array<std::array<int, 3>, 8> row;
};

void digits_at(const SearchConfig& config, std::uint64_t index, Digits& out) {
  const int operand_max = config.rules.operand_code_count();
  out.rows = config.row_count;
  for (int r = config.row_count - 1; r >= 0; --r) {
    const std::uint64_t a3 = index % operand_max;
    index /= operand_max;
    const std::uint64_t a2 = index % operand_max;
    index /= operand_max;
    const std::uint64_t t = index % kOperatorCount;
    index /= kOperatorCount;
    out.row[r] = {static_cast<int>(t) + 1, static_cast<int>(a2) + 1,
                  static_cast<int>(a3) + 1};
  }
}

ParseMatrix to_matrix(const Digits& digits) {
  ParseMatrix m;
  m.rows.assign(digits.row.begin(), digits.row.begin() + digits.rows);
  return m;
}

// Canonical serialization by direct row simulation; equals
// canonical_key(decode(matrix)) byte for byte (the tree route sorts
// commutative children of already-canonical strings the same way).
void canonical_rowwise(const Digits& digits, int dimension, std::string& f,
                       std::string& scratch) {
  f.assign("k0,");
  const int acc = dimension + 1;
  auto leaf = [](std::string& out, int code) {
    out += 'v';
    if (code < 10) {
      out += static_cast<char>('0' + code);
    } else {
      out += std::to_string(code);
    }
    out += ',';
  };
  for (int r = 0; r < digits.rows; ++r) {
    const Op op = static_cast<Op>(digits.row[r][0]);
    const int a2 = digits.row[r][1];
    const int a3 = digits.row[r][2];
    if (op == Op::select_s1) {
      if (a2 != acc) {
        f.clear();
        leaf(f, a2);
      }
      continue;
    }
    if (op == Op::select_s2) {
      if (a3 != acc) {
        f.clear();
        leaf(f, a3);
      }
      continue;
    }
    scratch.clear();
    if (op_is_binary(op)) {
      scratch += "+-*/"[static_cast<int>(op) - static_cast<int>(Op::add)];
      if (op_is_commutative(op)) {
        // Both operand serializations are canonical; order them.
        if (a2 != acc && a3 != acc) {
          std::string a, b;  // tiny leaves, SSO
          leaf(a, a2);
          leaf(b, a3);
          if (b < a) std::swap(a, b);
          scratch += a;
          scratch += b;
        } else if (a2 == acc && a3 == acc) {
          scratch += f;
          scratch += f;
        } else {
          const int var = a2 == acc ? a3 : a2;
          std::string v;
          leaf(v, var);
          if (v < f) {
            scratch += v;
            scratch += f;
          } else {
            scratch += f;
            scratch += v;
          }
        }
      } else {
        if (a2 == acc) scratch += f; else leaf(scratch, a2);
        if (a3 == acc) scratch += f; else leaf(scratch, a3);
      }
    } else {
      scratch += "RQILESC"[static_cast<int>(op) - static_cast<int>(Op::sqrt)];
      if (a2 == acc) scratch += f; else leaf(scratch, a2);
    }
    f.swap(scratch);
  }
}

struct Hash128 {
  std::uint64_t hi = 0, lo = 0;
  bool operator==(const Hash128&) const = default;
};

struct Hash128Hasher {
  std::size_t operator()(const Hash128& h) const noexcept {
    return static_cast<std::size_t>(h.lo ^ (h.hi * 0x9e3779b97f4a7c15ULL));
  }
};

std::uint64_t avalanche(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Hash128 fingerprint(const std::string& key) {
  std::uint64_t h1 = 0xcbf29ce484222325ULL;
  std::uint64_t h2 = 0x84222325cbf29ce4ULL;
  for (unsigned char c : key) {
    h1 = (h1 ^ c) * 0x100000001b3ULL;
    h2 = (h2 ^ c) * 0x100000001b5ULL;
  }
  h1 ^= key.size();
  return Hash128{avalanche(h1), avalanche(h2 + 0x9e3779b97f4a7c15ULL)};
}

// True when the row reads the accumulator; rows before the last one that
// does not are dead code and never execute, matching the decoded tree.
bool row_reads_accumulator(const std::array<int, 3>& row, int acc) {
  const Op op = static_cast<Op>(row[0]);
  if (op == Op::select_s1) return row[1] == acc;
  if (op == Op::select_s2) return row[2] == acc;
  if (op_is_binary(op)) return row[1] == acc || row[2] == acc;
  return row[1] == acc;
}

// Row-program evaluation over pre-transposed sample columns. Any guarded
// division, domain violation or non-finite intermediate invalidates the
// candidate outright, so the scan bails at the first bad sample; the
// arithmetic matches the tree walker operation for operation.
class RowEvaluator {
 public:
  RowEvaluator(const std::vector<std::vector<double>>& columns, int m)
      : columns_(columns), m_(m), f_(m), tmp_(m) {}

  // Returns false if any sample in [0, limit) went bad.
  bool run(const Digits& digits, int limit) {
    std::fill(f_.begin(), f_.begin() + limit, 0.0);
    const int acc = static_cast<int>(columns_.size()) + 1;
    int start = digits.rows - 1;
    while (start > 0 && row_reads_accumulator(digits.row[start], acc)) --start;
    for (int r = start; r < digits.rows; ++r) {
      const Op op = static_cast<Op>(digits.row[r][0]);
      const int a2 = digits.row[r][1];
      const int a3 = digits.row[r][2];
      const double* s1 = a2 == acc ? f_.data() : columns_[a2 - 1].data();
      const double* s2 = a3 == acc ? f_.data() : columns_[a3 - 1].data();
      switch (op) {
        case Op::select_s1:
          if (s1 != f_.data()) std::copy(s1, s1 + limit, f_.begin());
          continue;
        case Op::select_s2:
          if (s2 != f_.data()) std::copy(s2, s2 + limit, f_.begin());
          continue;
        case Op::add:
          for (int i = 0; i < limit; ++i) tmp_[i] = s1[i] + s2[i];
          break;
        case Op::sub:
          for (int i = 0; i < limit; ++i) tmp_[i] = s1[i] - s2[i];
          break;
        case Op::mul:
          for (int i = 0; i < limit; ++i) tmp_[i] = s1[i] * s2[i];
          break;
        case Op::div:
          for (int i = 0; i < limit; ++i) {
            tmp_[i] = std::fabs(s2[i]) < kDivisionGuard
                          ? std::numeric_limits<double>::quiet_NaN()
                          : s1[i] / s2[i];
          }
          break;
        case Op::sqrt:
          for (int i = 0; i < limit; ++i) tmp_[i] = std::sqrt(s1[i]);
          break;
        case Op::square:
          for (int i = 0; i < limit; ++i) tmp_[i] = s1[i] * s1[i];
          break;
        case Op::reciprocal:
          for (int i = 0; i < limit; ++i) {
            tmp_[i] = std::fabs(s1[i]) < kDivisionGuard
                          ? std::numeric_limits<double>::quiet_NaN()
                          : 1.0 / s1[i];
          }
          break;
        case Op::log:
          for (int i = 0; i < limit; ++i) tmp_[i] = std::log(s1[i]);
          break;
        case Op::exp:
          for (int i = 0; i < limit; ++i) tmp_[i] = std::exp(s1[i]);
          break;
        case Op::sin:
          for (int i = 0; i < limit; ++i) tmp_[i] = std::sin(s1[i]);
          break;
        case Op::cos:
          for (int i = 0; i < limit; ++i) tmp_[i] = std::cos(s1[i]);
          break;
        default:
          continue;
      }
      f_.swap(tmp_);
      for (int i = 0; i < limit; ++i) {
        if (!std::isfinite(f_[i])) return false;
      }
    }
    return true;
  }

  const std::vector<double>& values() const { return f_; }

 private:
  const std::vector<std::vector<double>>& columns_;
  int m_;
  std::vector<double> f_;
  std::vector<double> tmp_;
};

}  // namespace

std::string detail::canonical_key_rowwise(const ParseMatrix& matrix,
                                          const MappingRules& rules) {
  matrix.validate(rules);
  Digits digits;
  digits.rows = matrix.row_count();
  for (int r = 0; r < digits.rows; ++r) digits.row[r] = matrix.rows[r];
  std::string f, scratch;
  canonical_rowwise(digits, rules.dimension, f, scratch);
  return f;
}

ParseMatrix matrix_at(const SearchConfig& config, std::uint64_t index) {
  Digits digits;
  digits_at(config, index, digits);
  return to_matrix(digits);
}

void for_each_candidate(const SearchConfig& config,
                        const std::function<void(const ParseMatrix&, std::uint64_t)>& fn) {
  config.validate();
  const std::uint64_t n = candidate_space_size(config);
  std::unordered_set<std::string> seen;
  Digits digits;
  std::string key, scratch;
  for (std::uint64_t i = 0; i < n; ++i) {
    digits_at(config, i, digits);
    canonical_rowwise(digits, config.dimension, key, scratch);
    if (seen.insert(key).second) fn(to_matrix(digits), i);
  }
}

SearchReport run_search(const SearchConfig& config, const Dataset& data,
                        int num_threads) {
  config.validate();
  if (data.dimension() != config.dimension) {
    throw Error("dataset dimension does not match search config");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t n = candidate_space_size(config);
  if (n > kMaxSearchSpace) {
    throw Error("search space of " + std::to_string(n) +
                " matrices exceeds the supported limit; reduce rows or dimension");
  }
  const int threads = num_threads > 0 ? num_threads : omp_get_max_threads();
  const int m = data.sample_count();

  std::vector<std::vector<double>> columns(data.dimension(), std::vector<double>(m));
  for (int k = 0; k < data.dimension(); ++k) {
    for (int i = 0; i < m; ++i) columns[k][i] = data.at(i, k);
  }
  double mean_y = 0.0;
  for (double v : data.y) mean_y += v;
  mean_y /= m;
  std::vector<double> yc(m);
  double sum_yc2 = 0.0;
  for (int i = 0; i < m; ++i) {
    yc[i] = data.y[i] - mean_y;
    sum_yc2 += yc[i] * yc[i];
  }

  // Phase 1: fingerprint every matrix and keep the first index per distinct
  // canonical key. Sharding by fingerprint makes local first-occurrence
  // global, whatever the thread count.
  std::vector<std::vector<std::uint64_t>> shard_reps(threads);
  {
    const std::uint64_t chunk = 1ULL << 20;
    std::vector<Hash128> hashes(static_cast<std::size_t>(std::min<std::uint64_t>(chunk, n)));
    std::vector<std::unordered_set<Hash128, Hash128Hasher>> shard_seen(threads);
    for (std::uint64_t base = 0; base < n; base += chunk) {
      const int len = static_cast<int>(std::min<std::uint64_t>(chunk, n - base));
#pragma omp parallel num_threads(threads)
      {
        Digits digits;
        std::string key, scratch;
#pragma omp for schedule(static)
        for (int j = 0; j < len; ++j) {
          digits_at(config, base + j, digits);
          canonical_rowwise(digits, config.dimension, key, scratch);
          hashes[j] = fingerprint(key);
        }
#pragma omp barrier
        const int tid = omp_get_thread_num();
        auto& seen = shard_seen[tid];
        auto& reps = shard_reps[tid];
        for (int j = 0; j < len; ++j) {
          const Hash128& h = hashes[j];
          if (h.lo % threads != static_cast<std::uint64_t>(tid)) continue;
          if (seen.insert(h).second) reps.push_back(base + j);
        }
      }
    }
  }
  std::vector<std::uint64_t> reps;
  {
    std::size_t total = 0;
    for (const auto& s : shard_reps) total += s.size();
    reps.reserve(total);
    for (auto& s : shard_reps) {
      reps.insert(reps.end(), s.begin(), s.end());
      s.clear();
      s.shrink_to_fit();
    }
    std::sort(reps.begin(), reps.end());
  }

  // Phase 2: evaluate and score each representative independently.
  const std::size_t rep_count = reps.size();
  std::vector<double> scores(rep_count, 0.0);
  std::vector<std::uint8_t> valid(rep_count, 0);
  const int probe = std::min(m, 64);
#pragma omp parallel num_threads(threads)
  {
    Digits digits;
    RowEvaluator eval(columns, m);
#pragma omp for schedule(dynamic, 256)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(rep_count); ++r) {
      digits_at(config, reps[r], digits);
      if (probe < m && !eval.run(digits, probe)) continue;
      if (!eval.run(digits, m)) continue;
      valid[r] = 1;
      const double rho = correlation_centered(eval.values(), yc, sum_yc2);
      scores[r] = std::min(std::fabs(rho), 1.0);
    }
  }

  // Phase 3: sequential pool pass in canonical matrix order; cheap because
  // would_consider rejects almost everything once the pool warms up.
  SearchReport report;
  report.total_enumerated = n;
  report.pool = ElitePool(config.n_presv);
  std::uint64_t total_valid = 0;
  {
    RowEvaluator eval(columns, m);
    Digits digits;
    for (std::size_t r = 0; r < rep_count; ++r) {
      if (!valid[r]) continue;
      ++total_valid;
      if (!report.pool.would_consider(scores[r])) continue;
      ScoredBasis candidate;
      candidate.matrix = matrix_at(config, reps[r]);
      candidate.abs_corr = scores[r];
      report.pool.offer(std::move(candidate));
    }
    // Fill in trees, values and keys for the survivors only.
    for (ScoredBasis& entry : report.pool.mutable_entries()) {
      entry.tree = decode(entry.matrix, config.rules);
      entry.canonical_key = canonical_key(entry.tree);
      digits.rows = entry.matrix.row_count();
      for (int r = 0; r < digits.rows; ++r) digits.row[r] = entry.matrix.rows[r];
      eval.run(digits, m);
      entry.values = eval.values();
    }
  }
  report.total_valid = total_valid;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace ebr
