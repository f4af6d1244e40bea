#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ebr/codes.hpp"

namespace ebr {

class CsvError : public Error {
 public:
  explicit CsvError(const std::string& what) : Error(what) {}
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Closed box [lo,hi] per dimension.
using Domain = std::vector<Interval>;

// Immutable training set: m sample rows of dimension d plus the response.
struct Dataset {
  std::vector<double> x;  // row-major, m*d
  std::vector<double> y;  // m
  Domain domain;
  std::uint64_t seed = 0;  // recorded for reproducibility, 0 when not sampled

  int sample_count() const { return static_cast<int>(y.size()); }
  int dimension() const { return static_cast<int>(domain.size()); }
  double at(int i, int k) const { return x[static_cast<std::size_t>(i) * domain.size() + k]; }

  // Validates m >= 2, finiteness and a non-constant response.
  static Dataset create(std::vector<double> x, std::vector<double> y,
                        Domain domain, std::uint64_t seed = 0);
};

// Stratified samples, one point per axis stratum per dimension; deterministic
// for a fixed seed. Returns row-major m*d points.
std::vector<double> latin_hypercube(int m, const Domain& domain,
                                    std::uint64_t seed);

// Full Cartesian product of points_per_axis uniformly spaced points per
// dimension, endpoints included, rows in lexicographic order.
std::vector<double> grid(int points_per_axis, const Domain& domain);

// Header row required; every column but the response becomes a predictor in
// header order. The domain is the per-column min/max envelope.
Dataset load_csv(const std::string& path, const std::string& response_column);

// Full-precision writer; load_csv(write_csv(ds)) reproduces ds bit-identically.
void write_csv(const Dataset& ds, std::ostream& out);

}  // namespace ebr
