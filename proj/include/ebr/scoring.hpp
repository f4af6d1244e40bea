#pragma once

#include <span>
#include <string>
#include <vector>

#include "ebr/expr.hpp"
#include "ebr/parse_matrix.hpp"

namespace ebr {

// Two absolute correlation scores within this distance count as one basis
// function worth of information.
inline constexpr double kNearDuplicateTol = 1e-7;

// A candidate whose evaluation variance falls below this floor carries no
// information beyond an intercept and scores 0.
inline constexpr double kConstantVarianceFloor = 1e-300;

// Pearson correlation Cov(v,y)/(sqrt(D(v))*sqrt(D(y))) with the population
// convention on both sides; 0 for (near-)constant candidates.
double correlation(std::span<const double> values, std::span<const double> response);

// Variant over a pre-centered response; bitwise-identical to correlation()
// when yc[i] == y[i] - mean(y) and sum_yc2 == sum(yc[i]^2) accumulated in
// index order.
double correlation_centered(std::span<const double> values,
                            std::span<const double> centered_response,
                            double sum_yc2);

bool near_duplicate(double score_a, double score_b);

// A candidate basis that survived evaluation, with its score and identity.
struct ScoredBasis {
  ParseMatrix matrix;          // canonical representative (first in enumeration)
  ExpressionTree tree;
  std::vector<double> values;  // finite by construction
  double abs_corr = 0.0;       // in [0,1]
  std::string canonical_key;
};

}  // namespace ebr
