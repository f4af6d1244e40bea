#pragma once

#include <span>
#include <string>
#include <vector>

#include "ebr/dataset.hpp"
#include "ebr/elite_pool.hpp"

namespace ebr {

class DegenerateSystem : public Error {
 public:
  explicit DegenerateSystem(const std::string& what) : Error(what) {}
};

struct LeastSquaresResult {
  double intercept = 0.0;
  std::vector<double> coefficients;  // one per basis, zero for dropped columns
  std::vector<std::uint8_t> dropped; // rank-deficient columns (smallest-index kept)
};

// Minimizes ||b0 + sum_j b_j phi_j - y||_2 through modified Gram-Schmidt with
// reorthogonalization; no normal equations. Columns that fall below the rank
// tolerance after projection get a zero coefficient, keeping the
// smallest-index spanning set. Throws DegenerateSystem when nothing spans.
LeastSquaresResult least_squares(const std::vector<std::span<const double>>& bases,
                                 std::span<const double> response);

// ||response - predicted||^2 / ||response||^2
double nmse(std::span<const double> predicted, std::span<const double> response);

struct FitOptions {
  int max_terms = 0;                  // 0: up to pool size (clamped to m-2)
  double nmse_target = 1e-10;         // stop once training NMSE reaches this
  double min_improvement = 1e-8;      // minimum relative NMSE decrease per term
  double coefficient_prune_threshold = 1e-8;  // relative to max |beta_j|

  void validate() const;
};

struct FittedTerm {
  ScoredBasis basis;
  double coefficient = 0.0;
};

struct RegressionModel {
  double intercept = 0.0;
  std::vector<FittedTerm> terms;
  double nmse = 0.0;
  std::string formula;
  std::vector<double> fitted;          // on the training samples
  std::vector<double> selection_nmse;  // NMSE after 0,1,2,... selected terms
};

// Forward selection over the pool: repeatedly add the basis that minimizes the
// training NMSE under a full refit, stopping at the target, at max_terms, or
// when the relative improvement dries up; then prune negligible coefficients
// and refit. Ties break by higher abs_corr, then canonical matrix order.
RegressionModel fit_model(const ElitePool& pool, const Dataset& data,
                          const FitOptions& options = {});

// Model surface on new row-major points; samples where a term is undefined
// come back NaN.
std::vector<double> predict(const RegressionModel& model, std::span<const double> x,
                            int m, int d);

}  // namespace ebr
