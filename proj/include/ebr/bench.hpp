#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ebr/glm.hpp"
#include "ebr/search.hpp"

namespace ebr {

struct SampleSpec {
  enum class Kind { grid, latin_hypercube };
  Kind kind = Kind::latin_hypercube;
  int points_per_axis = 30;  // grid resolution when kind == grid
  int count = 30;            // total points when kind == latin_hypercube
};

// One built-in benchmark problem plus the published reference numbers it is
// compared against (quoted, never recomputed here).
struct BenchCase {
  int id = 0;
  int dimension = 1;
  ExpressionTree target;
  Domain domain;
  SampleSpec samples;
  int n_presv = 35;
  double ref_ffx_error_pct = 0.0;
  std::optional<double> ref_ebr_error_pct;
};

const std::vector<BenchCase>& bench_cases();

inline constexpr std::uint64_t kDefaultSeed = 42;

struct CaseOverrides {
  std::optional<int> n_presv;
  std::optional<int> row_count;
  std::optional<int> samples;  // grid: per axis, LHS: total
  std::optional<SampleSpec::Kind> sampling;
  std::optional<std::uint64_t> seed;
  std::optional<Domain> domain;
  FitOptions fit;
  int num_threads = 0;
  bool full_3d = false;  // run 3D cases at the full 10^3 sample budget
};

struct CaseResult {
  int id = 0;
  bool ok = false;
  std::string error;

  int dimension = 0;
  std::string target;
  Domain domain;
  std::string sampling;  // "grid" or "lhs"
  int sample_count = 0;
  std::uint64_t seed = 0;
  int n_presv = 0;
  int row_count = 0;

  std::uint64_t total_enumerated = 0;
  std::uint64_t total_valid = 0;
  RegressionModel model;
  double elapsed_ms = 0.0;

  double ref_ffx_error_pct = 0.0;
  std::optional<double> ref_ebr_error_pct;
};

CaseResult run_case(int id, const CaseOverrides& overrides = {});

struct SuiteReport {
  std::vector<CaseResult> cases;
};

// Runs the cases in order; per-case failures land in the report instead of
// aborting the suite.
SuiteReport run_suite(const std::vector<int>& ids, const CaseOverrides& overrides = {});

void render_text(const SuiteReport& report, std::ostream& out);

// One JSON object per case, schema-tagged; elapsed_ms is the only
// run-dependent field.
void write_json_lines(const SuiteReport& report, std::ostream& out);

// Builds the training dataset exactly as run_case would.
Dataset case_dataset(const BenchCase& c, const CaseOverrides& overrides);

}  // namespace ebr
