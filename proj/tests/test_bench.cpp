#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "ebr/bench.hpp"

using namespace ebr;

namespace {

// Hand-written scalar forms of every built-in target.
double target_oracle(int id, const double* x) {
  const double x1 = x[0];
  const double x2 = x[1];
  const double x3 = x[2];
  const double two_pi = 2.0 * std::numbers::pi;
  switch (id) {
    case 1: return std::sqrt(x1);
    case 2: return x1 * x1 - std::sin(x1);
    case 3: return std::cos(x1 * x1) - x1;
    case 4: return std::sin(x1) + 2.0 * x1;
    case 5: return std::pow(x1, 4) + std::pow(x1, 3) + x1 * x1 + x1;
    case 6: return std::sin(x1 * x1) * std::cos(x1) - 1.0;
    case 7: return std::pow(x1, x2);
    case 8: return std::log(x1 + x2);
    case 9: return x1 * x1 + x1 - x2;
    case 10: return x1 + 2.0 * x2;
    case 11: return std::sin(x1 * x1 - x2);
    case 12: return x1 - std::exp(x1 + x2);
    case 13: return (x1 + x2) / x2;
    case 14: return 6.0 * std::sin(x1) * std::cos(x2);
    case 15: return x1 + x2 + x3;
    case 16: return x1 * x2 + x2 * x3;
    case 17: return 0.3 * x1 * std::sin(two_pi * x1);
    case 18: return std::log(x1 + 1.0) + std::log(x1 * x1 + 1.0);
    case 19: return std::pow(x1, 5) + std::pow(x1, 4) + std::pow(x1, 3) + x1 * x1 + x1;
    case 20:
      return std::pow(x1, 6) + std::pow(x1, 5) + std::pow(x1, 4) + std::pow(x1, 3) +
             x1 * x1 + x1;
    case 21: return std::log(x1 + x2) + std::sin(x1 + x2);
    case 22: return std::pow(x1, 4) - std::pow(x1, 3) + x2 * x2 / 2.0 - x2;
    case 23: return std::pow(x1, 3) / 5.0 + std::pow(x2, 3) / 2.0 - x2 - x1;
    case 24: return x1 * x2 + std::sin((x1 - 1.0) * (x2 - 1.0));
    case 25: return 0.3 * x1 * std::sin(two_pi * x1);
    case 26: return std::sin(std::pow(x1, 3) + x1);
    case 27: return std::sin(x1) * std::sin(x1 + x1 * x1);
    case 28: return std::sin(x1) + std::sin(x2 * x2);
    default: return 0.0;
  }
}

}  // namespace

TEST_CASE("all 28 cases are present with quoted reference numbers") {
  const auto& cases = bench_cases();
  REQUIRE(cases.size() == 28);
  for (int id = 1; id <= 28; ++id) {
    CHECK(cases[id - 1].id == id);
    CHECK(cases[id - 1].ref_ffx_error_pct > 0.0);
    const bool has_ebr = cases[id - 1].ref_ebr_error_pct.has_value();
    CHECK(has_ebr == (id >= 17));
  }
  CHECK(cases[0].n_presv == 35);
  CHECK(cases[14].n_presv == 200);
  CHECK(cases[15].n_presv == 200);
  CHECK(*cases[16].ref_ebr_error_pct == 4.37);
  CHECK(*cases[27].ref_ebr_error_pct == 4.68e-8);
}

TEST_CASE("every built-in target matches its scalar oracle at probe points") {
  const double probes[5][3] = {
      {1.3, 1.7, 2.1}, {2.05, 2.5, 1.1}, {1.05, 2.9, 2.2}, {2.45, 1.2, 1.6}, {2.8, 1.95, 2.6}};
  for (const auto& c : bench_cases()) {
    for (const auto& probe : probes) {
      // Probe coordinates live inside every case domain once mapped there.
      double x[3];
      for (int k = 0; k < c.dimension; ++k) {
        const double t = (probe[k] - 1.0) / 2.0;  // in [0,1]
        x[k] = c.domain[k].lo + t * (c.domain[k].hi - c.domain[k].lo);
      }
      const Evaluation ev = evaluate(c.target, std::span<const double>(x, c.dimension),
                                     1, c.dimension);
      REQUIRE(ev.all_valid);
      const double want = target_oracle(c.id, x);
      CHECK(ev.values[0] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("case datasets honor the sampling spec") {
  const auto& cases = bench_cases();
  const Dataset d1 = case_dataset(cases[0], {});
  CHECK(d1.sample_count() == 30);
  CHECK(d1.dimension() == 1);
  const Dataset d2 = case_dataset(cases[10], {});
  CHECK(d2.sample_count() == 900);
  const Dataset d3 = case_dataset(cases[14], {});
  CHECK(d3.sample_count() == 343);

  CaseOverrides full;
  full.full_3d = true;
  CHECK(case_dataset(cases[14], full).sample_count() == 1000);

  CaseOverrides gridded;
  gridded.sampling = SampleSpec::Kind::grid;
  const Dataset g2 = case_dataset(cases[10], gridded);
  CHECK(g2.sample_count() == 900);
  CHECK(g2.at(0, 0) == -3.0);
}

TEST_CASE("run_case: the identity-like case 10 recovers exactly") {
  const CaseResult r = run_case(10);
  REQUIRE(r.ok);
  CHECK(r.model.nmse <= 1e-10);
  CHECK(r.total_valid > 0);
  CHECK(r.total_enumerated == 117ULL * 117 * 117);
}

TEST_CASE("run_suite aggregates failures without aborting") {
  CHECK_THROWS_AS(run_case(99), Error);
  const SuiteReport report = run_suite({1});
  REQUIRE(report.cases.size() == 1);
  CHECK(report.cases[0].ok);
  CHECK(report.cases[0].model.nmse <= 1e-6);
}

TEST_CASE("json-lines report is schema-tagged and deterministic minus timing") {
  CaseOverrides overrides;
  const SuiteReport a = run_suite({4}, overrides);
  const SuiteReport b = run_suite({4}, overrides);
  std::ostringstream sa, sb;
  write_json_lines(a, sa);
  write_json_lines(b, sb);

  auto scrub = [](const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    j.erase("elapsed_ms");
    return j.dump();
  };
  CHECK(scrub(sa.str()) == scrub(sb.str()));
  nlohmann::json j = nlohmann::json::parse(sa.str());
  CHECK(j["schema"] == "ebr.bench.v1");
  CHECK(j["case"] == 4);
  CHECK(j.contains("total_valid"));
  CHECK(j.contains("ref_ffx_error_pct"));
}

TEST_CASE("text report renders one line per case") {
  const SuiteReport report = run_suite({1, 4});
  std::ostringstream os;
  render_text(report, os);
  const std::string text = os.str();
  CHECK(text.find("case") != std::string::npos);
  CHECK(text.find("sqrt(") != std::string::npos);
}
