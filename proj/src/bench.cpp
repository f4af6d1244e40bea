#include "ebr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace ebr {

namespace {

ExpressionTree var(int k) { return ExpressionTree::variable(k); }
ExpressionTree num(double v) { return ExpressionTree::constant(v); }
ExpressionTree add(ExpressionTree a, ExpressionTree b) {
  return ExpressionTree::binary(Op::add, std::move(a), std::move(b));
}
ExpressionTree sub(ExpressionTree a, ExpressionTree b) {
  return ExpressionTree::binary(Op::sub, std::move(a), std::move(b));
}
ExpressionTree mul(ExpressionTree a, ExpressionTree b) {
  return ExpressionTree::binary(Op::mul, std::move(a), std::move(b));
}
ExpressionTree div(ExpressionTree a, ExpressionTree b) {
  return ExpressionTree::binary(Op::div, std::move(a), std::move(b));
}
ExpressionTree sq(ExpressionTree a) { return ExpressionTree::unary(Op::square, std::move(a)); }
ExpressionTree sqrt_(ExpressionTree a) { return ExpressionTree::unary(Op::sqrt, std::move(a)); }
ExpressionTree log_(ExpressionTree a) { return ExpressionTree::unary(Op::log, std::move(a)); }
ExpressionTree exp_(ExpressionTree a) { return ExpressionTree::unary(Op::exp, std::move(a)); }
ExpressionTree sin_(ExpressionTree a) { return ExpressionTree::unary(Op::sin, std::move(a)); }
ExpressionTree cos_(ExpressionTree a) { return ExpressionTree::unary(Op::cos, std::move(a)); }

ExpressionTree powi(int k, int p) {
  ExpressionTree t = var(k);
  for (int i = 1; i < p; ++i) t = mul(std::move(t), var(k));
  return t;
}

Domain box(double lo, double hi, int d) { return Domain(d, Interval{lo, hi}); }

SampleSpec spec_1d() { return {SampleSpec::Kind::latin_hypercube, 30, 30}; }
SampleSpec spec_2d() { return {SampleSpec::Kind::latin_hypercube, 30, 900}; }
SampleSpec spec_3d() { return {SampleSpec::Kind::latin_hypercube, 7, 343}; }

std::vector<BenchCase> build_cases() {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<BenchCase> cases;
  auto push = [&](int id, int dim, ExpressionTree target, Domain domain,
                  SampleSpec samples, int n_presv, double ffx,
                  std::optional<double> ebr) {
    BenchCase c;
    c.id = id;
    c.dimension = dim;
    c.target = std::move(target);
    c.domain = std::move(domain);
    c.samples = samples;
    c.n_presv = n_presv;
    c.ref_ffx_error_pct = ffx;
    c.ref_ebr_error_pct = ebr;
    cases.push_back(std::move(c));
  };

  // Exact-fit group.
  push(1, 1, sqrt_(var(1)), box(1, 3, 1), spec_1d(), 35, 0.869, {});
  push(2, 1, sub(sq(var(1)), sin_(var(1))), box(1, 3, 1), spec_1d(), 35, 0.988, {});
  push(3, 1, sub(cos_(sq(var(1))), var(1)), box(-3, 3, 1), spec_1d(), 35, 6.19, {});
  push(4, 1, add(sin_(var(1)), add(var(1), var(1))), box(-3, 3, 1), spec_1d(), 35, 0.672, {});
  push(5, 1, add(add(add(powi(1, 4), powi(1, 3)), sq(var(1))), var(1)), box(-3, 3, 1),
       spec_1d(), 35, 2.08, {});
  push(6, 1, sub(mul(sin_(sq(var(1))), cos_(var(1))), num(1)), box(-3, 3, 1), spec_1d(),
       35, 16.9, {});
  push(7, 2, exp_(mul(var(2), log_(var(1)))), box(1, 3, 2), spec_2d(), 35, 0.991, {});
  push(8, 2, log_(add(var(1), var(2))), box(1, 3, 2), spec_2d(), 35, 0.851, {});
  push(9, 2, sub(add(sq(var(1)), var(1)), var(2)), box(-3, 3, 2), spec_2d(), 35, 0.986, {});
  push(10, 2, add(var(1), add(var(2), var(2))), box(-3, 3, 2), spec_2d(), 35, 0.968, {});
  push(11, 2, sin_(sub(sq(var(1)), var(2))), box(-3, 3, 2), spec_2d(), 35, 28.0, {});
  push(12, 2, sub(var(1), exp_(add(var(1), var(2)))), box(-3, 3, 2), spec_2d(), 35, 1.00, {});
  push(13, 2, div(add(var(1), var(2)), var(2)), box(-3, 3, 2), spec_2d(), 35, 7.42, {});
  push(14, 2, mul(num(6), mul(sin_(var(1)), cos_(var(2)))), box(-3, 3, 2), spec_2d(), 35,
       25.6, {});
  push(15, 3, add(add(var(1), var(2)), var(3)), box(-3, 3, 3), spec_3d(), 200, 0.987, {});
  push(16, 3, add(mul(var(1), var(2)), mul(var(2), var(3))), box(-3, 3, 3), spec_3d(), 200,
       0.99, {});

  // Approximation group.
  push(17, 1, mul(num(0.3), mul(var(1), sin_(mul(num(two_pi), var(1))))), box(-3, 3, 1),
       spec_1d(), 35, 21.09, 4.37);
  push(18, 1, add(log_(add(var(1), num(1))), log_(add(sq(var(1)), num(1)))), box(1, 3, 1),
       spec_1d(), 35, 0.967, 6.58e-10);
  push(19, 1,
       add(add(add(add(powi(1, 5), powi(1, 4)), powi(1, 3)), sq(var(1))), var(1)),
       box(-3, 3, 1), spec_1d(), 35, 1.91, 1.45e-7);
  push(20, 1,
       add(add(add(add(add(powi(1, 6), powi(1, 5)), powi(1, 4)), powi(1, 3)), sq(var(1))),
           var(1)),
       box(-3, 3, 1), spec_1d(), 35, 2.08, 4.97e-4);
  push(21, 2, add(log_(add(var(1), var(2))), sin_(add(var(1), var(2)))), box(1, 3, 2),
       spec_2d(), 35, 16.25, 1.19e-2);
  push(22, 2,
       add(sub(powi(1, 4), powi(1, 3)), sub(mul(num(0.5), sq(var(2))), var(2))),
       box(-3, 3, 2), spec_2d(), 35, 3.47, 5.87e-2);
  push(23, 2,
       sub(sub(add(mul(num(0.2), powi(1, 3)), mul(num(0.5), powi(2, 3))), var(2)), var(1)),
       box(-3, 3, 2), spec_2d(), 35, 0.991, 0.26);
  push(24, 2,
       add(mul(var(1), var(2)),
           sin_(mul(sub(var(1), num(1)), sub(var(2), num(1))))),
       box(-3, 3, 2), spec_2d(), 35, 4.18, 3.69);

  // Control-parameter study group; reference errors are the large-pool runs.
  push(25, 1, mul(num(0.3), mul(var(1), sin_(mul(num(two_pi), var(1))))), box(-3, 3, 1),
       spec_1d(), 35, 19.74, 1.70e-2);
  push(26, 1, sin_(add(powi(1, 3), var(1))), box(-3, 3, 1), spec_1d(), 35, 29.61, 2.93e-5);
  push(27, 1, mul(sin_(var(1)), sin_(add(var(1), sq(var(1))))), box(-3, 3, 1), spec_1d(),
       35, 13.29, 2.23e-20);
  push(28, 2, add(sin_(var(1)), sin_(sq(var(2)))), box(-3, 3, 2), spec_2d(), 35, 7.771,
       4.68e-8);
  return cases;
}

std::uint64_t mix_seed(std::uint64_t seed, int id) {
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(id + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const BenchCase& find_case(int id) {
  for (const auto& c : bench_cases()) {
    if (c.id == id) return c;
  }
  throw Error("unknown benchmark case " + std::to_string(id));
}

}  // namespace

const std::vector<BenchCase>& bench_cases() {
  static const std::vector<BenchCase> cases = build_cases();
  return cases;
}

Dataset case_dataset(const BenchCase& c, const CaseOverrides& overrides) {
  SampleSpec samples = c.samples;
  if (overrides.full_3d && c.dimension == 3) {
    samples.points_per_axis = 10;
    samples.count = 1000;
  }
  if (overrides.sampling) samples.kind = *overrides.sampling;
  if (overrides.samples) {
    samples.points_per_axis = *overrides.samples;
    samples.count = *overrides.samples;
  }
  const Domain domain = overrides.domain.value_or(c.domain);
  if (static_cast<int>(domain.size()) != c.dimension) {
    throw Error("domain dimension mismatch for case " + std::to_string(c.id));
  }
  const std::uint64_t seed = mix_seed(overrides.seed.value_or(kDefaultSeed), c.id);

  std::vector<double> pts;
  if (samples.kind == SampleSpec::Kind::grid) {
    pts = grid(samples.points_per_axis, domain);
  } else {
    pts = latin_hypercube(samples.count, domain, seed);
  }
  const int m = static_cast<int>(pts.size() / domain.size());
  Evaluation ev = evaluate(c.target, pts, m, c.dimension);
  if (!ev.all_valid) {
    throw Error("target for case " + std::to_string(c.id) +
                " is not finite over the sampled domain");
  }
  return Dataset::create(std::move(pts), std::move(ev.values), domain, seed);
}

CaseResult run_case(int id, const CaseOverrides& overrides) {
  const BenchCase& c = find_case(id);
  CaseResult result;
  result.id = id;
  result.dimension = c.dimension;
  result.target = to_infix(c.target);
  result.ref_ffx_error_pct = c.ref_ffx_error_pct;
  result.ref_ebr_error_pct = c.ref_ebr_error_pct;
  result.n_presv = overrides.n_presv.value_or(c.n_presv);
  result.row_count = overrides.row_count.value_or(3);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    Dataset data = case_dataset(c, overrides);
    result.domain = data.domain;
    result.sampling =
        (overrides.sampling.value_or(c.samples.kind) == SampleSpec::Kind::grid) ? "grid"
                                                                                : "lhs";
    result.sample_count = data.sample_count();
    result.seed = data.seed;

    const SearchConfig config =
        SearchConfig::create(result.n_presv, result.row_count, c.dimension);
    SearchReport search = run_search(config, data, overrides.num_threads);
    result.total_enumerated = search.total_enumerated;
    result.total_valid = search.total_valid;
    result.model = fit_model(search.pool, data, overrides.fit);
    result.ok = true;
  } catch (const Error& e) {
    result.error = e.what();
  }
  result.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

SuiteReport run_suite(const std::vector<int>& ids, const CaseOverrides& overrides) {
  if (ids.empty()) throw Error("no benchmark cases selected");
  SuiteReport report;
  report.cases.reserve(ids.size());
  for (int id : ids) {
    try {
      report.cases.push_back(run_case(id, overrides));
    } catch (const Error& e) {
      CaseResult failed;
      failed.id = id;
      failed.error = e.what();
      report.cases.push_back(std::move(failed));
    }
  }
  return report;
}

namespace {

std::string format_domain(const Domain& domain) {
  std::ostringstream os;
  for (std::size_t k = 0; k < domain.size(); ++k) {
    if (k) os << ';';
    os << '[' << domain[k].lo << ',' << domain[k].hi << ']';
  }
  return os.str();
}

std::string format_sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

void render_text(const SuiteReport& report, std::ostream& out) {
  out << "case dim  m     n_presv total_valid terms nmse       err%      "
         "ref-err%(this/ffx)  model\n";
  for (const auto& r : report.cases) {
    if (!r.ok) {
      out << r.id << "  ERROR: " << r.error << '\n';
      continue;
    }
    std::ostringstream line;
    line << r.id << (r.id < 10 ? "    " : "   ") << r.dimension << "    ";
    line.width(6);
    line << std::left << r.sample_count;
    line.width(8);
    line << r.n_presv;
    line.width(12);
    line << r.total_valid;
    line.width(6);
    line << r.model.terms.size();
    line << format_sci(r.model.nmse) << "  " << format_sci(r.model.nmse * 100.0) << "  ";
    line << (r.ref_ebr_error_pct ? format_sci(*r.ref_ebr_error_pct) : std::string("-"));
    line << '/' << format_sci(r.ref_ffx_error_pct) << "  ";
    line << r.model.formula;
    out << line.str() << '\n';
  }
}

void write_json_lines(const SuiteReport& report, std::ostream& out) {
  for (const auto& r : report.cases) {
    nlohmann::json j;
    j["schema"] = "ebr.bench.v1";
    j["case"] = r.id;
    if (!r.ok) {
      j["error"] = r.error;
      out << j.dump() << '\n';
      continue;
    }
    j["dim"] = r.dimension;
    j["target"] = r.target;
    j["domain"] = format_domain(r.domain);
    j["sampling"] = r.sampling;
    j["samples"] = r.sample_count;
    j["seed"] = r.seed;
    j["n_presv"] = r.n_presv;
    j["rows"] = r.row_count;
    j["total_enumerated"] = r.total_enumerated;
    j["total_valid"] = r.total_valid;
    j["model"] = r.model.formula;
    j["terms"] = r.model.terms.size();
    j["nmse"] = r.model.nmse;
    j["ref_ebr_error_pct"] = r.ref_ebr_error_pct ? nlohmann::json(*r.ref_ebr_error_pct)
                                                 : nlohmann::json(nullptr);
    j["ref_ffx_error_pct"] = r.ref_ffx_error_pct;
    j["elapsed_ms"] = r.elapsed_ms;
    out << j.dump() << '\n';
  }
}

}  // namespace ebr
