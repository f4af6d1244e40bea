// Command-line front end: fit CSV data, run benchmark cases, or decode a
// parse-matrix literal.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ebr/bench.hpp"
#include "ebr/glm.hpp"
#include "ebr/search.hpp"

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitDegenerateFit = 3;

std::vector<int> parse_case_ids(const std::string& text) {
  std::vector<int> ids;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string piece = text.substr(pos, end - pos);
    if (piece.empty()) throw ebr::Error("empty case id in '" + text + "'");
    const std::size_t dash = piece.find('-');
    auto to_int = [&](const std::string& s) {
      int v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw ebr::Error("bad case id '" + s + "'");
      }
      return v;
    };
    if (dash == std::string::npos) {
      ids.push_back(to_int(piece));
    } else {
      const int lo = to_int(piece.substr(0, dash));
      const int hi = to_int(piece.substr(dash + 1));
      if (hi < lo) throw ebr::Error("empty case range '" + piece + "'");
      for (int id = lo; id <= hi; ++id) ids.push_back(id);
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return ids;
}

ebr::Domain parse_domain(const std::string& text) {
  ebr::Domain domain;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string::npos) end = text.size();
    const std::string piece = text.substr(pos, end - pos);
    const std::size_t comma = piece.find(',');
    if (comma == std::string::npos) {
      throw ebr::Error("domain interval '" + piece + "' needs 'lo,hi'");
    }
    auto to_double = [&](std::string s) {
      double v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw ebr::Error("bad number '" + s + "' in domain");
      }
      return v;
    };
    domain.push_back({to_double(piece.substr(0, comma)),
                      to_double(piece.substr(comma + 1))});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return domain;
}

std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  auto out = std::make_unique<std::ofstream>(path);
  if (!*out) throw ebr::Error("cannot write '" + path + "'");
  return out;
}

void dump_model_grid(const ebr::RegressionModel& model, const ebr::Domain& domain,
                     int points_per_axis, const std::string& path) {
  const int d = static_cast<int>(domain.size());
  const std::vector<double> pts = ebr::grid(points_per_axis, domain);
  const int m = static_cast<int>(pts.size()) / d;
  const std::vector<double> f = ebr::predict(model, pts, m, d);
  auto out = open_output(path);
  std::string line;
  for (int k = 0; k < d; ++k) line += "x" + std::to_string(k + 1) + ",";
  line += "f\n";
  *out << line;
  char buf[32];
  for (int i = 0; i < m; ++i) {
    line.clear();
    for (int k = 0; k < d; ++k) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, pts[static_cast<std::size_t>(i) * d + k]);
      (void)ec;
      line.append(buf, p);
      line += ',';
    }
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, f[i]);
    (void)ec;
    line.append(buf, p);
    line += '\n';
    *out << line;
  }
}

struct CommonFlags {
  int n_presv = 35;
  int rows = 3;
  int workers = 0;
  std::uint64_t seed = ebr::kDefaultSeed;
  int samples = 0;
  std::string format = "text";
  std::string output;
  std::string dump_grid;
  std::string domain_text;
  int dump_points = 0;
  ebr::FitOptions fit;

  std::optional<ebr::Domain> domain() const {
    if (domain_text.empty()) return std::nullopt;
    return parse_domain(domain_text);
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--domain", domain_text,
                    "box override as \"lo,hi\" per dimension, ';'-separated");
    cmd->add_option("--n-presv", n_presv, "elite pool capacity")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--rows", rows, "parse-matrix rows")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--workers", workers, "worker threads (0 = auto)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--seed", seed, "sampling seed")->capture_default_str();
    cmd->add_option("--samples", samples,
                    "sample budget override (grid: per axis, lhs: total; 0 = case default)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"text", "json-lines"}))
        ->capture_default_str();
    cmd->add_option("--output", output, "write the report to a file");
    cmd->add_option("--max-terms", fit.max_terms, "model size cap (0 = pool size)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--nmse-target", fit.nmse_target, "stop once training NMSE reaches this")
        ->capture_default_str();
    cmd->add_option("--min-improvement", fit.min_improvement,
                    "relative NMSE decrease required per term")
        ->capture_default_str();
    cmd->add_option("--prune-threshold", fit.coefficient_prune_threshold,
                    "relative coefficient pruning threshold")
        ->capture_default_str();
    cmd->add_option("--dump-grid", dump_grid, "write a plot-ready CSV of the fitted surface");
    cmd->add_option("--dump-grid-points", dump_points,
                    "grid resolution per axis for --dump-grid (0 = auto)")
        ->check(CLI::NonNegativeNumber);
  }
};

int run_fit(const CommonFlags& flags, const std::string& data_path,
            const std::string& response_column) {
  ebr::Dataset data = ebr::load_csv(data_path, response_column);
  const ebr::SearchConfig config =
      ebr::SearchConfig::create(flags.n_presv, flags.rows, data.dimension());
  const ebr::SearchReport search = ebr::run_search(config, data, flags.workers);
  const ebr::RegressionModel model = ebr::fit_model(search.pool, data, flags.fit);

  std::unique_ptr<std::ofstream> file;
  std::ostream* out = &std::cout;
  if (!flags.output.empty()) {
    file = open_output(flags.output);
    out = file.get();
  }
  if (flags.format == "json-lines") {
    nlohmann::json j;
    j["schema"] = "ebr.fit.v1";
    j["data"] = data_path;
    j["samples"] = data.sample_count();
    j["dim"] = data.dimension();
    j["n_presv"] = flags.n_presv;
    j["rows"] = flags.rows;
    j["model"] = model.formula;
    j["intercept"] = model.intercept;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : model.terms) {
      terms.push_back({{"basis", ebr::to_infix(t.basis.tree)},
                       {"coefficient", t.coefficient},
                       {"abs_corr", t.basis.abs_corr},
                       {"matrix", t.basis.matrix.to_literal()}});
    }
    j["terms"] = terms;
    j["nmse"] = model.nmse;
    j["total_enumerated"] = search.total_enumerated;
    j["total_valid"] = search.total_valid;
    j["elapsed_ms"] = search.wall_seconds * 1e3;
    *out << j.dump() << '\n';
  } else {
    *out << "model: " << model.formula << '\n';
    *out << "intercept: " << model.intercept << '\n';
    for (const auto& t : model.terms) {
      *out << "  " << t.coefficient << " * " << ebr::to_infix(t.basis.tree)
           << "   (|rho|=" << t.basis.abs_corr << ", matrix " << t.basis.matrix.to_literal()
           << ")\n";
    }
    *out << "nmse: " << model.nmse << '\n';
    *out << "total bases: " << search.total_valid << " distinct of "
         << search.total_enumerated << " enumerated\n";
    *out << "search seconds: " << search.wall_seconds << '\n';
  }
  if (!flags.dump_grid.empty()) {
    const int per_axis =
        flags.dump_points > 0 ? flags.dump_points : (data.dimension() <= 2 ? 30 : 10);
    const ebr::Domain dom = flags.domain().value_or(data.domain);
    if (static_cast<int>(dom.size()) != data.dimension()) {
      throw ebr::Error("--domain dimension does not match the data");
    }
    dump_model_grid(model, dom, per_axis, flags.dump_grid);
  }
  return 0;
}

int run_bench(const CommonFlags& flags, const std::string& cases_text,
              const std::string& sampling, bool full_3d, bool n_presv_set,
              bool rows_set) {
  const std::vector<int> ids = parse_case_ids(cases_text);
  for (int id : ids) {
    bool known = false;
    for (const auto& c : ebr::bench_cases()) known = known || c.id == id;
    if (!known) throw ebr::Error("unknown benchmark case " + std::to_string(id));
  }
  ebr::CaseOverrides overrides;
  if (n_presv_set) overrides.n_presv = flags.n_presv;
  if (rows_set) overrides.row_count = flags.rows;
  if (sampling == "grid") overrides.sampling = ebr::SampleSpec::Kind::grid;
  if (sampling == "lhs") overrides.sampling = ebr::SampleSpec::Kind::latin_hypercube;
  overrides.domain = flags.domain();
  if (flags.samples > 0) overrides.samples = flags.samples;
  overrides.seed = flags.seed;
  overrides.fit = flags.fit;
  overrides.num_threads = flags.workers;
  overrides.full_3d = full_3d;

  const ebr::SuiteReport report = ebr::run_suite(ids, overrides);

  std::unique_ptr<std::ofstream> file;
  std::ostream* out = &std::cout;
  if (!flags.output.empty()) {
    file = open_output(flags.output);
    out = file.get();
  }
  if (flags.format == "json-lines") {
    ebr::write_json_lines(report, *out);
  } else {
    ebr::render_text(report, *out);
  }

  if (!flags.dump_grid.empty()) {
    for (const auto& r : report.cases) {
      if (!r.ok) continue;
      std::string path = flags.dump_grid;
      if (report.cases.size() > 1) path += ".case" + std::to_string(r.id);
      const int per_axis =
          flags.dump_points > 0 ? flags.dump_points : (r.dimension <= 2 ? 30 : 10);
      dump_model_grid(r.model, r.domain, per_axis, path);
    }
  }
  for (const auto& r : report.cases) {
    if (!r.ok) {
      std::cerr << "case " << r.id << " failed: " << r.error << '\n';
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic symbolic regression via elite basis search"};
  app.require_subcommand(1);

  CommonFlags fit_flags;
  std::string data_path;
  std::string response_column = "y";
  CLI::App* fit = app.add_subcommand("fit", "fit a model to CSV data");
  fit->add_option("--data", data_path, "CSV file with a header row")->required();
  fit->add_option("--response-column", response_column, "response column name")
      ->capture_default_str();
  fit_flags.attach(fit);

  CommonFlags bench_flags;
  std::string cases_text;
  std::string sampling = "lhs";
  bool full_3d = false;
  CLI::App* bench = app.add_subcommand("bench", "run built-in benchmark cases");
  bench->add_option("--cases", cases_text, "case ids, e.g. 1-6,11")->required();
  bench->add_option("--sampling", sampling, "training point layout")
      ->check(CLI::IsMember({"grid", "lhs"}))
      ->capture_default_str();
  bench->add_flag("--full-3d", full_3d, "run 3D cases at the full 10^3 sample budget");
  bench_flags.attach(bench);

  std::string matrix_literal;
  int dim = 0;
  CLI::App* decode_cmd = app.add_subcommand("decode", "decode a parse-matrix literal");
  decode_cmd->add_option("matrix", matrix_literal, "rows ';'-separated, entries ','-separated")
      ->required();
  decode_cmd->add_option("--dim", dim, "problem dimension")
      ->required()
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (fit->parsed()) {
      return run_fit(fit_flags, data_path, response_column);
    }
    if (bench->parsed()) {
      return run_bench(bench_flags, cases_text, sampling, full_3d,
                       bench->count("--n-presv") > 0, bench->count("--rows") > 0);
    }
    if (decode_cmd->parsed()) {
      const ebr::ParseMatrix matrix = ebr::ParseMatrix::from_literal(matrix_literal);
      const ebr::MappingRules rules = ebr::MappingRules::for_dimension(dim);
      matrix.validate(rules);
      std::cout << ebr::to_infix(ebr::decode(matrix, rules)) << '\n';
      return 0;
    }
  } catch (const ebr::DegenerateSystem& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerateFit;
  } catch (const ebr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return 0;
}
