#include "ebr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

namespace ebr {

namespace {

void check_domain(const Domain& domain) {
  if (domain.empty()) throw Error("empty domain");
  for (std::size_t k = 0; k < domain.size(); ++k) {
    if (!(domain[k].lo < domain[k].hi)) {
      throw Error("degenerate interval in dimension " + std::to_string(k + 1));
    }
  }
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

Dataset Dataset::create(std::vector<double> x, std::vector<double> y,
                        Domain domain, std::uint64_t seed) {
  check_domain(domain);
  const std::size_t m = y.size();
  if (m < 2) throw Error("dataset needs at least 2 samples");
  if (x.size() != m * domain.size()) throw Error("sample matrix shape mismatch");
  for (double v : x) {
    if (!std::isfinite(v)) throw Error("non-finite sample value");
  }
  double mean = 0.0;
  for (double v : y) {
    if (!std::isfinite(v)) throw Error("non-finite response value");
    mean += v;
  }
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  if (!(var > 0.0)) throw Error("zero-variance response");
  Dataset ds;
  ds.x = std::move(x);
  ds.y = std::move(y);
  ds.domain = std::move(domain);
  ds.seed = seed;
  return ds;
}

std::vector<double> latin_hypercube(int m, const Domain& domain,
                                    std::uint64_t seed) {
  if (m < 1) throw Error("sample count must be >= 1");
  check_domain(domain);
  const int d = static_cast<int>(domain.size());
  std::vector<double> pts(static_cast<std::size_t>(m) * d);
  for (int k = 0; k < d; ++k) {
    std::mt19937_64 rng(splitmix64(seed ^ (0x517cc1b727220a95ULL * (k + 1))));
    std::vector<int> strata(m);
    std::iota(strata.begin(), strata.end(), 0);
    for (int i = m - 1; i > 0; --i) {
      const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(strata[i], strata[j]);
    }
    const double step = (domain[k].hi - domain[k].lo) / m;
    for (int i = 0; i < m; ++i) {
      // Clamp the jitter away from stratum edges so the one-point-per-stratum
      // property survives rounding.
      double u = unit_double(rng());
      u = std::min(std::max(u, 1e-9), 1.0 - 1e-9);
      pts[static_cast<std::size_t>(i) * d + k] = domain[k].lo + (strata[i] + u) * step;
    }
  }
  return pts;
}

std::vector<double> grid(int points_per_axis, const Domain& domain) {
  if (points_per_axis < 2) throw Error("grid needs at least 2 points per axis");
  check_domain(domain);
  const int d = static_cast<int>(domain.size());
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(points_per_axis);
  std::vector<double> axis(static_cast<std::size_t>(points_per_axis) * d);
  for (int k = 0; k < d; ++k) {
    const double lo = domain[k].lo, hi = domain[k].hi;
    for (int j = 0; j < points_per_axis; ++j) {
      axis[static_cast<std::size_t>(k) * points_per_axis + j] =
          j == points_per_axis - 1 ? hi : lo + j * (hi - lo) / (points_per_axis - 1);
    }
  }
  std::vector<double> pts(total * d);
  std::vector<int> idx(d, 0);
  for (std::size_t row = 0; row < total; ++row) {
    for (int k = 0; k < d; ++k) {
      pts[row * d + k] = axis[static_cast<std::size_t>(k) * points_per_axis + idx[k]];
    }
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[k] < points_per_axis) break;
      idx[k] = 0;
    }
  }
  return pts;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) {
      cells.push_back(line.substr(pos));
      break;
    }
    cells.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
  for (auto& c : cells) {
    while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.erase(c.begin());
    while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r')) c.pop_back();
  }
  return cells;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response_column) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw CsvError("'" + path + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);
  int response_index = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == response_column) {
      response_index = static_cast<int>(c);
      break;
    }
  }
  if (response_index < 0) {
    throw CsvError("response column '" + response_column + "' not found in '" + path + "'");
  }
  const int d = static_cast<int>(header.size()) - 1;
  if (d < 1) throw CsvError("'" + path + "' has no predictor columns");

  std::vector<double> x;
  std::vector<double> y;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw CsvError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                     " cells, expected " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      const auto& cell = cells[c];
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || p != cell.data() + cell.size() || !std::isfinite(v)) {
        throw CsvError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                       ", column '" + header[c] + "'");
      }
      if (static_cast<int>(c) == response_index) {
        y.push_back(v);
      } else {
        x.push_back(v);
      }
    }
  }
  if (y.size() < 2) throw CsvError("'" + path + "' needs at least 2 data rows");

  Domain domain(d);
  const std::size_t m = y.size();
  for (int k = 0; k < d; ++k) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < m; ++i) {
      lo = std::min(lo, x[i * d + k]);
      hi = std::max(hi, x[i * d + k]);
    }
    // Constant predictor columns get a token width so the domain stays a box.
    if (lo == hi) hi = lo + 1.0;
    domain[k] = {lo, hi};
  }
  try {
    return Dataset::create(std::move(x), std::move(y), std::move(domain));
  } catch (const Error& e) {
    throw CsvError(std::string(e.what()) + " in '" + path + "'");
  }
}

namespace {

void append_full(std::string& out, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, p);
}

}  // namespace

void write_csv(const Dataset& ds, std::ostream& out) {
  const int d = ds.dimension();
  std::string line;
  for (int k = 0; k < d; ++k) {
    line += 'x';
    line += std::to_string(k + 1);
    line += ',';
  }
  line += "y\n";
  out << line;
  for (int i = 0; i < ds.sample_count(); ++i) {
    line.clear();
    for (int k = 0; k < d; ++k) {
      append_full(line, ds.at(i, k));
      line += ',';
    }
    append_full(line, ds.y[i]);
    line += '\n';
    out << line;
  }
}

}  // namespace ebr
