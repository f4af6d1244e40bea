// Times the parallel search kernel against the serial reference on one
// configuration and checks they agree.

#include <omp.h>

#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "ebr/search.hpp"

namespace {

ebr::Dataset make_data(int dimension, int samples, std::uint64_t seed) {
  const ebr::Domain domain(dimension, ebr::Interval{-3.0, 3.0});
  std::vector<double> pts = ebr::latin_hypercube(samples, domain, seed);
  std::vector<double> y(samples);
  for (int i = 0; i < samples; ++i) {
    double s = 0.0;
    for (int k = 0; k < dimension; ++k) {
      const double x = pts[static_cast<std::size_t>(i) * dimension + k];
      s += std::sin(x) + 0.5 * x * x;
    }
    y[i] = s;
  }
  return ebr::Dataset::create(std::move(pts), std::move(y), domain, seed);
}

bool same_report(const ebr::SearchReport& a, const ebr::SearchReport& b) {
  if (a.total_enumerated != b.total_enumerated) return false;
  if (a.total_valid != b.total_valid) return false;
  if (a.pool.size() != b.pool.size()) return false;
  for (int i = 0; i < a.pool.size(); ++i) {
    const auto& ea = a.pool.entries()[i];
    const auto& eb = b.pool.entries()[i];
    if (ea.abs_corr != eb.abs_corr || ea.matrix != eb.matrix || ea.values != eb.values) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int dimension = 2;
  int rows = 2;
  int samples = 400;
  int n_presv = 35;
  int repeats = 3;
  CLI::App app{"search kernel benchmark: serial reference vs OpenMP"};
  app.add_option("--dim", dimension)->check(CLI::PositiveNumber);
  app.add_option("--rows", rows)->check(CLI::PositiveNumber);
  app.add_option("--samples", samples)->check(CLI::PositiveNumber);
  app.add_option("--n-presv", n_presv)->check(CLI::PositiveNumber);
  app.add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const ebr::SearchConfig config = ebr::SearchConfig::create(n_presv, rows, dimension);
  const ebr::Dataset data = make_data(dimension, samples, 42);
  std::printf("space: %llu raw matrices, %d samples, pool %d\n",
              static_cast<unsigned long long>(ebr::candidate_space_size(config)), samples,
              n_presv);

  double serial_best = 1e300;
  ebr::SearchReport serial;
  for (int r = 0; r < repeats; ++r) {
    serial = ebr::run_search_reference(config, data);
    serial_best = std::min(serial_best, serial.wall_seconds);
  }
  std::printf("serial reference: %.3fs (total_valid %llu)\n", serial_best,
              static_cast<unsigned long long>(serial.total_valid));

  for (int threads : {1, 2, omp_get_max_threads()}) {
    double best = 1e300;
    ebr::SearchReport parallel;
    for (int r = 0; r < repeats; ++r) {
      parallel = ebr::run_search(config, data, threads);
      best = std::min(best, parallel.wall_seconds);
    }
    const bool ok = same_report(serial, parallel);
    std::printf("kernel x%d: %.3fs  speedup %.2fx  %s\n", threads, best,
                serial_best / best, ok ? "matches reference" : "MISMATCH");
    if (!ok) return 1;
  }
  return 0;
}
