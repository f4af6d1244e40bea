#include "ebr/scoring.hpp"

#include <cmath>

namespace ebr {

double correlation_centered(std::span<const double> values,
                            std::span<const double> centered_response,
                            double sum_yc2) {
  const std::size_t m = values.size();
  double mean_v = 0.0;
  for (double v : values) mean_v += v;
  mean_v /= static_cast<double>(m);

  double num = 0.0, var_v = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = values[i] - mean_v;
    num += a * centered_response[i];
    var_v += a * a;
  }
  if (var_v / static_cast<double>(m) < kConstantVarianceFloor) return 0.0;
  return num / (std::sqrt(var_v) * std::sqrt(sum_yc2));
}

double correlation(std::span<const double> values, std::span<const double> response) {
  const std::size_t m = values.size();
  if (m != response.size() || m < 2) throw Error("correlation needs two equal vectors, m >= 2");
  double mean_y = 0.0;
  for (double v : response) mean_y += v;
  mean_y /= static_cast<double>(m);

  std::vector<double> yc(m);
  double sum_yc2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    yc[i] = response[i] - mean_y;
    sum_yc2 += yc[i] * yc[i];
  }
  return correlation_centered(values, yc, sum_yc2);
}

bool near_duplicate(double score_a, double score_b) {
  return std::fabs(score_a - score_b) < kNearDuplicateTol;
}

}  // namespace ebr
