#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ebr/glm.hpp"
#include "ebr/search.hpp"
#include "pinv_oracle.hpp"
#include "support.hpp"

using namespace ebr;
using oracle::pinv_solve;

namespace {

std::vector<std::span<const double>> spans(const std::vector<std::vector<double>>& bases) {
  std::vector<std::span<const double>> s;
  for (const auto& b : bases) s.emplace_back(b);
  return s;
}

ScoredBasis pool_entry(ExpressionTree tree, const Dataset& data, int tag) {
  ScoredBasis b;
  b.tree = std::move(tree);
  Evaluation ev = evaluate(b.tree, data);
  REQUIRE(ev.all_valid);
  b.values = std::move(ev.values);
  b.abs_corr = std::min(std::fabs(correlation(b.values, data.y)), 1.0);
  b.matrix.rows = {{1, 1, tag % 2 + 1}, {tag % 13 + 1, 1, 1}};
  b.canonical_key = canonical_key(b.tree);
  return b;
}

Dataset grid_dataset_1d(int m, double lo, double hi, double (*f)(double)) {
  const Domain dom = {{lo, hi}};
  auto pts = grid(m, dom);
  std::vector<double> y(m);
  for (int i = 0; i < m; ++i) y[i] = f(pts[i]);
  return Dataset::create(std::move(pts), std::move(y), dom);
}

}  // namespace

TEST_CASE("least_squares: exact linear combination is recovered") {
  const int m = 12;
  std::vector<std::vector<double>> bases(2, std::vector<double>(m));
  std::vector<double> y(m);
  for (int i = 0; i < m; ++i) {
    bases[0][i] = std::sin(0.3 * i);
    bases[1][i] = 0.1 * i * i;
    y[i] = 2.0 * bases[0][i] + 3.0 * bases[1][i];
  }
  const LeastSquaresResult r = least_squares(spans(bases), y);
  CHECK(r.intercept == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(r.coefficients[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.coefficients[1] == doctest::Approx(3.0).epsilon(1e-10));
  double sse = 0.0;
  for (int i = 0; i < m; ++i) {
    const double p = r.intercept + r.coefficients[0] * bases[0][i] +
                     r.coefficients[1] * bases[1][i];
    sse += (y[i] - p) * (y[i] - p);
  }
  CHECK(sse <= 1e-20);
}

TEST_CASE("least_squares: no bases gives the mean intercept") {
  const std::vector<double> y = {4.0, 4.0, 4.0, 4.0};
  const LeastSquaresResult r = least_squares({}, y);
  CHECK(r.intercept == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("least_squares: collinear columns keep the smallest index") {
  const int m = 5;
  std::vector<std::vector<double>> bases(2, std::vector<double>(m));
  std::vector<double> y(m);
  for (int i = 0; i < m; ++i) {
    bases[0][i] = i + 1.0;
    bases[1][i] = 2.0 * (i + 1.0);
    y[i] = 4.0 * (i + 1.0);
  }
  const LeastSquaresResult r = least_squares(spans(bases), y);
  CHECK(r.dropped[2] == 1);
  CHECK(r.coefficients[1] == 0.0);
  CHECK(r.coefficients[0] == doctest::Approx(4.0).epsilon(1e-9));

  // The fitted values must match the pseudo-inverse fit even though the
  // coefficient split differs.
  const auto [pi, pc] = pinv_solve(bases, y);
  for (int i = 0; i < m; ++i) {
    const double mine = r.intercept + r.coefficients[0] * bases[0][i] +
                        r.coefficients[1] * bases[1][i];
    const double ref = pi + pc[0] * bases[0][i] + pc[1] * bases[1][i];
    CHECK(mine == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("property: least_squares matches the pseudo-inverse on random instances") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 12 + static_cast<int>(rng() % 39);
    const int p = 1 + static_cast<int>(rng() % 10);
    std::vector<std::vector<double>> bases(p, std::vector<double>(m));
    std::vector<double> y(m);
    for (auto& col : bases) {
      for (auto& v : col) v = unif(rng);
    }
    for (auto& v : y) v = unif(rng);

    const LeastSquaresResult r = least_squares(spans(bases), y);
    const auto [pi, pc] = pinv_solve(bases, y);
    CHECK(std::fabs(r.intercept - pi) < 1e-8);
    for (int j = 0; j < p; ++j) CHECK(std::fabs(r.coefficients[j] - pc[j]) < 1e-8);
  }
}

TEST_CASE("nmse examples") {
  const std::vector<double> y = {1.0, -2.0, 3.0};
  CHECK(nmse(y, y) == 0.0);
  const std::vector<double> zero(3, 0.0);
  CHECK(nmse(zero, y) == 1.0);
  std::vector<double> scaled(3);
  for (int i = 0; i < 3; ++i) scaled[i] = 1.1 * y[i];
  CHECK(nmse(scaled, y) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS_AS(nmse(zero, zero), Error);
}

TEST_CASE("fit_model: a pool containing the response fits with coefficient 1") {
  const Dataset data = grid_dataset_1d(30, -3.0, 3.0, [](double x) { return x; });
  ElitePool pool(3);
  pool.offer(pool_entry(ExpressionTree::variable(1), data, 1));
  const RegressionModel model = fit_model(pool, data);
  REQUIRE(model.terms.size() == 1);
  CHECK(model.terms[0].coefficient == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::fabs(model.intercept) < 1e-9);
  CHECK(model.nmse <= 1e-20);
  CHECK(model.formula.find("x1") != std::string::npos);
}

TEST_CASE("fit_model: sqrt target picks up the 0.7071 scaling") {
  const Dataset data = grid_dataset_1d(30, 1.0, 3.0, [](double x) { return std::sqrt(x); });
  // Basis sqrt(x1+x1), as the search would encode it.
  ExpressionTree basis = ExpressionTree::unary(
      Op::sqrt, ExpressionTree::binary(Op::add, ExpressionTree::variable(1),
                                       ExpressionTree::variable(1)));
  ElitePool pool(3);
  pool.offer(pool_entry(std::move(basis), data, 1));
  const RegressionModel model = fit_model(pool, data);
  REQUIRE(model.terms.size() == 1);
  CHECK(model.terms[0].coefficient == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(model.nmse <= 1e-6);
  CHECK(model.formula.find("sqrt(x1+x1)") != std::string::npos);
}

TEST_CASE("fit_model: forward selection is monotone and respects max_terms") {
  const Dataset data = grid_dataset_1d(40, -3.0, 3.0, [](double x) {
    return x * x * x * x + x * x * x + x * x + x;
  });
  ElitePool pool(6);
  pool.offer(pool_entry(ExpressionTree::variable(1), data, 1));
  pool.offer(pool_entry(ExpressionTree::unary(Op::square, ExpressionTree::variable(1)), data, 2));
  pool.offer(pool_entry(
      ExpressionTree::binary(Op::mul, ExpressionTree::variable(1),
                             ExpressionTree::unary(Op::square, ExpressionTree::variable(1))),
      data, 3));
  pool.offer(pool_entry(ExpressionTree::unary(
                            Op::square, ExpressionTree::unary(Op::square,
                                                              ExpressionTree::variable(1))),
                        data, 4));
  pool.offer(pool_entry(ExpressionTree::unary(Op::sin, ExpressionTree::variable(1)), data, 5));

  const RegressionModel full = fit_model(pool, data);
  CHECK(full.nmse <= 1e-15);
  for (std::size_t i = 1; i < full.selection_nmse.size(); ++i) {
    CHECK(full.selection_nmse[i] <= full.selection_nmse[i - 1] * (1.0 + 1e-10) + 1e-18);
  }

  FitOptions capped;
  capped.max_terms = 2;
  const RegressionModel small = fit_model(pool, data, capped);
  CHECK(small.terms.size() <= 2);
  CHECK(small.nmse >= full.nmse);
}

TEST_CASE("fit_model: formula string re-evaluates to the fitted values") {
  const Dataset data = grid_dataset_1d(35, -3.0, 3.0, [](double x) {
    return std::sin(x) + 2.0 * x - 0.5;
  });
  ElitePool pool(4);
  pool.offer(pool_entry(ExpressionTree::unary(Op::sin, ExpressionTree::variable(1)), data, 1));
  pool.offer(pool_entry(ExpressionTree::variable(1), data, 2));
  const RegressionModel model = fit_model(pool, data);
  CHECK(model.nmse <= 1e-20);
  for (int i = 0; i < data.sample_count(); ++i) {
    const double x = data.at(i, 0);
    const double re = oracle::eval_formula(model.formula, &x, 1);
    CHECK(re == doctest::Approx(model.fitted[i]).epsilon(1e-9));
  }
}

TEST_CASE("fit_model: ties and determinism") {
  const Dataset data = grid_dataset_1d(25, -2.0, 2.0, [](double x) { return std::exp(x); });
  ElitePool pool(5);
  pool.offer(pool_entry(ExpressionTree::unary(Op::exp, ExpressionTree::variable(1)), data, 1));
  pool.offer(pool_entry(ExpressionTree::variable(1), data, 2));
  pool.offer(pool_entry(ExpressionTree::unary(Op::square, ExpressionTree::variable(1)), data, 3));
  const RegressionModel a = fit_model(pool, data);
  const RegressionModel b = fit_model(pool, data);
  CHECK(a.formula == b.formula);
  CHECK(a.nmse == b.nmse);
}

TEST_CASE("fit_model propagates degenerate systems") {
  const Dataset data = grid_dataset_1d(10, -1.0, 1.0, [](double x) { return x; });
  ElitePool pool(2);
  CHECK_THROWS_AS(fit_model(pool, data), Error);  // empty pool
}
