#include "ebr/glm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace ebr {

namespace {

constexpr double kRankTol = 1e-10;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

LeastSquaresResult least_squares(const std::vector<std::span<const double>>& bases,
                                 std::span<const double> response) {
  const int m = static_cast<int>(response.size());
  const int cols = static_cast<int>(bases.size()) + 1;
  if (m <= static_cast<int>(bases.size()) + 1) {
    throw Error("least squares needs more samples than coefficients");
  }
  for (const auto& b : bases) {
    if (static_cast<int>(b.size()) != m) throw Error("basis length mismatch");
  }

  // Modified Gram-Schmidt with a second projection pass. Q holds orthonormal
  // columns for the kept indices; R is upper triangular over kept columns.
  std::vector<std::vector<double>> q;
  std::vector<int> kept;
  std::vector<std::vector<double>> r_cols(cols);
  std::vector<std::uint8_t> dropped(cols, 0);

  std::vector<double> v(m);
  for (int j = 0; j < cols; ++j) {
    if (j == 0) {
      std::fill(v.begin(), v.end(), 1.0);
    } else {
      std::copy(bases[j - 1].begin(), bases[j - 1].end(), v.begin());
    }
    const double col_norm = std::sqrt(dot(v, v));
    std::vector<double> r(kept.size(), 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < kept.size(); ++i) {
        const double proj = dot(q[i], v);
        r[i] += proj;
        for (int s = 0; s < m; ++s) v[s] -= proj * q[i][s];
      }
    }
    const double w_norm = std::sqrt(dot(v, v));
    if (!(w_norm > kRankTol * col_norm) || col_norm == 0.0) {
      dropped[j] = 1;
      r_cols[j] = std::move(r);
      continue;
    }
    for (int s = 0; s < m; ++s) v[s] /= w_norm;
    q.push_back(v);
    r.push_back(w_norm);
    r_cols[j] = std::move(r);
    kept.push_back(j);
  }

  if (kept.empty()) throw DegenerateSystem("all columns degenerate, nothing to fit");

  // z = Q^T y, then back-substitute through R over the kept columns.
  std::vector<double> z(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) z[i] = dot(q[i], response);
  std::vector<double> beta_kept(kept.size(), 0.0);
  for (int i = static_cast<int>(kept.size()) - 1; i >= 0; --i) {
    double s = z[i];
    for (std::size_t l = i + 1; l < kept.size(); ++l) {
      s -= r_cols[kept[l]][i] * beta_kept[l];
    }
    beta_kept[i] = s / r_cols[kept[i]][i];
  }

  LeastSquaresResult result;
  result.coefficients.assign(bases.size(), 0.0);
  result.dropped = std::move(dropped);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] == 0) {
      result.intercept = beta_kept[i];
    } else {
      result.coefficients[kept[i] - 1] = beta_kept[i];
    }
  }
  return result;
}

double nmse(std::span<const double> predicted, std::span<const double> response) {
  if (predicted.size() != response.size() || response.empty()) {
    throw Error("nmse needs two equal nonempty vectors");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < response.size(); ++i) {
    const double e = response[i] - predicted[i];
    num += e * e;
    den += response[i] * response[i];
  }
  if (!(den > 0.0)) throw Error("nmse undefined for a zero response");
  return num / den;
}

void FitOptions::validate() const {
  if (max_terms < 0) throw Error("max_terms must be positive");
  if (!(nmse_target > 0.0)) throw Error("nmse_target must be positive");
  if (!(min_improvement > 0.0)) throw Error("min_improvement must be positive");
  if (!(coefficient_prune_threshold > 0.0)) {
    throw Error("coefficient_prune_threshold must be positive");
  }
}

namespace {

void append_coefficient(std::string& out, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, p);
}

// Terms join as "b0 + c1*phi1 - c2*phi2"; unit coefficients drop the "c*",
// low-precedence bases get parenthesized under a sign or a coefficient.
std::string render_formula(double intercept, const std::vector<FittedTerm>& terms) {
  std::string out;
  if (intercept != 0.0 || terms.empty()) append_coefficient(out, intercept);
  for (const auto& term : terms) {
    const double c = term.coefficient;
    const bool negative = c < 0.0;
    if (out.empty()) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    const double mag = std::fabs(c);
    const std::string basis = to_infix(term.basis.tree);
    const int prec = root_precedence(term.basis.tree);
    if (mag == 1.0) {
      if (prec <= 1) {
        out += '(' + basis + ')';
      } else {
        out += basis;
      }
    } else {
      append_coefficient(out, mag);
      out += '*';
      if (prec <= 2) {
        out += '(' + basis + ')';
      } else {
        out += basis;
      }
    }
  }
  return out;
}

}  // namespace

RegressionModel fit_model(const ElitePool& pool, const Dataset& data,
                          const FitOptions& options) {
  options.validate();
  if (pool.size() == 0) throw Error("cannot fit from an empty pool");
  const int m = data.sample_count();
  const auto& entries = pool.entries();
  for (const auto& e : entries) {
    if (static_cast<int>(e.values.size()) != m) {
      throw Error("pool entry values do not match the dataset");
    }
  }

  int max_terms = options.max_terms > 0 ? options.max_terms : pool.size();
  max_terms = std::max(std::min({max_terms, pool.size(), m - 2}), 0);

  // Forward selection on an incrementally extended orthonormal set: the SSE
  // drop from adding a column equals (u^T r)^2 for its unit residual
  // direction u, which is the NMSE a full refit would reach.
  double sum_y2 = 0.0;
  for (double v : data.y) sum_y2 += v * v;

  std::vector<std::vector<double>> q;  // orthonormal, q[0] from the intercept
  {
    std::vector<double> ones(m, 1.0 / std::sqrt(static_cast<double>(m)));
    q.push_back(std::move(ones));
  }
  std::vector<double> residual(data.y.begin(), data.y.end());
  {
    const double proj = dot(q[0], residual);
    for (int i = 0; i < m; ++i) residual[i] -= proj * q[0][i];
  }

  std::vector<int> selected;
  std::vector<std::uint8_t> in_model(entries.size(), 0);
  RegressionModel model;
  double current_nmse = dot(residual, residual) / sum_y2;
  model.selection_nmse.push_back(current_nmse);

  std::vector<double> w(m);
  while (static_cast<int>(selected.size()) < max_terms) {
    if (current_nmse <= options.nmse_target) break;
    int best = -1;
    double best_sse = std::numeric_limits<double>::infinity();
    double best_gain = 0.0;
    const double current_sse = current_nmse * sum_y2;
    for (std::size_t j = 0; j < entries.size(); ++j) {
      if (in_model[j]) continue;
      std::copy(entries[j].values.begin(), entries[j].values.end(), w.begin());
      const double col_norm2 = dot(w, w);
      for (const auto& u : q) {
        const double proj = dot(u, w);
        for (int i = 0; i < m; ++i) w[i] -= proj * u[i];
      }
      const double w_norm2 = dot(w, w);
      if (!(w_norm2 > kRankTol * kRankTol * col_norm2)) continue;  // collinear
      const double uy = dot(w, residual);
      const double gain = uy * uy / w_norm2;
      const double sse_after = current_sse - gain;
      // Entries are pool-ordered (abs_corr desc, matrix asc), so the first
      // strictly better column wins ties exactly per that order.
      if (sse_after < best_sse) {
        best_sse = sse_after;
        best_gain = gain;
        best = static_cast<int>(j);
      }
    }
    if (best < 0) break;
    const double next_nmse = std::max(best_sse, 0.0) / sum_y2;
    // Always take the first term so a nonempty pool yields a model; after
    // that, stop once the relative improvement falls under the floor.
    if (!selected.empty()) {
      if (!(best_gain > 0.0)) break;
      if (current_nmse - next_nmse < options.min_improvement * current_nmse) break;
    } else if (!(best_gain > 0.0)) {
      break;
    }

    std::copy(entries[best].values.begin(), entries[best].values.end(), w.begin());
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : q) {
        const double proj = dot(u, w);
        for (int i = 0; i < m; ++i) w[i] -= proj * u[i];
      }
    }
    const double w_norm = std::sqrt(dot(w, w));
    for (int i = 0; i < m; ++i) w[i] /= w_norm;
    {
      const double proj = dot(w, residual);
      for (int i = 0; i < m; ++i) residual[i] -= proj * w[i];
    }
    q.push_back(w);
    selected.push_back(best);
    in_model[best] = 1;
    current_nmse = dot(residual, residual) / sum_y2;
    model.selection_nmse.push_back(current_nmse);
  }

  // Final coefficients by a clean refit on the selected columns, followed by
  // one pruning pass for negligible coefficients.
  auto refit = [&](const std::vector<int>& sel) {
    std::vector<std::span<const double>> cols;
    cols.reserve(sel.size());
    for (int j : sel) cols.emplace_back(entries[j].values);
    return least_squares(cols, data.y);
  };

  LeastSquaresResult ls = refit(selected);
  if (!selected.empty()) {
    double max_mag = 0.0;
    for (double c : ls.coefficients) max_mag = std::max(max_mag, std::fabs(c));
    std::vector<int> pruned;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      if (std::fabs(ls.coefficients[i]) >
          options.coefficient_prune_threshold * max_mag) {
        pruned.push_back(selected[i]);
      }
    }
    if (pruned.size() != selected.size() && !pruned.empty()) {
      // Pruned terms must be do-nothing terms: keep the reduced model only
      // when the refit does not lose accuracy. A huge-coefficient direction
      // built from rounding noise would otherwise shadow every real term.
      LeastSquaresResult reduced = refit(pruned);
      const auto model_nmse = [&](const std::vector<int>& sel,
                                  const LeastSquaresResult& fit) {
        std::vector<double> pred(m, fit.intercept);
        for (std::size_t i = 0; i < sel.size(); ++i) {
          for (int s = 0; s < m; ++s) {
            pred[s] += fit.coefficients[i] * entries[sel[i]].values[s];
          }
        }
        return nmse(pred, data.y);
      };
      if (model_nmse(pruned, reduced) <=
          model_nmse(selected, ls) * (1.0 + 1e-6) + 1e-18) {
        selected = std::move(pruned);
        ls = std::move(reduced);
      }
    }
  }

  model.intercept = ls.intercept;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (ls.coefficients[i] == 0.0) continue;
    model.terms.push_back({entries[selected[i]], ls.coefficients[i]});
  }

  // Fitted values accumulate in formula term order so the printed model
  // re-evaluates to them.
  model.fitted.assign(m, model.intercept);
  for (const auto& term : model.terms) {
    for (int i = 0; i < m; ++i) {
      model.fitted[i] += term.coefficient * term.basis.values[i];
    }
  }
  model.nmse = nmse(model.fitted, data.y);
  model.formula = render_formula(model.intercept, model.terms);
  return model;
}

std::vector<double> predict(const RegressionModel& model, std::span<const double> x,
                            int m, int d) {
  std::vector<double> out(m, model.intercept);
  for (const auto& term : model.terms) {
    const Evaluation ev = evaluate(term.basis.tree, x, m, d);
    for (int i = 0; i < m; ++i) {
      out[i] = ev.valid[i] ? out[i] + term.coefficient * ev.values[i]
                           : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

}  // namespace ebr
