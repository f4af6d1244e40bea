// Test-side oracles, deliberately independent of the library internals they
// check: a scalar row-program interpreter, a naive full-enumeration searcher
// without canonicalization, an SVD pseudo-inverse solver, and a parser that
// re-evaluates printed formulas.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

struct Sample {
  double value = 0.0;
  bool valid = true;
};

// Rows whose accumulator value is overwritten before being read contribute
// nothing to the decoded basis; only the trailing chain that feeds the final
// value executes.
inline std::size_t first_live_row(const std::vector<std::array<int, 3>>& rows, int d) {
  const int acc = d + 1;
  std::size_t k = rows.size() - 1;
  while (k > 0) {
    const auto& row = rows[k];
    const int t = row[0];
    bool reads_acc = false;
    if (t == 1) reads_acc = row[1] == acc;
    else if (t == 2) reads_acc = row[2] == acc;
    else if (t >= 3 && t <= 6) reads_acc = row[1] == acc || row[2] == acc;
    else reads_acc = row[1] == acc;
    if (!reads_acc) break;
    --k;
  }
  return k;
}

// Runs the live rows directly over one sample point, accumulator starts at 0.
inline Sample interpret_rows(const std::vector<std::array<int, 3>>& rows, int d,
                             const double* x) {
  double f = 0.0;
  bool valid = true;
  auto operand = [&](int code) { return code == d + 1 ? f : x[code - 1]; };
  const std::size_t start = first_live_row(rows, d);
  for (std::size_t r = start; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const int t = row[0];
    const double s1 = operand(row[1]);
    const double s2 = operand(row[2]);
    double next = f;
    switch (t) {
      case 1: next = s1; break;
      case 2: next = s2; break;
      case 3: next = s1 + s2; break;
      case 4: next = s1 - s2; break;
      case 5: next = s1 * s2; break;
      case 6:
        if (std::fabs(s2) < 1e-12) valid = false; else next = s1 / s2;
        break;
      case 7: next = std::sqrt(s1); break;
      case 8: next = s1 * s1; break;
      case 9:
        if (std::fabs(s1) < 1e-12) valid = false; else next = 1.0 / s1;
        break;
      case 10: next = std::log(s1); break;
      case 11: next = std::exp(s1); break;
      case 12: next = std::sin(s1); break;
      case 13: next = std::cos(s1); break;
      default: valid = false;
    }
    if (!valid) return {std::numeric_limits<double>::quiet_NaN(), false};
    if (t != 1 && t != 2 && !std::isfinite(next)) {
      return {next, false};
    }
    f = next;
  }
  return {f, true};
}

// Same two-pass correlation arithmetic the engine documents, written flat.
inline double pearson(const std::vector<double>& v, const std::vector<double>& y) {
  const std::size_t m = v.size();
  double mean_y = 0.0;
  for (double t : y) mean_y += t;
  mean_y /= static_cast<double>(m);
  std::vector<double> yc(m);
  double sum_yc2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    yc[i] = y[i] - mean_y;
    sum_yc2 += yc[i] * yc[i];
  }
  double mean_v = 0.0;
  for (double t : v) mean_v += t;
  mean_v /= static_cast<double>(m);
  double num = 0.0, var_v = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = v[i] - mean_v;
    num += a * yc[i];
    var_v += a * a;
  }
  if (var_v / static_cast<double>(m) < 1e-300) return 0.0;
  return num / (std::sqrt(var_v) * std::sqrt(sum_yc2));
}

// Minimal elite pool following the documented insertion rules, entries as
// (score, flattened matrix) pairs kept best-first.
struct NaivePool {
  struct Entry {
    double score;
    std::vector<int> flat;
    std::vector<double> values;
  };
  int capacity;
  std::vector<Entry> entries;

  explicit NaivePool(int cap) : capacity(cap) {}

  static bool before(const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.flat < b.flat;
  }

  bool offer(Entry e) {
    int below = -1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (std::fabs(entries[i].score - e.score) < 1e-7) {
        if (entries[i].score >= e.score) return false;
        below = static_cast<int>(i);
      }
    }
    if (static_cast<int>(entries.size()) >= capacity && !before(e, entries.back())) {
      return false;
    }
    if (below >= 0) entries.erase(entries.begin() + below);
    std::size_t pos = 0;
    while (pos < entries.size() && before(entries[pos], e)) ++pos;
    entries.insert(entries.begin() + pos, std::move(e));
    if (static_cast<int>(entries.size()) > capacity) entries.pop_back();
    return true;
  }
};

// Brute-force search: every raw matrix in lexicographic order, no structural
// dedup, scalar interpretation, the documented pool rules.
inline NaivePool brute_force_search(int n_presv, int row_count, int d,
                                    const std::vector<double>& x,
                                    const std::vector<double>& y) {
  const int m = static_cast<int>(y.size());
  const int operand_max = d + 1;
  std::vector<std::array<int, 3>> rows(row_count, {1, 1, 1});
  NaivePool pool(n_presv);

  std::vector<int> digits(static_cast<std::size_t>(row_count) * 3, 0);
  const auto radix = [&](int pos) { return pos % 3 == 0 ? 13 : operand_max; };
  bool done = false;
  while (!done) {
    for (int r = 0; r < row_count; ++r) {
      rows[r] = {digits[r * 3] + 1, digits[r * 3 + 1] + 1, digits[r * 3 + 2] + 1};
    }
    std::vector<double> values(m);
    bool all_valid = true;
    for (int i = 0; i < m && all_valid; ++i) {
      const Sample s = interpret_rows(rows, d, &x[static_cast<std::size_t>(i) * d]);
      values[i] = s.value;
      all_valid = s.valid;
    }
    if (all_valid) {
      NaivePool::Entry e;
      e.score = std::min(std::fabs(pearson(values, y)), 1.0);
      e.flat.reserve(rows.size() * 3);
      for (const auto& row : rows) {
        e.flat.push_back(row[0]);
        e.flat.push_back(row[1]);
        e.flat.push_back(row[2]);
      }
      e.values = std::move(values);
      pool.offer(std::move(e));
    }
    // Odometer over the flattened digits, last digit fastest.
    int pos = row_count * 3 - 1;
    while (pos >= 0) {
      if (++digits[pos] < radix(pos)) break;
      digits[pos] = 0;
      --pos;
    }
    done = pos < 0;
  }
  return pool;
}

// Recursive-descent evaluator for the engine's printed formulas:
// numbers (to_chars shortest form), x<k>, + - * /, postfix ^2, unary minus,
// sqrt/log/exp/sin/cos calls.
class FormulaParser {
 public:
  FormulaParser(const std::string& text, const double* x, int d)
      : text_(text), x_(x), d_(d) {}

  double parse() {
    const double v = expression();
    skip_ws();
    if (pos_ != text_.size()) throw std::runtime_error("trailing input: " + text_.substr(pos_));
    return v;
  }

 private:
  double expression() {
    double v = term();
    while (true) {
      skip_ws();
      if (peek() == '+') {
        ++pos_;
        v += term();
      } else if (peek() == '-') {
        ++pos_;
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = factor();
    while (true) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        v *= factor();
      } else if (peek() == '/') {
        ++pos_;
        v /= factor();
      } else {
        return v;
      }
    }
  }

  double factor() {
    skip_ws();
    if (peek() == '-') {
      ++pos_;
      return -factor();
    }
    return postfix();
  }

  double postfix() {
    double v = primary();
    while (true) {
      skip_ws();
      if (peek() == '^') {
        ++pos_;
        if (peek() != '2') throw std::runtime_error("expected ^2");
        ++pos_;
        v = v * v;
      } else {
        return v;
      }
    }
  }

  double primary() {
    skip_ws();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      const double v = expression();
      expect(')');
      return v;
    }
    if (c == 'x') {
      ++pos_;
      int idx = 0;
      while (std::isdigit(peek())) idx = idx * 10 + (text_[pos_++] - '0');
      if (idx < 1 || idx > d_) throw std::runtime_error("variable out of range");
      return x_[idx - 1];
    }
    if (std::isalpha(c)) {
      std::string name;
      while (std::isalpha(peek())) name += text_[pos_++];
      expect('(');
      const double a = expression();
      expect(')');
      if (name == "sqrt") return std::sqrt(a);
      if (name == "log") return std::log(a);
      if (name == "exp") return std::exp(a);
      if (name == "sin") return std::sin(a);
      if (name == "cos") return std::cos(a);
      throw std::runtime_error("unknown function " + name);
    }
    // number
    std::size_t start = pos_;
    while (std::isdigit(peek()) || peek() == '.' || peek() == 'e' || peek() == 'E' ||
           ((peek() == '+' || peek() == '-') && pos_ > start &&
            (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))) {
      ++pos_;
    }
    if (pos_ == start) throw std::runtime_error("expected a number at: " + text_.substr(pos_));
    return std::stod(text_.substr(start, pos_ - start));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) throw std::runtime_error(std::string("expected ") + c);
    ++pos_;
  }

  const std::string& text_;
  const double* x_;
  int d_;
  std::size_t pos_ = 0;
};

inline double eval_formula(const std::string& text, const double* x, int d) {
  return FormulaParser(text, x, d).parse();
}

}  // namespace oracle
