#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ebr/codes.hpp"
#include "ebr/dataset.hpp"
#include "ebr/parse_matrix.hpp"

namespace ebr {

// Denominators (and reciprocal arguments) smaller than this in magnitude
// invalidate the sample instead of being substituted away.
inline constexpr double kDivisionGuard = 1e-12;

struct ExprNode {
  enum class Kind : std::uint8_t { variable, constant, unary, binary };
  Kind kind = Kind::constant;
  Op op = Op::select_s1;  // meaningful for unary/binary only
  int var = 0;            // 1-based variable index
  double value = 0.0;     // constant payload
  int child[2] = {-1, -1};
};

// Value-type expression tree stored as an arena; node 0.. with a root index.
class ExpressionTree {
 public:
  ExpressionTree() = default;

  static ExpressionTree variable(int index);
  static ExpressionTree constant(double value);
  static ExpressionTree unary(Op op, ExpressionTree child);
  static ExpressionTree binary(Op op, ExpressionTree lhs, ExpressionTree rhs);

  const std::vector<ExprNode>& nodes() const { return nodes_; }
  int root() const { return root_; }
  const ExprNode& node(int i) const { return nodes_[i]; }
  bool empty() const { return nodes_.empty(); }

  int depth() const;            // leaves count as depth 1
  int max_variable() const;     // 0 when no variable appears

 private:
  friend ExpressionTree decode(const ParseMatrix&, const MappingRules&);
  int add(ExprNode n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  std::vector<ExprNode> nodes_;
  int root_ = -1;
};

// Executes the rows top to bottom over the accumulator, which reads as the
// constant 0 before its first assignment. Total: every in-range matrix
// decodes; domain violations only surface at evaluation.
ExpressionTree decode(const ParseMatrix& matrix, const MappingRules& rules);

struct Evaluation {
  std::vector<double> values;
  std::vector<std::uint8_t> valid;  // per-sample flags
  bool all_valid = false;
};

// Componentwise evaluation over row-major samples; sqrt of a negative, log of
// a non-positive, guarded division and any non-finite intermediate mark the
// component invalid.
Evaluation evaluate(const ExpressionTree& tree, std::span<const double> x,
                    int m, int d);
Evaluation evaluate(const ExpressionTree& tree, const Dataset& data);

// Deterministic infix rendering using x1..xd; parenthesized only where the
// usual precedence rules require it.
std::string to_infix(const ExpressionTree& tree);

// Precedence of the printed root: 1 additive, 2 multiplicative, 3 postfix
// square, 4 atoms and calls. Lets callers embedding an infix string decide
// whether it needs wrapping.
int root_precedence(const ExpressionTree& tree);

// Structural fingerprint: select rows and ignored operands vanish, commutative
// operands sort, and the whole matrix reduces to its decoded tree's canonical
// serialization. Equal keys <=> identical canonical trees.
std::string canonical_key(const ParseMatrix& matrix, const MappingRules& rules);
std::string canonical_key(const ExpressionTree& tree);

}  // namespace ebr
