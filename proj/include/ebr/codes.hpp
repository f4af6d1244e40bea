#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace ebr {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Operator codes for column 1 of a parse matrix. Codes 1 and 2 select an
// operand, 3-6 are binary, 7-13 apply to s1 only.
enum class Op : int {
  select_s1 = 1,
  select_s2 = 2,
  add = 3,
  sub = 4,
  mul = 5,
  div = 6,
  sqrt = 7,
  square = 8,
  reciprocal = 9,
  log = 10,
  exp = 11,
  sin = 12,
  cos = 13,
};

inline constexpr int kOperatorCount = 13;

inline constexpr std::array<Op, kOperatorCount> kOperatorCodes = {
    Op::select_s1, Op::select_s2, Op::add,  Op::sub, Op::mul,
    Op::div,       Op::sqrt,      Op::square, Op::reciprocal,
    Op::log,       Op::exp,       Op::sin,  Op::cos,
};

constexpr bool op_is_select(Op op) {
  return op == Op::select_s1 || op == Op::select_s2;
}

constexpr bool op_is_binary(Op op) {
  return static_cast<int>(op) >= 3 && static_cast<int>(op) <= 6;
}

constexpr bool op_is_unary(Op op) { return static_cast<int>(op) >= 7; }

constexpr bool op_is_commutative(Op op) {
  return op == Op::add || op == Op::mul;
}

const char* op_name(Op op);

// Code tables for one problem dimension: operator codes are always 1..13,
// operand codes 1..d map to variables x1..xd and code d+1 to the running
// accumulator.
struct MappingRules {
  int dimension = 1;

  int operand_code_count() const { return dimension + 1; }
  int accumulator_code() const { return dimension + 1; }

  static MappingRules for_dimension(int d) {
    if (d < 1) throw Error("mapping rules require dimension >= 1");
    return MappingRules{d};
  }
};

}  // namespace ebr
