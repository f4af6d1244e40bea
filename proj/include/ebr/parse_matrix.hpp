#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "ebr/codes.hpp"

namespace ebr {

// Integer genome of one basis function. Row k is (t, a2, a3): operator code,
// operand code for s1, operand code for s2.
struct ParseMatrix {
  std::vector<std::array<int, 3>> rows;

  int row_count() const { return static_cast<int>(rows.size()); }

  // Throws Error naming the offending row/column when a code is out of range.
  void validate(const MappingRules& rules) const;

  // "1,1,2;3,3,2;12,3,1"
  std::string to_literal() const;
  static ParseMatrix from_literal(const std::string& text);

  friend auto operator<=>(const ParseMatrix&, const ParseMatrix&) = default;
};

}  // namespace ebr
