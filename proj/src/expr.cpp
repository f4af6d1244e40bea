#include "ebr/expr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

namespace ebr {

const char* op_name(Op op) {
  switch (op) {
    case Op::select_s1: return "s1";
    case Op::select_s2: return "s2";
    case Op::add: return "+";
    case Op::sub: return "-";
    case Op::mul: return "*";
    case Op::div: return "/";
    case Op::sqrt: return "sqrt";
    case Op::square: return "^2";
    case Op::reciprocal: return "1/";
    case Op::log: return "log";
    case Op::exp: return "exp";
    case Op::sin: return "sin";
    case Op::cos: return "cos";
  }
  return "?";
}

void ParseMatrix::validate(const MappingRules& rules) const {
  if (rows.empty()) throw Error("parse matrix needs at least one row");
  const int operand_max = rules.operand_code_count();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row[0] < 1 || row[0] > kOperatorCount) {
      throw Error("operator code out of range at row " + std::to_string(r + 1) +
                  ", column 1");
    }
    for (int c = 1; c < 3; ++c) {
      if (row[c] < 1 || row[c] > operand_max) {
        throw Error("operand code out of range at row " + std::to_string(r + 1) +
                    ", column " + std::to_string(c + 1));
      }
    }
  }
}

std::string ParseMatrix::to_literal() const {
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r) out += ';';
    out += std::to_string(rows[r][0]) + ',' + std::to_string(rows[r][1]) + ',' +
           std::to_string(rows[r][2]);
  }
  return out;
}

ParseMatrix ParseMatrix::from_literal(const std::string& text) {
  ParseMatrix m;
  std::size_t pos = 0;
  int row_index = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string::npos) end = text.size();
    std::string row_text = text.substr(pos, end - pos);
    ++row_index;
    std::array<int, 3> row{};
    std::size_t cell_pos = 0;
    for (int c = 0; c < 3; ++c) {
      std::size_t cell_end = row_text.find(',', cell_pos);
      if (cell_end == std::string::npos) cell_end = row_text.size();
      if (c < 2 && cell_end == row_text.size()) {
        throw Error("matrix row " + std::to_string(row_index) +
                    " needs 3 comma-separated entries");
      }
      std::string cell = row_text.substr(cell_pos, cell_end - cell_pos);
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      while (!cell.empty() && cell.back() == ' ') cell.pop_back();
      int value = 0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || p != cell.data() + cell.size()) {
        throw Error("bad integer '" + cell + "' at row " + std::to_string(row_index) +
                    ", column " + std::to_string(c + 1));
      }
      row[c] = value;
      cell_pos = cell_end + 1;
      if (c == 2 && cell_end != row_text.size()) {
        throw Error("matrix row " + std::to_string(row_index) + " has extra entries");
      }
    }
    m.rows.push_back(row);
    if (end == text.size()) break;
    pos = end + 1;
  }
  return m;
}

ExpressionTree ExpressionTree::variable(int index) {
  if (index < 1) throw Error("variable index must be >= 1");
  ExpressionTree t;
  ExprNode n;
  n.kind = ExprNode::Kind::variable;
  n.var = index;
  t.root_ = t.add(n);
  return t;
}

ExpressionTree ExpressionTree::constant(double value) {
  ExpressionTree t;
  ExprNode n;
  n.kind = ExprNode::Kind::constant;
  n.value = value;
  t.root_ = t.add(n);
  return t;
}

namespace {

int copy_subtree(const ExpressionTree& src, int node, std::vector<ExprNode>& dst) {
  const ExprNode& n = src.node(node);
  ExprNode copy = n;
  if (n.kind == ExprNode::Kind::unary) {
    copy.child[0] = copy_subtree(src, n.child[0], dst);
  } else if (n.kind == ExprNode::Kind::binary) {
    copy.child[0] = copy_subtree(src, n.child[0], dst);
    copy.child[1] = copy_subtree(src, n.child[1], dst);
  }
  dst.push_back(copy);
  return static_cast<int>(dst.size()) - 1;
}

}  // namespace

ExpressionTree ExpressionTree::unary(Op op, ExpressionTree child) {
  if (!op_is_unary(op)) throw Error("not a unary operator");
  ExpressionTree t = std::move(child);
  ExprNode n;
  n.kind = ExprNode::Kind::unary;
  n.op = op;
  n.child[0] = t.root_;
  t.root_ = t.add(n);
  return t;
}

ExpressionTree ExpressionTree::binary(Op op, ExpressionTree lhs, ExpressionTree rhs) {
  if (!op_is_binary(op)) throw Error("not a binary operator");
  ExpressionTree t = std::move(lhs);
  int right = copy_subtree(rhs, rhs.root(), t.nodes_);
  ExprNode n;
  n.kind = ExprNode::Kind::binary;
  n.op = op;
  n.child[0] = t.root_;
  n.child[1] = right;
  t.root_ = t.add(n);
  return t;
}

namespace {

int depth_of(const ExpressionTree& t, int node) {
  const ExprNode& n = t.node(node);
  switch (n.kind) {
    case ExprNode::Kind::variable:
    case ExprNode::Kind::constant:
      return 1;
    case ExprNode::Kind::unary:
      return 1 + depth_of(t, n.child[0]);
    case ExprNode::Kind::binary:
      return 1 + std::max(depth_of(t, n.child[0]), depth_of(t, n.child[1]));
  }
  return 1;
}

}  // namespace

int ExpressionTree::depth() const { return root_ < 0 ? 0 : depth_of(*this, root_); }

int ExpressionTree::max_variable() const {
  int best = 0;
  for (const auto& n : nodes_) {
    if (n.kind == ExprNode::Kind::variable) best = std::max(best, n.var);
  }
  return best;
}

ExpressionTree decode(const ParseMatrix& matrix, const MappingRules& rules) {
  matrix.validate(rules);
  ExpressionTree t;
  // Roots of the accumulator after each row; shared subtrees are duplicated
  // lazily only through indices, the arena itself is shared.
  int f = t.add(ExprNode{});  // constant 0: the accumulator before row 1

  auto operand = [&](int code) -> int {
    if (code == rules.accumulator_code()) return f;
    ExprNode leaf;
    leaf.kind = ExprNode::Kind::variable;
    leaf.var = code;
    return t.add(leaf);
  };

  for (const auto& row : matrix.rows) {
    const Op op = static_cast<Op>(row[0]);
    const int s1 = operand(row[1]);
    if (op == Op::select_s1) {
      f = s1;
      continue;
    }
    if (op == Op::select_s2) {
      f = operand(row[2]);
      continue;
    }
    ExprNode n;
    n.op = op;
    if (op_is_binary(op)) {
      n.kind = ExprNode::Kind::binary;
      n.child[0] = s1;
      n.child[1] = operand(row[2]);
    } else {
      n.kind = ExprNode::Kind::unary;
      n.child[0] = s1;
    }
    f = t.add(n);
  }
  t.root_ = f;
  return t;
}

namespace {

// One node's worth of componentwise work; `bad` accumulates permanently.
void eval_node(const ExpressionTree& t, int node, std::span<const double> x,
               int m, int d, std::vector<double>& out, std::vector<std::uint8_t>& bad) {
  const ExprNode& n = t.node(node);
  switch (n.kind) {
    case ExprNode::Kind::variable: {
      const int k = n.var - 1;
      for (int i = 0; i < m; ++i) out[i] = x[static_cast<std::size_t>(i) * d + k];
      return;
    }
    case ExprNode::Kind::constant:
      std::fill(out.begin(), out.begin() + m, n.value);
      return;
    case ExprNode::Kind::binary: {
      std::vector<double> rhs(m);
      eval_node(t, n.child[0], x, m, d, out, bad);
      eval_node(t, n.child[1], x, m, d, rhs, bad);
      switch (n.op) {
        case Op::add:
          for (int i = 0; i < m; ++i) out[i] = out[i] + rhs[i];
          break;
        case Op::sub:
          for (int i = 0; i < m; ++i) out[i] = out[i] - rhs[i];
          break;
        case Op::mul:
          for (int i = 0; i < m; ++i) out[i] = out[i] * rhs[i];
          break;
        case Op::div:
          for (int i = 0; i < m; ++i) {
            if (std::fabs(rhs[i]) < kDivisionGuard) {
              out[i] = std::numeric_limits<double>::quiet_NaN();
            } else {
              out[i] = out[i] / rhs[i];
            }
          }
          break;
        default:
          throw Error("corrupt tree");
      }
      break;
    }
    case ExprNode::Kind::unary: {
      eval_node(t, n.child[0], x, m, d, out, bad);
      switch (n.op) {
        case Op::sqrt:
          for (int i = 0; i < m; ++i) out[i] = std::sqrt(out[i]);
          break;
        case Op::square:
          for (int i = 0; i < m; ++i) out[i] = out[i] * out[i];
          break;
        case Op::reciprocal:
          for (int i = 0; i < m; ++i) {
            if (std::fabs(out[i]) < kDivisionGuard) {
              out[i] = std::numeric_limits<double>::quiet_NaN();
            } else {
              out[i] = 1.0 / out[i];
            }
          }
          break;
        case Op::log:
          for (int i = 0; i < m; ++i) out[i] = std::log(out[i]);
          break;
        case Op::exp:
          for (int i = 0; i < m; ++i) out[i] = std::exp(out[i]);
          break;
        case Op::sin:
          for (int i = 0; i < m; ++i) out[i] = std::sin(out[i]);
          break;
        case Op::cos:
          for (int i = 0; i < m; ++i) out[i] = std::cos(out[i]);
          break;
        default:
          throw Error("corrupt tree");
      }
      break;
    }
  }
  for (int i = 0; i < m; ++i) {
    if (!std::isfinite(out[i])) bad[i] = 1;
  }
}

}  // namespace

Evaluation evaluate(const ExpressionTree& tree, std::span<const double> x,
                    int m, int d) {
  if (tree.empty()) throw Error("empty expression tree");
  if (tree.max_variable() > d) throw Error("tree references variable beyond dimension");
  Evaluation ev;
  ev.values.assign(m, 0.0);
  ev.valid.assign(m, 1);
  std::vector<std::uint8_t> bad(m, 0);
  eval_node(tree, tree.root(), x, m, d, ev.values, bad);
  ev.all_valid = true;
  for (int i = 0; i < m; ++i) {
    ev.valid[i] = !bad[i];
    if (bad[i]) ev.all_valid = false;
  }
  return ev;
}

Evaluation evaluate(const ExpressionTree& tree, const Dataset& data) {
  return evaluate(tree, data.x, data.sample_count(), data.dimension());
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, p);
}

// Canonical serialization: prefix notation, commutative children ordered by
// their own serialization. Leaves self-delimit with ','.
void canonical_serialize(const ExpressionTree& t, int node, std::string& out) {
  const ExprNode& n = t.node(node);
  switch (n.kind) {
    case ExprNode::Kind::variable:
      out += 'v';
      out += std::to_string(n.var);
      out += ',';
      return;
    case ExprNode::Kind::constant: {
      out += 'k';
      char buf[20];
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf,
                                   std::bit_cast<std::uint64_t>(n.value), 16);
      (void)ec;
      out.append(buf, p);
      out += ',';
      return;
    }
    case ExprNode::Kind::unary:
      out += "RQILESC"[static_cast<int>(n.op) - static_cast<int>(Op::sqrt)];
      canonical_serialize(t, n.child[0], out);
      return;
    case ExprNode::Kind::binary: {
      out += "+-*/"[static_cast<int>(n.op) - static_cast<int>(Op::add)];
      if (!op_is_commutative(n.op)) {
        canonical_serialize(t, n.child[0], out);
        canonical_serialize(t, n.child[1], out);
        return;
      }
      std::string a, b;
      canonical_serialize(t, n.child[0], a);
      canonical_serialize(t, n.child[1], b);
      if (b < a) std::swap(a, b);
      out += a;
      out += b;
      return;
    }
  }
}

}  // namespace

std::string canonical_key(const ExpressionTree& tree) {
  if (tree.empty()) throw Error("empty expression tree");
  std::string out;
  canonical_serialize(tree, tree.root(), out);
  return out;
}

std::string canonical_key(const ParseMatrix& matrix, const MappingRules& rules) {
  return canonical_key(decode(matrix, rules));
}

namespace {

// Precedence levels used by the printer: 1 additive, 2 multiplicative,
// 3 postfix square, 4 atoms and function calls.
int precedence(const ExpressionTree& t, int node) {
  const ExprNode& n = t.node(node);
  switch (n.kind) {
    case ExprNode::Kind::variable:
      return 4;
    case ExprNode::Kind::constant:
      return n.value < 0 ? 4 : 4;  // negatives get their own parens below
    case ExprNode::Kind::unary:
      if (n.op == Op::square) return 3;
      if (n.op == Op::reciprocal) return 2;
      return 4;
    case ExprNode::Kind::binary:
      return (n.op == Op::add || n.op == Op::sub) ? 1 : 2;
  }
  return 4;
}

void print_node(const ExpressionTree& t, int node, std::string& out);

void print_child(const ExpressionTree& t, int node, int min_prec, std::string& out) {
  const bool parens = precedence(t, node) < min_prec;
  if (parens) out += '(';
  print_node(t, node, out);
  if (parens) out += ')';
}

void print_node(const ExpressionTree& t, int node, std::string& out) {
  const ExprNode& n = t.node(node);
  switch (n.kind) {
    case ExprNode::Kind::variable:
      out += 'x';
      out += std::to_string(n.var);
      return;
    case ExprNode::Kind::constant:
      if (n.value < 0) {
        out += '(';
        append_double(out, n.value);
        out += ')';
      } else {
        append_double(out, n.value);
      }
      return;
    case ExprNode::Kind::binary:
      switch (n.op) {
        case Op::add:
          print_child(t, n.child[0], 1, out);
          out += '+';
          print_child(t, n.child[1], 2, out);
          return;
        case Op::sub:
          print_child(t, n.child[0], 1, out);
          out += '-';
          print_child(t, n.child[1], 2, out);
          return;
        case Op::mul:
          print_child(t, n.child[0], 2, out);
          out += '*';
          print_child(t, n.child[1], 3, out);
          return;
        case Op::div:
          print_child(t, n.child[0], 2, out);
          out += '/';
          print_child(t, n.child[1], 3, out);
          return;
        default:
          return;
      }
    case ExprNode::Kind::unary:
      switch (n.op) {
        case Op::square:
          print_child(t, n.child[0], 4, out);
          out += "^2";
          return;
        case Op::reciprocal:
          out += "1/";
          print_child(t, n.child[0], 3, out);
          return;
        default:
          out += op_name(n.op);
          out += '(';
          print_node(t, n.child[0], out);
          out += ')';
          return;
      }
  }
}

}  // namespace

std::string to_infix(const ExpressionTree& tree) {
  if (tree.empty()) throw Error("empty expression tree");
  std::string out;
  print_node(tree, tree.root(), out);
  return out;
}

int root_precedence(const ExpressionTree& tree) {
  if (tree.empty()) throw Error("empty expression tree");
  return precedence(tree, tree.root());
}

}  // namespace ebr
