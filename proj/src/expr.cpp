// SPDX-License-Identifier: Apache-2.0
#include "sepenv/expr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cctype>
#include <cmath>
#include <numbers>
#include <system_error>

namespace sepenv {
namespace {

NodePtr make_constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

NodePtr make_variable(Side side, int index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->side = side;
  n->index = index;
  return n;
}

NodePtr make_unary(UnaryOp op, NodePtr c) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Unary;
  n->unary = op;
  n->children = {std::move(c)};
  return n;
}

NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Binary;
  n->binary = op;
  n->children = {std::move(a), std::move(b)};
  return n;
}

NodePtr make_pow(NodePtr base, double exponent) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Pow;
  n->value = exponent;
  n->children = {std::move(base)};
  return n;
}

NodePtr make_nary(NodeKind kind, std::vector<NodePtr> cs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children = std::move(cs);
  return n;
}

bool has_variables(const Node& n) {
  if (n.kind == NodeKind::Variable) return true;
  return std::any_of(n.children.begin(), n.children.end(), [](const NodePtr& c) { return has_variables(*c); });
}

bool is_integer_exponent(double p) { return p == std::floor(p) && std::fabs(p) <= 2147483647.0; }

class Parser {
 public:
  Parser(std::string_view src, int m, int n) : src_(src), m_(m), n_(n) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int m_;
  int n_;

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  char peek() {
    skip();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      lhs = make_binary(c == '+' ? BinaryOp::Add : BinaryOp::Sub, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      lhs = make_binary(c == '*' ? BinaryOp::Mul : BinaryOp::Div, lhs, factor());
    }
    return lhs;
  }

  // "-" applies after "^", and "-<literal>" folds into a negative constant.
  NodePtr factor() {
    bool negate = false;
    if (peek() == '-') {
      ++pos_;
      negate = true;
    }
    bool literal = false;
    NodePtr base = atom(&literal);
    if (peek() == '^') {
      ++pos_;
      const std::size_t at = pos_;
      NodePtr ex = atom(nullptr);
      if (has_variables(*ex)) throw ParseError("exponent must be constant", at);
      base = make_pow(base, eval_point(Expr(ex, 0, 0), std::span<const double>{}));
      literal = false;
    }
    if (!negate) return base;
    if (literal) return make_constant(-base->value);
    return make_unary(UnaryOp::Neg, base);
  }

  NodePtr atom(bool* literal) {
    if (literal) *literal = false;
    const char c = peek();
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      if (literal) *literal = true;
      return number();
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '\0') throw ParseError("unexpected end of input", pos_);
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t k = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++k;
      return k;
    };
    std::size_t count = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) throw ParseError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        digits();
      }
    }
    double v = 0.0;
    const char* first = src_.data() + start;
    const auto [ptr, ec] = std::from_chars(first, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) throw ParseError("malformed number", start);
    return make_constant(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    const std::string_view id = src_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, UnaryOp> unary[] = {
        {"sin", UnaryOp::Sin}, {"cos", UnaryOp::Cos},   {"exp", UnaryOp::Exp},
        {"log", UnaryOp::Log}, {"sqrt", UnaryOp::Sqrt}, {"abs", UnaryOp::Abs}};
    for (const auto& [name, op] : unary) {
      if (id != name) continue;
      std::vector<NodePtr> args = arguments(start);
      if (args.size() != 1) throw ParseError(std::string(id) + " takes exactly one argument", start);
      return make_unary(op, args[0]);
    }
    if (id == "max" || id == "min") {
      std::vector<NodePtr> args = arguments(start);
      return make_nary(id == "max" ? NodeKind::Max : NodeKind::Min, std::move(args));
    }
    if (id == "pi") return make_constant(std::numbers::pi);
    if (id == "e") return make_constant(std::numbers::e);

    if (id == "t" && m_ == 1) return make_variable(Side::M, 1);
    if (id == "x" && n_ == 1) return make_variable(Side::N, 1);
    if (id.size() >= 2 && (id[0] == 't' || id[0] == 'x') &&
        std::all_of(id.begin() + 1, id.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      int index = 0;
      const auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), index);
      const Side side = id[0] == 't' ? Side::M : Side::N;
      const int limit = side == Side::M ? m_ : n_;
      if (ec != std::errc() || index < 1 || index > limit)
        throw ParseError("variable index out of range: " + std::string(id), start);
      return make_variable(side, index);
    }
    throw ParseError("unknown identifier: " + std::string(id), start);
  }

  std::vector<NodePtr> arguments(std::size_t name_at) {
    if (peek() != '(') throw ParseError("function call requires '('", name_at);
    ++pos_;
    std::vector<NodePtr> args{expr()};
    while (peek() == ',') {
      ++pos_;
      args.push_back(expr());
    }
    expect(')');
    return args;
  }
};

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string print_constant(double v) {
  if (std::signbit(v)) return "(-" + format_number(-v) + ")";
  return format_number(v);
}

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Abs: return "abs";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
  }
  return "?";
}

bool node_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case NodeKind::Constant:
    case NodeKind::Pow:
      if (std::bit_cast<std::uint64_t>(a.value) != std::bit_cast<std::uint64_t>(b.value)) return false;
      break;
    case NodeKind::Variable:
      if (a.side != b.side || a.index != b.index) return false;
      break;
    case NodeKind::Unary:
      if (a.unary != b.unary) return false;
      break;
    case NodeKind::Binary:
      if (a.binary != b.binary) return false;
      break;
    case NodeKind::Max:
    case NodeKind::Min:
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!node_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

double eval_node(const Node& n, std::span<const double> tx, int m) {
  switch (n.kind) {
    case NodeKind::Constant: return n.value;
    case NodeKind::Variable: return tx[static_cast<std::size_t>(n.side == Side::M ? n.index - 1 : m + n.index - 1)];
    case NodeKind::Unary: {
      const double v = eval_node(*n.children[0], tx, m);
      switch (n.unary) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::Abs: return std::fabs(v);
        case UnaryOp::Exp: return std::exp(v);
        case UnaryOp::Log:
          if (!(v > 0.0)) throw DomainError("log of nonpositive value", print(n));
          return std::log(v);
        case UnaryOp::Sqrt:
          if (v < 0.0) throw DomainError("sqrt of negative value", print(n));
          return std::sqrt(v);
        case UnaryOp::Sin: return std::sin(v);
        case UnaryOp::Cos: return std::cos(v);
      }
      break;
    }
    case NodeKind::Binary: {
      const double a = eval_node(*n.children[0], tx, m);
      const double b = eval_node(*n.children[1], tx, m);
      switch (n.binary) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
          if (b == 0.0) throw DomainError("division by zero", print(n));
          return a / b;
      }
      break;
    }
    case NodeKind::Pow: {
      const double base = eval_node(*n.children[0], tx, m);
      const double p = n.value;
      if (is_integer_exponent(p)) {
        if (p < 0.0 && base == 0.0) throw DomainError("negative power of zero", print(n));
      } else {
        if (base < 0.0) throw DomainError("real power of negative value", print(n));
        if (p < 0.0 && base == 0.0) throw DomainError("negative power of zero", print(n));
      }
      return std::pow(base, p);
    }
    // (acc > v) ? acc : v matches the SIMD max lane semantics, signed zeros included.
    case NodeKind::Max: {
      double acc = eval_node(*n.children[0], tx, m);
      for (std::size_t i = 1; i < n.children.size(); ++i) {
        const double v = eval_node(*n.children[i], tx, m);
        acc = acc > v ? acc : v;
      }
      return acc;
    }
    case NodeKind::Min: {
      double acc = eval_node(*n.children[0], tx, m);
      for (std::size_t i = 1; i < n.children.size(); ++i) {
        const double v = eval_node(*n.children[i], tx, m);
        acc = acc < v ? acc : v;
      }
      return acc;
    }
  }
  return 0.0;
}

Interval enclose_node(const Node& n, const Box& box, int m) {
  switch (n.kind) {
    case NodeKind::Constant: return Interval(n.value);
    case NodeKind::Variable: return box[static_cast<std::size_t>(n.side == Side::M ? n.index - 1 : m + n.index - 1)];
    case NodeKind::Unary: {
      const Interval v = enclose_node(*n.children[0], box, m);
      switch (n.unary) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::Abs: return abs(v);
        case UnaryOp::Exp: return exp(v);
        case UnaryOp::Log:
          if (!(v.lo > 0.0)) throw DomainAmbiguity("log argument enclosure reaches nonpositive values", print(n));
          return log(v);
        case UnaryOp::Sqrt:
          if (v.lo < 0.0) throw DomainAmbiguity("sqrt argument enclosure reaches negative values", print(n));
          return sqrt(v);
        case UnaryOp::Sin: return sin(v);
        case UnaryOp::Cos: return cos(v);
      }
      break;
    }
    case NodeKind::Binary: {
      const Interval a = enclose_node(*n.children[0], box, m);
      const Interval b = enclose_node(*n.children[1], box, m);
      switch (n.binary) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
          if (b.contains_zero()) throw DomainAmbiguity("divisor enclosure contains zero", print(n));
          return a / b;
      }
      break;
    }
    case NodeKind::Pow: {
      const Interval base = enclose_node(*n.children[0], box, m);
      const double p = n.value;
      if (is_integer_exponent(p)) {
        if (p < 0.0 && base.contains_zero()) throw DomainAmbiguity("negative power of an enclosure containing zero", print(n));
        return pown(base, static_cast<int>(p));
      }
      if (base.lo < 0.0 || (p < 0.0 && base.lo <= 0.0))
        throw DomainAmbiguity("real power of an enclosure reaching nonpositive values", print(n));
      return powr(base, p);
    }
    case NodeKind::Max:
    case NodeKind::Min: {
      Interval acc = enclose_node(*n.children[0], box, m);
      for (std::size_t i = 1; i < n.children.size(); ++i) {
        const Interval v = enclose_node(*n.children[i], box, m);
        acc = n.kind == NodeKind::Max ? max(acc, v) : min(acc, v);
      }
      return acc;
    }
  }
  return Interval::entire();
}

NodePtr substitute_node(const NodePtr& n, Side side, int index, const NodePtr& replacement) {
  if (n->kind == NodeKind::Variable) return (n->side == side && n->index == index) ? replacement : n;
  if (n->children.empty()) return n;
  auto copy = std::make_shared<Node>(*n);
  for (auto& c : copy->children) c = substitute_node(c, side, index, replacement);
  return copy;
}

std::size_t node_depth(const Node& n) {
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, 1 + node_depth(*c));
  return d;
}

}  // namespace

Expr Expr::constant(double v, int m, int n) { return Expr(make_constant(v), m, n); }
Expr Expr::variable(Side side, int index, int m, int n) { return Expr(make_variable(side, index), m, n); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.m_ != b.m_ || a.n_ != b.n_) return false;
  if (!a.root_ || !b.root_) return a.root_ == b.root_;
  return node_equal(*a.root_, *b.root_);
}

Expr parse(std::string_view source, int m, int n) {
  if (m < 0 || n < 0) throw DimensionMismatch("negative dimension");
  return Expr(Parser(source, m, n).parse(), m, n);
}

std::string print(const Node& n) {
  switch (n.kind) {
    case NodeKind::Constant: return print_constant(n.value);
    case NodeKind::Variable: return (n.side == Side::M ? "t" : "x") + std::to_string(n.index);
    case NodeKind::Unary:
      if (n.unary == UnaryOp::Neg) return "(-(" + print(*n.children[0]) + "))";
      return std::string(unary_name(n.unary)) + "(" + print(*n.children[0]) + ")";
    case NodeKind::Binary: {
      static constexpr const char* ops[] = {" + ", " - ", " * ", " / "};
      return "(" + print(*n.children[0]) + ops[static_cast<int>(n.binary)] + print(*n.children[1]) + ")";
    }
    case NodeKind::Pow: return "((" + print(*n.children[0]) + ")^(" + print_constant(n.value) + "))";
    case NodeKind::Max:
    case NodeKind::Min: {
      std::string s = n.kind == NodeKind::Max ? "max(" : "min(";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) s += ", ";
        s += print(*n.children[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

std::string print(const Expr& e) { return e.empty() ? std::string() : print(e.root()); }

std::size_t depth(const Expr& e) { return node_depth(e.root()); }

double eval_point(const Expr& e, std::span<const double> t, std::span<const double> x) {
  if (t.size() != static_cast<std::size_t>(e.m()) || x.size() != static_cast<std::size_t>(e.n()))
    throw DimensionMismatch("point dimensions do not match the expression");
  std::vector<double> tx(t.begin(), t.end());
  tx.insert(tx.end(), x.begin(), x.end());
  return eval_node(e.root(), tx, e.m());
}

double eval_point(const Expr& e, std::span<const double> tx) {
  if (tx.size() != static_cast<std::size_t>(e.m() + e.n()))
    throw DimensionMismatch("point dimensions do not match the expression");
  return eval_node(e.root(), tx, e.m());
}

Interval eval_interval(const Expr& e, const Box& box) {
  if (box.size() != static_cast<std::size_t>(e.m() + e.n()))
    throw DimensionMismatch("box dimension " + std::to_string(box.size()) + " does not match expression dimension " +
                            std::to_string(e.m() + e.n()));
  return enclose_node(e.root(), box, e.m());
}

Expr pointwise_max(const std::vector<Expr>& es) {
  if (es.empty()) throw ExprError("pointwise_max of an empty family");
  std::vector<NodePtr> roots;
  for (const auto& e : es) {
    if (e.m() != es[0].m() || e.n() != es[0].n()) throw DimensionMismatch("family members have different dimensions");
    roots.push_back(e.root_ptr());
  }
  return Expr(make_nary(NodeKind::Max, std::move(roots)), es[0].m(), es[0].n());
}

Expr substitute(const Expr& e, Side side, int index, const Expr& replacement, int m, int n) {
  return Expr(substitute_node(e.root_ptr(), side, index, replacement.root_ptr()), m, n);
}

}  // namespace sepenv
