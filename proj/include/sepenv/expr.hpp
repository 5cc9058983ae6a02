// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sepenv/interval.hpp"

namespace sepenv {

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed source text. offset is the byte offset of the offending token.
class ParseError : public ExprError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : ExprError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Point evaluation outside the natural domain (log of nonpositive, x/0, ...).
class DomainError : public ExprError {
 public:
  DomainError(const std::string& what, std::string subexpr)
      : ExprError(what + " in " + subexpr), subexpr_(std::move(subexpr)) {}
  const std::string& subexpr() const { return subexpr_; }

 private:
  std::string subexpr_;
};

/// An enclosure touches a singular set, so no sound enclosure is returned.
class DomainAmbiguity : public ExprError {
 public:
  DomainAmbiguity(const std::string& what, std::string subexpr)
      : ExprError(what + " in " + subexpr), subexpr_(std::move(subexpr)) {}
  const std::string& subexpr() const { return subexpr_; }

 private:
  std::string subexpr_;
};

class DimensionMismatch : public ExprError {
 public:
  using ExprError::ExprError;
};

enum class NodeKind { Constant, Variable, Unary, Binary, Pow, Max, Min };
enum class UnaryOp { Neg, Abs, Exp, Log, Sqrt, Sin, Cos };
enum class BinaryOp { Add, Sub, Mul, Div };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Constant;
  double value = 0.0;        // Constant value, or the exponent for Pow
  Side side = Side::M;       // Variable
  int index = 0;             // Variable, 1-based
  UnaryOp unary = UnaryOp::Neg;
  BinaryOp binary = BinaryOp::Add;
  std::vector<NodePtr> children;
};

/// Immutable expression over t1..tm (factor M) and x1..xn (factor N).
/// Copies share the tree.
class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, int m, int n) : root_(std::move(root)), m_(m), n_(n) {}

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  int m() const { return m_; }
  int n() const { return n_; }
  bool empty() const { return root_ == nullptr; }

  static Expr constant(double v, int m, int n);
  static Expr variable(Side side, int index, int m, int n);

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  NodePtr root_;
  int m_ = 0;
  int n_ = 0;
};

Expr parse(std::string_view source, int m, int n);

/// Canonical fully parenthesized text; parse(print(e)) == e.
std::string print(const Expr& e);
std::string print(const Node& node);

std::size_t depth(const Expr& e);

double eval_point(const Expr& e, std::span<const double> t, std::span<const double> x);
/// Point given as the concatenation (t, x).
double eval_point(const Expr& e, std::span<const double> tx);

Interval eval_interval(const Expr& e, const Box& box);

/// max over the family; a singleton is wrapped in a one-argument max node.
Expr pointwise_max(const std::vector<Expr>& es);

/// Replaces every occurrence of variable (side, index) with the given tree.
/// The result is declared over (m, n).
Expr substitute(const Expr& e, Side side, int index, const Expr& replacement, int m, int n);

}  // namespace sepenv
