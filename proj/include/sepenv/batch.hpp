// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sepenv/expr.hpp"
#include "sepenv/simd/kernels.hpp"

namespace sepenv {

/// Structure-of-arrays point set: cols[k][j] is coordinate k of point j.
struct PointColumns {
  std::vector<std::vector<double>> cols;

  PointColumns() = default;
  PointColumns(std::size_t dim, std::size_t count) : cols(dim, std::vector<double>(count)) {}

  std::size_t dim() const { return cols.size(); }
  std::size_t count() const { return cols.empty() ? 0 : cols[0].size(); }
  std::vector<double> point(std::size_t j) const;
};

/// Expression flattened into a straight-line program for evaluating many
/// points at once. Results are bitwise identical to eval_point, including
/// which inputs raise DomainError.
class Tape {
 public:
  explicit Tape(const Expr& e);

  std::size_t dim() const { return dim_; }

  void eval(const PointColumns& pts, std::span<double> out) const;
  void eval(const PointColumns& pts, std::span<double> out, const simd::KernelTable& kernels) const;
  std::vector<double> eval(const PointColumns& pts) const;

 private:
  enum class Op { Const, Var, Neg, Abs, Exp, Log, Sqrt, Sin, Cos, Add, Sub, Mul, Div, Pow, Max, Min };
  struct Instr {
    Op op;
    int a = -1;
    int b = -1;
    int column = 0;
    double value = 0.0;
    const Node* source = nullptr;  // for error messages
  };

  int emit(const Node& n);
  void run_chunk(const PointColumns& pts, std::size_t begin, std::size_t len, double* out,
                 const simd::KernelTable& k, std::vector<double>& scratch) const;

  std::vector<Instr> code_;
  std::size_t dim_ = 0;
  int m_ = 0;
  Expr expr_;
};

}  // namespace sepenv
