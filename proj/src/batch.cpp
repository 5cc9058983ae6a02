// SPDX-License-Identifier: Apache-2.0
#include "sepenv/batch.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace sepenv {
namespace {
constexpr std::size_t kChunk = 512;

bool is_integer_exponent(double p) { return p == std::floor(p) && std::fabs(p) <= 2147483647.0; }
}  // namespace

std::vector<double> PointColumns::point(std::size_t j) const {
  std::vector<double> p(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) p[k] = cols[k][j];
  return p;
}

Tape::Tape(const Expr& e) : dim_(static_cast<std::size_t>(e.m() + e.n())), m_(e.m()), expr_(e) { emit(e.root()); }

int Tape::emit(const Node& n) {
  Instr ins{};
  ins.source = &n;
  switch (n.kind) {
    case NodeKind::Constant:
      ins.op = Op::Const;
      ins.value = n.value;
      break;
    case NodeKind::Variable:
      ins.op = Op::Var;
      ins.column = n.side == Side::M ? n.index - 1 : m_ + n.index - 1;
      break;
    case NodeKind::Unary: {
      static constexpr Op map[] = {Op::Neg, Op::Abs, Op::Exp, Op::Log, Op::Sqrt, Op::Sin, Op::Cos};
      ins.a = emit(*n.children[0]);
      ins.op = map[static_cast<int>(n.unary)];
      break;
    }
    case NodeKind::Binary: {
      static constexpr Op map[] = {Op::Add, Op::Sub, Op::Mul, Op::Div};
      ins.a = emit(*n.children[0]);
      ins.b = emit(*n.children[1]);
      ins.op = map[static_cast<int>(n.binary)];
      break;
    }
    case NodeKind::Pow:
      ins.a = emit(*n.children[0]);
      ins.op = Op::Pow;
      ins.value = n.value;
      break;
    case NodeKind::Max:
    case NodeKind::Min: {
      // Left fold, same association as eval_point.
      int acc = emit(*n.children[0]);
      for (std::size_t i = 1; i < n.children.size(); ++i) {
        Instr step{};
        step.source = &n;
        step.op = n.kind == NodeKind::Max ? Op::Max : Op::Min;
        step.a = acc;
        step.b = emit(*n.children[i]);
        code_.push_back(step);
        acc = static_cast<int>(code_.size()) - 1;
      }
      return acc;
    }
  }
  code_.push_back(ins);
  return static_cast<int>(code_.size()) - 1;
}

void Tape::run_chunk(const PointColumns& pts, std::size_t begin, std::size_t len, double* out,
                     const simd::KernelTable& k, std::vector<double>& scratch) const {
  auto reg = [&](int r) { return scratch.data() + static_cast<std::size_t>(r) * kChunk; };
  for (std::size_t pc = 0; pc < code_.size(); ++pc) {
    const Instr& ins = code_[pc];
    double* dst = reg(static_cast<int>(pc));
    const double* a = ins.a >= 0 ? reg(ins.a) : nullptr;
    const double* b = ins.b >= 0 ? reg(ins.b) : nullptr;
    switch (ins.op) {
      case Op::Const: std::fill_n(dst, len, ins.value); break;
      case Op::Var: std::memcpy(dst, pts.cols[static_cast<std::size_t>(ins.column)].data() + begin, len * sizeof(double)); break;
      case Op::Neg: k.neg(a, dst, len); break;
      case Op::Abs: k.abs(a, dst, len); break;
      case Op::Sqrt:
        if (k.any_negative(a, len)) throw DomainError("sqrt of negative value", print(*ins.source));
        k.sqrt(a, dst, len);
        break;
      case Op::Log:
        if (k.any_nonpositive(a, len)) throw DomainError("log of nonpositive value", print(*ins.source));
        for (std::size_t i = 0; i < len; ++i) dst[i] = std::log(a[i]);
        break;
      case Op::Exp:
        for (std::size_t i = 0; i < len; ++i) dst[i] = std::exp(a[i]);
        break;
      case Op::Sin:
        for (std::size_t i = 0; i < len; ++i) dst[i] = std::sin(a[i]);
        break;
      case Op::Cos:
        for (std::size_t i = 0; i < len; ++i) dst[i] = std::cos(a[i]);
        break;
      case Op::Add: k.add(a, b, dst, len); break;
      case Op::Sub: k.sub(a, b, dst, len); break;
      case Op::Mul: k.mul(a, b, dst, len); break;
      case Op::Div:
        if (k.any_zero(b, len)) throw DomainError("division by zero", print(*ins.source));
        k.div(a, b, dst, len);
        break;
      case Op::Max: k.max(a, b, dst, len); break;
      case Op::Min: k.min(a, b, dst, len); break;
      case Op::Pow: {
        const double p = ins.value;
        const bool integral = is_integer_exponent(p);
        for (std::size_t i = 0; i < len; ++i) {
          const double base = a[i];
          if ((p < 0.0 && base == 0.0)) throw DomainError("negative power of zero", print(*ins.source));
          if (!integral && base < 0.0) throw DomainError("real power of negative value", print(*ins.source));
          dst[i] = std::pow(base, p);
        }
        break;
      }
    }
  }
  std::memcpy(out, reg(static_cast<int>(code_.size()) - 1), len * sizeof(double));
}

void Tape::eval(const PointColumns& pts, std::span<double> out, const simd::KernelTable& kernels) const {
  if (pts.dim() != dim_) throw DimensionMismatch("point columns do not match the expression dimension");
  const std::size_t count = dim_ == 0 ? out.size() : pts.count();
  if (out.size() != count) throw DimensionMismatch("output span does not match the point count");
  std::vector<double> scratch(code_.size() * kChunk);
  for (std::size_t begin = 0; begin < count; begin += kChunk) {
    const std::size_t len = std::min(kChunk, count - begin);
    run_chunk(pts, begin, len, out.data() + begin, kernels, scratch);
  }
}

void Tape::eval(const PointColumns& pts, std::span<double> out) const { eval(pts, out, simd::active_kernels()); }

std::vector<double> Tape::eval(const PointColumns& pts) const {
  std::vector<double> out(pts.count());
  eval(pts, out);
  return out;
}

}  // namespace sepenv
