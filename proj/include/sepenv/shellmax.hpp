// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sepenv/expr.hpp"
#include "sepenv/geometry.hpp"

namespace sepenv {

/// Best-first interval branch and bound.
struct IntervalBackend {
  double tol = 1e-6;
  std::size_t max_subdiv = 100000;
  friend bool operator==(const IntervalBackend&, const IntervalBackend&) = default;
};

/// Dense grid plus a Lipschitz correction. Certified only when the constant
/// is supplied; otherwise it is estimated and the result is heuristic.
struct LipschitzBackend {
  std::size_t grid = 64;
  std::optional<double> lipschitz;
  std::size_t estimate_samples = 256;
  friend bool operator==(const LipschitzBackend&, const LipschitzBackend&) = default;
};

using MaxBackend = std::variant<IntervalBackend, LipschitzBackend>;

struct MaxResult {
  double upper = 0.0;
  double lower = 0.0;
  bool certified = false;
  bool exhausted = false;  // subdivision budget ran out before tol was met
  std::size_t subdivisions = 0;
};

/// max(e, 0) as an expression.
Expr clamp_nonnegative(const Expr& e);

/// lower <= max over the box <= upper (the upper side holds for the floating
/// point values eval_point returns, not only for the real function).
MaxResult certified_max(const Expr& e, const Box& box, const MaxBackend& backend);

/// Largest sampled |f(p) - f(q)| / |p - q|_inf, doubled. Zero for boxes of
/// zero volume. Deterministic.
double estimate_lipschitz(const Expr& e, const Box& box, std::size_t samples);

/// A failure tied to one shell of the exhaustion.
class ShellError : public std::runtime_error {
 public:
  ShellError(std::size_t shell, const std::string& what)
      : std::runtime_error("shell " + std::to_string(shell) + ": " + what), shell_(shell) {}
  std::size_t shell() const { return shell_; }

 private:
  std::size_t shell_;
};

/// The function is not certified positive on the named shell.
class PositivityError : public ShellError {
 public:
  using ShellError::ShellError;
};

/// Strict mode refused to compute past the configured ceiling, or a shell
/// exhausted its budget.
class StrictModeError : public ShellError {
 public:
  using ShellError::ShellError;
};

struct ShellEntry {
  std::size_t index = 0;
  double value = 0.0;      // A_i after monotonization
  double raw_upper = 0.0;  // backend upper bound on K_i x L_i
  double lower = 0.0;
  bool certified = false;
  bool exhausted = false;
  friend bool operator==(const ShellEntry&, const ShellEntry&) = default;
};

struct ShellOptions {
  /// Require eval_interval(f, K_i x L_i).lo > 0 before computing shell i.
  bool require_positive = false;
  bool strict = false;
  /// In strict mode, the largest shell that may be computed.
  std::size_t ceiling = 64;
};

/// Lazily computed, memoized upper bounds A_i >= max over K_i x L_i of
/// max(f, 0), monotonized by a running max with A_0 = 0. Safe for
/// concurrent use; refills are idempotent.
class ShellMaxima {
 public:
  ShellMaxima(Expr f, ProductExhaustion pex, MaxBackend backend, ShellOptions options = {});
  ShellMaxima(ShellMaxima&& other) noexcept;
  ShellMaxima& operator=(ShellMaxima&&) = delete;

  /// Frozen table (e.g. from a descriptor): no backend, shells past the end
  /// raise StrictModeError. Entries are used as given, unsorted tables included.
  static ShellMaxima from_table(Expr f, ProductExhaustion pex, std::vector<ShellEntry> table,
                                MaxBackend backend = IntervalBackend{});

  double shell_max(std::size_t i) const;
  ShellEntry entry(std::size_t i) const;
  void precompute(std::size_t i_max) const;
  std::vector<ShellEntry> table() const;

  const Expr& function() const { return f_; }
  const Expr& clamped() const { return clamped_; }
  const ProductExhaustion& exhaustion() const { return pex_; }
  const MaxBackend& backend() const { return backend_; }
  const ShellOptions& options() const { return options_; }
  bool frozen() const { return frozen_; }

 private:
  ShellEntry compute_raw(std::size_t i) const;

  Expr f_;
  Expr clamped_;
  ProductExhaustion pex_;
  MaxBackend backend_;
  ShellOptions options_;
  bool frozen_ = false;

  mutable std::mutex mutex_;
  mutable std::vector<ShellEntry> table_;  // table_[i-1] is shell i
};

}  // namespace sepenv
