// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "doctest.h"
#include "sepenv/rng.hpp"
#include "sepenv/shellmax.hpp"
#include "support/oracles.hpp"
#include "support/random_expr.hpp"

using namespace sepenv;

namespace {

Box square(double lo, double hi) { return Box({{lo, hi}, {lo, hi}}, Side::Product); }

ProductExhaustion unit_pex() { return ProductExhaustion(Exhaustion(1), Exhaustion(1)); }

}  // namespace

TEST_CASE("clamp_nonnegative examples") {
  const std::vector<double> p23{2, 3};
  CHECK(eval_point(clamp_nonnegative(parse("-1", 1, 1)), p23) == 0.0);
  CHECK(eval_point(clamp_nonnegative(parse("t1*x1", 1, 1)), p23) == 6.0);
  const std::vector<double> q{-std::numbers::pi / 2, 0};
  CHECK(eval_point(clamp_nonnegative(parse("sin(t1)", 1, 1)), q) == 0.0);
}

TEST_CASE("certified_max examples") {
  const IntervalBackend bb{1e-6, 100000};
  auto r = certified_max(parse("t1*t1 + x1*x1", 1, 1), square(-2, 2), bb);
  CHECK(r.upper >= 8.0);
  CHECK(r.upper <= 8.0 + 1e-6);
  CHECK(r.lower <= 8.0);
  CHECK(r.certified);

  r = certified_max(parse("exp(t1*x1)", 1, 1), square(-1, 1), bb);
  CHECK(r.upper >= std::numbers::e);
  CHECK(r.upper <= std::numbers::e + 1e-6);

  r = certified_max(parse("sin(t1)+cos(x1)", 1, 1), Box({{0, 4}, {-4, 4}}, Side::Product), bb);
  CHECK(r.upper >= 2.0);
  CHECK(r.upper <= 2.0 + 1e-6);

  CHECK_THROWS_AS(certified_max(parse("1/x1", 1, 1), square(-1, 1), bb), DomainAmbiguity);
  CHECK_THROWS_AS(certified_max(parse("t1", 1, 1), Box({{0, 1}}, Side::M), bb), DimensionMismatch);
  CHECK_THROWS(certified_max(parse("t1", 1, 1), square(0, 1), IntervalBackend{0.0, 10}));
}

TEST_CASE("budget exhaustion is reported, not raised") {
  const auto r = certified_max(parse("sin(10*t1)*cos(10*x1)", 1, 1), square(-5, 5), IntervalBackend{1e-12, 20});
  CHECK(r.exhausted);
  CHECK(r.certified);
  CHECK(r.subdivisions == 20);
  CHECK(r.upper >= 1.0 - 1e-9);
}

TEST_CASE("soundness and tightness against the dense-grid oracle") {
  Rng rng(2024);
  int exhausted = 0;
  for (int c = 0; c < 50; ++c) {
    const int m = 1, n = static_cast<int>(rng.index(2));
    const Expr e = parse(testing::random_expr(rng, m, n, 3), m, n);
    std::vector<Interval> dims;
    for (int k = 0; k < m + n; ++k) {
      const double a = rng.uniform(-3, 3), w = rng.uniform(0.1, 2);
      dims.push_back({a, a + w});
    }
    const Box box(dims, Side::Product);
    const double oracle = testing::grid_max(e, box, 200);
    const auto r = certified_max(e, box, IntervalBackend{1e-6, 100000});
    INFO(print(e));
    CHECK(r.upper >= oracle);
    CHECK(r.lower <= r.upper);
    if (r.exhausted)
      ++exhausted;
    else
      CHECK(r.upper - oracle <= 1e-3);
  }
  MESSAGE("exhausted: " << exhausted);
}

TEST_CASE("lipschitz backend") {
  const Expr e = parse("3*t1 + x1", 1, 1);
  const Box box = square(0, 1);
  const auto given = certified_max(e, box, LipschitzBackend{64, 4.0, 256});
  CHECK(given.certified);
  CHECK(given.upper >= 4.0);
  CHECK(given.lower == doctest::Approx(4.0));
  const auto est = certified_max(e, box, LipschitzBackend{64, std::nullopt, 256});
  CHECK_FALSE(est.certified);
  CHECK(est.upper >= 4.0);
  CHECK_THROWS(certified_max(e, box, LipschitzBackend{1, 1.0, 256}));
  CHECK_THROWS(certified_max(e, box, LipschitzBackend{8, -1.0, 256}));
}

TEST_CASE("estimate_lipschitz examples") {
  CHECK(estimate_lipschitz(parse("t1", 1, 1), square(-3, 5), 256) >= 1.0);
  CHECK(estimate_lipschitz(parse("0", 1, 1), square(-3, 5), 256) == 0.0);
  CHECK(estimate_lipschitz(parse("3*t1 + x1", 1, 1), square(0, 1), 256) >= 3.0);
  CHECK(estimate_lipschitz(parse("t1", 1, 1), Box({{1, 1}, {0, 1}}, Side::Product), 256) == 0.0);
  CHECK_THROWS(estimate_lipschitz(parse("t1", 1, 1), square(0, 1), 1));
}

TEST_CASE("shell_max examples") {
  const IntervalBackend bb{1e-6, 100000};
  ShellMaxima zero(parse("0", 1, 1), unit_pex(), bb);
  ShellMaxima neg(parse("-5", 1, 1), unit_pex(), bb);
  for (std::size_t i = 0; i <= 5; ++i) {
    CHECK(zero.shell_max(i) == 0.0);
    CHECK(neg.shell_max(i) == 0.0);
  }
  const Expr f = parse("abs(t1)*abs(x1)", 1, 1);
  ShellMaxima sq(f, unit_pex(), bb);
  for (std::size_t i = 1; i <= 6; ++i) {
    const double oracle = testing::grid_max(f, *unit_pex().product_box(i), 201);
    CHECK(std::fabs(sq.shell_max(i) - oracle) <= 1e-3);
    CHECK(sq.shell_max(i) >= oracle);
    CHECK(sq.entry(i).certified);
  }
}

TEST_CASE("monotonization, determinism and idempotent concurrent fills") {
  const Expr f = parse("sin(3*t1)*x1 - t1*t1/10", 1, 1);
  const IntervalBackend bb{1e-6, 100000};
  ShellMaxima a(f, unit_pex(), bb);
  ShellMaxima b(f, unit_pex(), bb);
  std::vector<std::thread> pool;
  for (int k = 0; k < 4; ++k) pool.emplace_back([&, k] { (void)b.shell_max(8 - k); });
  for (auto& th : pool) th.join();
  a.precompute(8);
  const auto ta = a.table(), tb = b.table();
  REQUIRE(ta.size() == 8);
  CHECK(ta == tb);
  for (std::size_t i = 1; i < ta.size(); ++i) {
    CHECK(ta[i].value >= ta[i - 1].value);
    CHECK(ta[i].value >= ta[i].raw_upper);
  }
  CHECK(a.shell_max(3) == a.shell_max(3));
}

TEST_CASE("strict mode, positivity and frozen tables") {
  const Expr f = parse("t1*x1", 1, 1);
  ShellMaxima strict(f, unit_pex(), IntervalBackend{}, ShellOptions{false, true, 3});
  CHECK_NOTHROW(strict.shell_max(3));
  CHECK_THROWS_AS(strict.shell_max(4), StrictModeError);
  ShellMaxima tight(parse("sin(10*t1)*cos(10*x1)", 1, 1), unit_pex(), IntervalBackend{1e-12, 10},
                    ShellOptions{false, true, 64});
  CHECK_THROWS_AS(tight.shell_max(1), StrictModeError);

  ShellMaxima pos(parse("-1+t1", 1, 1), unit_pex(), IntervalBackend{}, ShellOptions{true, false, 64});
  try {
    (void)pos.shell_max(1);
    FAIL("expected a positivity error");
  } catch (const PositivityError& e) {
    CHECK(e.shell() == 1);
  }
  ShellMaxima amb(parse("1/x1", 1, 1), unit_pex(), IntervalBackend{});
  try {
    (void)amb.shell_max(2);
    FAIL("expected a shell error");
  } catch (const ShellError& e) {
    CHECK(e.shell() == 1);
  }

  std::vector<ShellEntry> table(2);
  table[0].value = 1.0;
  table[1].value = 0.5;  // deliberately non-monotone, used as given
  const auto frozen = ShellMaxima::from_table(f, unit_pex(), table);
  CHECK(frozen.frozen());
  CHECK(frozen.shell_max(1) == 1.0);
  CHECK(frozen.shell_max(2) == 0.5);
  CHECK(frozen.entry(2).index == 2);
  CHECK_THROWS_AS(frozen.shell_max(3), StrictModeError);
}
