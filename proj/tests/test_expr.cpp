// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sepenv/expr.hpp"
#include "sepenv/rng.hpp"
#include "support/random_expr.hpp"

using namespace sepenv;

namespace {
double at(const Expr& e, std::vector<double> t, std::vector<double> x) { return eval_point(e, t, x); }

Box box2(double a, double b, double c, double d) { return Box({{a, b}, {c, d}}); }
}  // namespace

TEST_CASE("parse builds the expected trees") {
  const Expr e = parse("t1*x1", 1, 1);
  CHECK(e.root().kind == NodeKind::Binary);
  CHECK(e.root().binary == BinaryOp::Mul);
  CHECK(e.root().children[0]->kind == NodeKind::Variable);
  CHECK(e.root().children[0]->side == Side::M);
  CHECK(e.root().children[1]->side == Side::N);

  const Expr f = parse("max(sin(t1), cos(x1)) + 2", 1, 1);
  CHECK(f.root().binary == BinaryOp::Add);
  CHECK(f.root().children[0]->kind == NodeKind::Max);
  CHECK(f.root().children[0]->children.size() == 2);
  CHECK(depth(f) == 3);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse("t2", 1, 1), ParseError);
  CHECK_THROWS_AS(parse("t0", 1, 1), ParseError);
  CHECK_THROWS_AS(parse("y1", 1, 1), ParseError);
  CHECK_THROWS_AS(parse("sin(t1, x1)", 1, 1), ParseError);
  CHECK_THROWS_AS(parse("t1 +", 1, 1), ParseError);
  CHECK_THROWS_AS(parse("t1 x1", 1, 1), ParseError);
  CHECK_THROWS_AS(parse("2^t1", 1, 1), ParseError);
  CHECK_THROWS_AS(parse("sin t1", 1, 1), ParseError);

  try {
    parse("t1 * (x1 + )", 1, 1);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.offset() == 11);
  }
}

TEST_CASE("aliases, constants and precedence") {
  CHECK(at(parse("t*x", 1, 1), {2}, {3}) == 6.0);
  CHECK_THROWS_AS(parse("t", 2, 1), ParseError);
  CHECK(at(parse("pi", 0, 0), {}, {}) == std::numbers::pi);
  CHECK(at(parse("e", 0, 0), {}, {}) == std::numbers::e);
  // "^" binds tighter than unary minus.
  CHECK(at(parse("-2^2", 0, 0), {}, {}) == -4.0);
  CHECK(at(parse("(-2)^2", 0, 0), {}, {}) == 4.0);
  CHECK(at(parse("2^(1+1)", 0, 0), {}, {}) == 4.0);
  CHECK(at(parse("1 - 2 - 3", 0, 0), {}, {}) == -4.0);
  CHECK(at(parse("8 / 2 / 2", 0, 0), {}, {}) == 2.0);
  CHECK(at(parse("1.5e2 + .5", 0, 0), {}, {}) == 150.5);
  CHECK(at(parse(" min( 3 , 1 , 2 ) ", 0, 0), {}, {}) == 1.0);
}

TEST_CASE("eval_point examples") {
  CHECK(at(parse("t1*x1", 1, 1), {2}, {3}) == 6.0);
  CHECK(at(parse("exp(t1+x1)", 1, 1), {0}, {0}) == 1.0);
  CHECK_THROWS_AS(at(parse("1/ (t1 - x1)", 1, 1), {1}, {1}), DomainError);
  CHECK_THROWS_AS(at(parse("log(t1)", 1, 0), {0}, {}), DomainError);
  CHECK_THROWS_AS(at(parse("sqrt(t1)", 1, 0), {-1}, {}), DomainError);
  CHECK_THROWS_AS(at(parse("t1^0.5", 1, 0), {-1}, {}), DomainError);
  CHECK_THROWS_AS(at(parse("t1^(-1)", 1, 0), {0}, {}), DomainError);
  CHECK(at(parse("t1^3", 1, 0), {-2}, {}) == -8.0);
  CHECK_THROWS_AS(at(parse("t1", 1, 0), {1, 2}, {}), DimensionMismatch);

  try {
    at(parse("2 + 1/(t1 - x1)", 1, 1), {1}, {1});
  } catch (const DomainError& err) {
    CHECK(err.subexpr() == "(1 / (t1 - x1))");
  }
}

TEST_CASE("eval_interval examples") {
  const Interval sq = eval_interval(parse("t1*t1", 1, 0), Box({{-2, 2}}));
  CHECK(sq.contains(Interval{0, 4}));

  const Interval s = eval_interval(parse("sin(t1)", 1, 0), Box({{0, 10}}));
  CHECK(s.contains(Interval{-1, 1}));
  CHECK(s.lo >= -1 - 1e-15);
  CHECK(s.hi <= 1 + 1e-15);

  CHECK_THROWS_AS(eval_interval(parse("1/x1", 0, 1), Box({{-1, 1}})), DomainAmbiguity);
  CHECK_THROWS_AS(eval_interval(parse("log(t1)", 1, 0), Box({{0, 1}})), DomainAmbiguity);
  CHECK_THROWS_AS(eval_interval(parse("sqrt(t1)", 1, 0), Box({{-1, 1}})), DomainAmbiguity);
  CHECK_THROWS_AS(eval_interval(parse("t1^0.5", 1, 0), Box({{-1, 1}})), DomainAmbiguity);
  CHECK_THROWS_AS(eval_interval(parse("t1", 1, 1), Box({{-1, 1}})), DimensionMismatch);
  CHECK(eval_interval(parse("t1^2", 1, 0), Box({{-2, 2}})).lo == 0.0);
}

TEST_CASE("pointwise_max examples") {
  const Expr e = parse("sin(t1)*x1", 1, 1);
  const Expr single = pointwise_max({e});
  CHECK(single.root().kind == NodeKind::Max);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double t = rng.uniform(-3, 3), x = rng.uniform(-3, 3);
    CHECK(at(single, {t}, {x}) == at(e, {t}, {x}));
  }
  CHECK(at(pointwise_max({parse("t1", 1, 1), parse("x1", 1, 1)}), {1}, {2}) == 2.0);
  CHECK(at(pointwise_max({parse("sin(t1)", 1, 1), parse("cos(t1)", 1, 1)}), {0}, {0}) == 1.0);
  CHECK_THROWS_AS(pointwise_max({}), ExprError);
  CHECK_THROWS_AS(pointwise_max({parse("t1", 1, 1), parse("t1", 1, 2)}), DimensionMismatch);
}

TEST_CASE("print then parse is the identity on random trees") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const int m = 1 + static_cast<int>(rng.index(2)), n = 1 + static_cast<int>(rng.index(2));
    const Expr e = parse(testing::random_expr(rng, m, n, 4), m, n);
    const Expr back = parse(print(e), m, n);
    REQUIRE_MESSAGE(back == e, print(e));
  }
  // Negative literals and constructed negative constants survive the trip.
  const Expr neg = Expr::constant(-2.5, 1, 1);
  CHECK(parse(print(neg), 1, 1) == neg);
  const Expr negzero = parse("-0", 0, 0);
  CHECK(parse(print(negzero), 0, 0) == negzero);
}

TEST_CASE("enclosures contain point values (soundness, 10^4 triples)") {
  Rng rng(2024);
  for (int i = 0; i < 10000; ++i) {
    const int m = 1 + static_cast<int>(rng.index(2)), n = 1 + static_cast<int>(rng.index(2));
    const Expr e = parse(testing::random_expr(rng, m, n, 4), m, n);
    std::vector<Interval> dims;
    std::vector<double> p;
    for (int k = 0; k < m + n; ++k) {
      const double lo = rng.uniform(-3, 3), w = rng.coin(0.1) ? 0.0 : rng.uniform(0, 2);
      dims.push_back({lo, lo + w});
      p.push_back(rng.uniform(lo, lo + w));
    }
    const Interval r = eval_interval(e, Box(dims));
    const double v = eval_point(e, p);
    REQUIRE_MESSAGE(r.contains(v), print(e) << " value " << v << " enclosure " << to_string(r));
  }
}

TEST_CASE("enclosure over a box covers sampled values of any sub-box") {
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    const Expr e = parse(testing::random_expr(rng, 1, 1, 3), 1, 1);
    const Box outer = box2(-2, 2, -1, 3);
    const Interval big = eval_interval(e, outer);
    const double a = rng.uniform(-2, 1), c = rng.uniform(-1, 2);
    const Box inner = box2(a, a + rng.uniform(0, 2 - a), c, c + rng.uniform(0, 3 - c));
    for (int s = 0; s < 20; ++s) {
      const double t = rng.uniform(inner[0].lo, inner[0].hi), x = rng.uniform(inner[1].lo, inner[1].hi);
      REQUIRE(big.contains(eval_point(e, std::vector<double>{t, x})));
    }
  }
}

TEST_CASE("substitute composes expressions") {
  const Expr rho = parse("exp(-t1*t1/2)", 1, 1);
  const Expr shifted = substitute(rho, Side::M, 1, parse("t1 - x1", 1, 1), 1, 1);
  CHECK(at(shifted, {3}, {3}) == 1.0);
  CHECK(at(shifted, {1}, {0}) == std::exp(-0.5));
}
