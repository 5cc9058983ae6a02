// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sepenv/pou.hpp"
#include "sepenv/rng.hpp"
#include "support/oracles.hpp"

using namespace sepenv;

TEST_CASE("profile examples") {
  const auto p1 = SmoothstepProfile::polynomial(1);
  CHECK(p1(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p1(0.25) == doctest::Approx(0.15625).epsilon(1e-15));
  CHECK(SmoothstepProfile::exponential()(0.5) == 0.5);
  CHECK_THROWS(SmoothstepProfile::polynomial(0));
  CHECK(make_profile(SmoothstepProfile::Kind::Exponential) == SmoothstepProfile::exponential());
}

TEST_CASE("polynomial profiles match the Hermite solve") {
  for (int k = 1; k <= 6; ++k) {
    const auto coef = testing::hermite_step_coefficients(k);
    const auto s = SmoothstepProfile::polynomial(k);
    for (int j = 0; j <= 100; ++j) {
      const double u = j / 100.0;
      // Absolute: the monomial basis loses relative accuracy near u = 0.
      CHECK(std::fabs(s(u) - testing::polyval(coef, u)) <= 1e-9);
    }
  }
  // Hermite oracle alone for the documented value.
  CHECK(testing::polyval(testing::hermite_step_coefficients(1), 0.25) == doctest::Approx(0.15625).epsilon(1e-14));
}

TEST_CASE("profiles are monotone and clamp") {
  for (auto s : {SmoothstepProfile::polynomial(1), SmoothstepProfile::polynomial(3), SmoothstepProfile::polynomial(12),
                 SmoothstepProfile::exponential()}) {
    CHECK(s(-1.0) == 0.0);
    CHECK(s(0.0) == 0.0);
    CHECK(s(1.0) == 1.0);
    CHECK(s(2.0) == 1.0);
    double prev = 0.0;
    for (int j = 1; j <= 10000; ++j) {
      const double v = s(j / 10000.0);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("phi and active_indices examples") {
  PartitionOfUnity pou(Exhaustion(1), SmoothstepProfile::polynomial(3), 0.1);
  std::vector<double> zero{0.0};
  CHECK(pou.phi(1, zero) == 1.0);
  CHECK(pou.phi(3, zero) == 0.0);
  CHECK(pou.active_indices(zero) == ActiveRange{1, 1});

  std::vector<double> p{1.5};
  CHECK(pou.phi(1, p) == 0.0);
  // Direct evaluation of the cutoffs: g_2 follows the profile on [1, 1.9].
  const double g2 = 1.0 - SmoothstepProfile::polynomial(3)((1.5 - 1.0) / 0.9);
  CHECK(pou.phi(2, p) == doctest::Approx(g2));
  CHECK(pou.phi(2, p) + pou.phi(3, p) == doctest::Approx(1.0).epsilon(1e-15));
  const auto r = pou.active_indices(p);
  CHECK(r.first >= 2);
  CHECK(r.last <= 3);

  std::vector<double> plateau{0.5};
  CHECK(pou.active_indices(plateau) == ActiveRange{1, 2});  // r_0 = 0: shell 1 has no plateau
  std::vector<double> near{0.95};  // inside shell 1's transition zone end
  CHECK(pou.active_indices(near) == ActiveRange{2, 2});
}

TEST_CASE("partition, subordination and vanishing on random points") {
  Rng rng(5);
  for (auto lift : {Lift::Linf, Lift::L2}) {
    for (auto prof : {SmoothstepProfile::polynomial(1), SmoothstepProfile::exponential()}) {
      PartitionOfUnity pou(Exhaustion(2), prof, 0.1, lift);
      const auto& ex = pou.exhaustion();
      for (int s = 0; s < 20000; ++s) {
        std::vector<double> p{rng.uniform(-20, 20), rng.uniform(-20, 20)};
        const std::size_t m = ex.shell_index(p);
        double sum = 0.0;
        for (std::size_t i = 1; i <= 35; ++i) {
          const double v = pou.phi(i, p);
          CHECK(v >= 0.0);
          sum += v;
          if (i < m) CHECK(v == 0.0);
          if (v > 0.0) {
            const double gap = 0.1 * (ex.radius(i) - ex.radius(i - 1)) / 2.0;
            CHECK(linf_norm(p) < ex.radius(i) - gap);
          }
        }
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
        const auto w = pou.weights(p);
        CHECK(pou.phi(w.first, p) == doctest::Approx(1.0 - w.next_weight));
      }
    }
  }
}

TEST_CASE("invalid margin") {
  CHECK_THROWS(PartitionOfUnity(Exhaustion(1), SmoothstepProfile::exponential(), 0.0));
  CHECK_THROWS(PartitionOfUnity(Exhaustion(1), SmoothstepProfile::exponential(), 1.0));
}
