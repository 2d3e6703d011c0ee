// Copyright 2026 The opspace authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opspace/clebsch_gordan.hpp"
#include "oracle.hpp"

using namespace opspace;
using exact::Rational;

TEST_CASE("stretched coefficient is +1 by convention") {
  CHECK(clebsch_gordan_value(1, 1, 1, 1, 2, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(clebsch_gordan_value(4, 4, 6, 6, 10, 10) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("frozen low-spin values") {
  // <1/2 1/2; 1/2 -1/2 | 1 0> = 1/sqrt(2), from the lowering-operator oracle.
  CHECK(clebsch_gordan_value(1, 1, 1, -1, 2, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  // <1 1; 1 -1 | 0 0> = 1/sqrt(3), from orthonormality + recursion.
  CHECK(clebsch_gordan_value(2, 2, 2, -2, 0, 0) == doctest::Approx(1.0 / std::sqrt(3.0)));
  // Singlet of two spin-1/2: <1/2 1/2; 1/2 -1/2 | 0 0> = +1/sqrt(2).
  CHECK(clebsch_gordan_value(1, 1, 1, -1, 0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(clebsch_gordan_value(1, -1, 1, 1, 0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("selection rules give exact zero") {
  CHECK(clebsch_gordan(CgKey{2, 2, 2, 0, 0, 0}).is_zero());   // Q != m1+m2
  CHECK(clebsch_gordan(CgKey{2, 0, 2, 0, 6, 0}).is_zero());   // K > j1+j2
  CHECK(clebsch_gordan(CgKey{2, 0, 6, 0, 0, 0}).is_zero());   // K < |j1-j2|
  CHECK(clebsch_gordan_value(2, 2, 2, 0, 0, 0) == 0.0);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(clebsch_gordan(CgKey{2, 1, 2, 0, 2, 1}), std::invalid_argument);  // m1 parity
  CHECK_THROWS_AS(clebsch_gordan(CgKey{2, 4, 2, 0, 2, 2}), std::invalid_argument);  // |m1| > j1
  CHECK_THROWS_AS(clebsch_gordan(CgKey{2, 0, 2, 0, 4, 6}), std::invalid_argument);  // |Q| > K
  CHECK_THROWS_AS(clebsch_gordan(CgKey{1, 1, 2, 0, 2, 1}), std::invalid_argument);  // Q parity vs K
  CHECK_THROWS_AS(clebsch_gordan(CgKey{-2, 0, 2, 0, 2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(clebsch_gordan(0.3, 0.0, 1.0, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("full tables match the ladder-recursion oracle") {
  // Mixed integer and half-integer spins, including unequal pairs.
  const std::vector<std::pair<int, int>> pairs = {{1, 1}, {2, 2}, {3, 3}, {4, 4}, {6, 6},
                                                  {1, 2}, {2, 4}, {3, 5}, {12, 12}};
  for (auto [two_j1, two_j2] : pairs) {
    CAPTURE(two_j1);
    CAPTURE(two_j2);
    const oracle::CgTable table = oracle::cg_table(two_j1, two_j2);
    for (int two_m1 = -two_j1; two_m1 <= two_j1; two_m1 += 2)
      for (int two_m2 = -two_j2; two_m2 <= two_j2; two_m2 += 2)
        for (int two_k = std::abs(two_j1 - two_j2); two_k <= two_j1 + two_j2; two_k += 2) {
          const int two_m = two_m1 + two_m2;
          if (std::abs(two_m) > two_k) continue;
          const double expected = table(two_m1, two_m2, two_k, two_m);
          const double got = clebsch_gordan_value(two_j1, two_m1, two_j2, two_m2, two_k, two_m);
          // absolute tolerance: the recursion oracle itself works in doubles
          CHECK(std::abs(got - expected) < 1e-11);
        }
  }
}

TEST_CASE("orthogonality holds exactly in rational arithmetic") {
  // sum_{m1+m2=Q} <j m1; j m2|K Q><j m1; j m2|K' Q>
  //   = sqrt(f_K f_K') * sum_m g(m) s_K(m) s_K'(m),
  // so the bracketed rational sum must be exactly delta_{KK'} / f_K.
  for (int two_j : {3, 4}) {
    for (int two_q = -2 * two_j; two_q <= 2 * two_j; two_q += 2) {
      for (int two_k = std::abs(two_q); two_k <= 2 * two_j; two_k += 2) {
        for (int two_kp = two_k; two_kp <= 2 * two_j; two_kp += 2) {
          Rational bracket = 0;
          Rational f_k = 0;
          bool any = false;
          for (int two_m1 = -two_j; two_m1 <= two_j; two_m1 += 2) {
            const int two_m2 = two_q - two_m1;
            if (std::abs(two_m2) > two_j) continue;
            const CgValue a = clebsch_gordan(CgKey{two_j, two_m1, two_j, two_m2, two_k, two_q});
            const CgValue b = clebsch_gordan(CgKey{two_j, two_m1, two_j, two_m2, two_kp, two_q});
            if (!any && !a.is_zero()) {
              f_k = a.rank_radicand;
              any = true;
            }
            bracket += a.weight_radicand * a.racah_sum * b.racah_sum;
          }
          REQUIRE(any);
          if (two_k == two_kp) {
            CHECK(bracket * f_k == Rational(1));
          } else {
            CHECK(bracket == Rational(0));
          }
        }
      }
    }
  }
}

TEST_CASE("float value is consistent with the exact signed square") {
  for (int two_m1 = -3; two_m1 <= 3; two_m1 += 2)
    for (int two_m2 = -3; two_m2 <= 3; two_m2 += 2)
      for (int two_k = 0; two_k <= 6; two_k += 2) {
        const int two_q = two_m1 + two_m2;
        if (std::abs(two_q) > two_k) continue;
        const CgValue v = clebsch_gordan(CgKey{3, two_m1, 3, two_m2, two_k, two_q});
        const Rational sq = v.signed_square();
        const double expect =
            (sq.sign() < 0 ? -1.0 : 1.0) * std::sqrt(std::abs(sq.to_double()));
        CHECK(v.value == doctest::Approx(expect).epsilon(1e-15));
      }
}
