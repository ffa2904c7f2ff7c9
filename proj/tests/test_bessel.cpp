// Copyright 2026 The combmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "combmem/bessel.hpp"

using namespace combmem;

namespace {

// Independent long-double series sum_k (-x^2/4)^k / (k!)^2, 30 terms.
long double series_j0(long double x) {
  long double term = 1.0L, sum = 1.0L;
  const long double q = -x * x / 4.0L;
  for (int k = 1; k < 30; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("J0 at the origin and small arguments") {
  CHECK(bessel_j0(0.0) == 1.0);
  CHECK(bessel_j1(0.0) == 0.0);
  CHECK(bessel_j0(1e-9) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("J0(1) against an exact-rational partial sum") {
  // sum_{k<30} (-1/4)^k / (k!)^2 in exact arithmetic, rounded to 18 digits.
  const double exact = 0.765197686557966551;
  CHECK(std::abs(bessel_j0(1.0) - exact) < 1e-15);
  CHECK(std::abs(static_cast<double>(series_j0(1.0L)) - exact) < 1e-15);
}

TEST_CASE("first zero of J0 by bisection on the series") {
  long double lo = 2.0L, hi = 3.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (series_j0(mid) > 0 ? lo : hi) = mid;
  }
  const double root = static_cast<double>(lo);
  CHECK(root == doctest::Approx(2.404825557695773).epsilon(1e-14));
  CHECK(std::abs(bessel_j0(root)) < 1e-14);
  CHECK(std::abs(bessel_j0(2.404826)) < 1e-6);
}

TEST_CASE("agreement with Boost.Math on [0, 50]") {
  double worst0 = 0.0, worst1 = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double x = 50.0 * i / 20000.0;
    worst0 = std::max(worst0, std::abs(bessel_j0(x) - boost::math::cyl_bessel_j(0, x)));
    worst1 = std::max(worst1, std::abs(bessel_j1(x) - boost::math::cyl_bessel_j(1, x)));
  }
  CHECK(worst0 <= 1e-12);
  CHECK(worst1 <= 1e-12);
}

TEST_CASE("branches agree at the crossover") {
  for (int order : {0, 1}) {
    for (double x : {kBesselSeriesLimit - 1e-9, kBesselSeriesLimit, kBesselSeriesLimit + 1e-9}) {
      CHECK(std::abs(detail::bessel_series(order, x) - detail::bessel_hankel(order, x)) <= 1e-12);
    }
  }
}

TEST_CASE("parity for negative arguments") {
  for (double x : {0.3, 4.0, 17.5}) {
    CHECK(bessel_j0(-x) == bessel_j0(x));
    CHECK(bessel_j1(-x) == -bessel_j1(x));
  }
}
