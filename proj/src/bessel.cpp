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

#include "combmem/bessel.hpp"

#include <cmath>
#include <numbers>

namespace combmem {
namespace detail {

double bessel_series(int order, double x) {
  // Extended precision absorbs the cancellation between the large
  // alternating terms near the crossover.
  const long double half = 0.5L * x;
  const long double q = -half * half;
  long double term = order == 0 ? 1.0L : half;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * static_cast<long double>(k + order));
    sum += term;
    if (std::abs(term) < 1e-21L * std::abs(sum) && k > half) break;
  }
  return static_cast<double>(sum);
}

double bessel_hankel(int order, double x) {
  const double mu = 4.0 * order * order;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double previous = std::abs(term);
  for (int k = 1; k < 100; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (8.0 * k * x);
    // Asymptotic series: stop once the terms start growing again.
    if (std::abs(next) > previous) break;
    term = next;
    previous = std::abs(term);
    // k even contributes to P with sign (-1)^(k/2), k odd to Q with sign
    // (-1)^((k-1)/2).
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0)
      p += sign * term;
    else
      q += sign * term;
    if (previous < 1e-17) break;
  }
  const double chi = x - (0.5 * order + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace detail

double bessel_j0(double x) {
  x = std::abs(x);
  return x < kBesselSeriesLimit ? detail::bessel_series(0, x)
                                : detail::bessel_hankel(0, x);
}

double bessel_j1(double x) {
  const double sign = x < 0.0 ? -1.0 : 1.0;
  x = std::abs(x);
  return sign * (x < kBesselSeriesLimit ? detail::bessel_series(1, x)
                                        : detail::bessel_hankel(1, x));
}

}  // namespace combmem
