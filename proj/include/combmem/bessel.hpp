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

#pragma once

namespace combmem {

/// Bessel functions of the first kind for real x >= 0 (negative x uses the
/// parity J_n(-x) = (-1)^n J_n(x)).
///
/// Power series below x = 12, Hankel asymptotic expansion (truncated at
/// its smallest term) from 12 upward. Absolute error <= 1e-12 for x <= 50.
double bessel_j0(double x);
double bessel_j1(double x);

/// Crossover between the two evaluation branches.
inline constexpr double kBesselSeriesLimit = 12.0;

namespace detail {
double bessel_series(int order, double x);
double bessel_hankel(int order, double x);
}  // namespace detail

}  // namespace combmem
