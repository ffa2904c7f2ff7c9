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

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "combmem/comb_modes.hpp"
#include "combmem/gaussian.hpp"

namespace combmem {

/// Named synthetic input states, each expressed over the first
/// mode_count() Hermite-Gauss supermodes.
///   "epr":              two -6 dB modes (theta = 0, pi/2) mixed on a 50:50 split
///   "cluster-linear-4": four -6 dB p-squeezed modes joined by CZ gates along a line
/// Throws ConfigError for any other name.
CovarianceMatrix preset_state(const std::string& name);

/// Linear-chain CZ network applied to p-squeezed vacua (x_k unchanged,
/// p_j += sum_k A_jk x_k). Throws NotPureError if the result is not pure.
CovarianceMatrix linear_cluster(int mode_count, double squeezing_db);

/// Orthonormalized Hermite-Gauss envelopes over `tooth_count` teeth centred
/// on the middle tooth; mode k has k nodes.
ModeBasis hermite_gauss_supermodes(int count, int tooth_count = kDefaultToothCount,
                                   double width_teeth = 12.0);

/// Unitary DFT matrix F_jk = exp(2 pi i j k / m) / sqrt(m).
Eigen::MatrixXcd dft_matrix(int m);

/// Pump basis by name over the given supermodes: "supermodes", "dft",
/// "random-unitary" (uses `seed`) or "random-unitary(N)" (uses N).
/// Throws ConfigError for unknown names.
ModeBasis named_pump_basis(const std::string& name, const ModeBasis& supermodes,
                           std::uint64_t seed);

}  // namespace combmem
