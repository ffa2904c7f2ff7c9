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

#include <iosfwd>
#include <span>
#include <vector>

#include "combmem/gaussian.hpp"

namespace combmem {

/// Figures of merit for one retrieved supermode. Variances are relative to
/// vacuum; `closed_form` is false when the input block was impure and the
/// numbers come from the covariance map plus the Gaussian-fidelity oracle.
struct SupermodeReport {
  int index = 0;
  double zeta_in = 1.0;
  double zeta_out = 1.0;
  double purity_out = 1.0;
  double fidelity = 1.0;
  bool closed_form = true;

  double zeta_in_db() const { return to_db(zeta_in); }
  double zeta_out_db() const { return to_db(zeta_out); }
};

/// 1 - eta (1 - zeta_in).
double output_squeezing(double zeta_in, double eta);

/// Purity of the retrieved single-mode state from
/// det C_out = 1 + eta (1 - eta) [Tr sqrt(C_in) diag(1, -1)]^2, with the
/// trace taken in the block's principal axes. Requires a pure input block
/// (det = 1 within 1e-9), else PreconditionError.
double output_purity(const CovarianceMatrix& c_in_block, double eta);

/// F = 2 [4 + (1 - eta^2) Tr(C_in - 1)]^{-1/2} for a pure squeezed-vacuum
/// input block; PreconditionError otherwise.
double fidelity_supermode(const CovarianceMatrix& c_in_block, double eta);

struct OverallFidelity {
  double product = 1.0;
  std::vector<double> per_mode;
};

/// Product of the per-mode fidelities, plus the vector itself.
OverallFidelity overall_fidelity(std::span<const SupermodeReport> reports);

/// Report for one input block at efficiency eta. Pure blocks use the closed
/// forms; impure blocks fall back to covariance_map + gaussian_fidelity.
SupermodeReport supermode_report(int index, const CovarianceMatrix& c_in_block,
                                 double eta);

/// Per-supermode table for squeezed-vacuum inputs given in dB, at
/// eta = efficiency(d). Throws DomainError for an empty list or d < 0.
std::vector<SupermodeReport> fig3_table(const std::vector<double>& zeta_in_db,
                                        double d);

/// CSV columns: mode_index, zeta_in_dB, zeta_out_dB, purity, fidelity.
void write_fig3_csv(std::ostream& os, std::span<const SupermodeReport> reports);

}  // namespace combmem
