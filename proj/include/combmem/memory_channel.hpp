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

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "combmem/comb_modes.hpp"
#include "combmem/gaussian.hpp"

namespace combmem {

/// Memory parameters in SI units. `gamma_s` is an angular rate (rad/s).
class MemoryParams {
 public:
  /// Throws DomainError unless d >= 0, gamma_s > 0, T > 0 (and rep_rate > 0
  /// when given).
  MemoryParams(double d, double gamma_s, double T,
               std::optional<double> rep_rate = std::nullopt);

  double d() const { return d_; }
  double gamma_s() const { return gamma_s_; }
  double T() const { return T_; }
  /// alpha = d gamma_s T.
  double alpha() const { return d_ * gamma_s_ * T_; }
  /// gamma_s T, the write window in units of the induced decay time.
  double decay_times() const { return gamma_s_ * T_; }
  std::optional<double> rep_rate() const { return rep_rate_; }

  MemoryParams with_d(double d) const { return MemoryParams(d, gamma_s_, T_, rep_rate_); }

 private:
  double d_;
  double gamma_s_;
  double T_;
  std::optional<double> rep_rate_;
};

/// Single-photon detuning, excited-state linewidth and pump Rabi frequency,
/// all angular (rad/s).
struct PhysicalParams {
  double Delta;
  double gamma;
  double Omega_p;

  /// |Omega_p / Delta|; the Raman picture assumes this is well below 0.1.
  double detuning_ratio() const;
};

/// gamma |Omega_p / Delta|^2. Throws DomainError for zero detuning or a
/// nonpositive linewidth; warns when |Omega_p / Delta| > 0.1.
double derive_gamma_s(const PhysicalParams& p);

/// K_w = 1 - exp(-d gamma_s / (gamma_s + i w)).
std::complex<double> kernel(const MemoryParams& params, double omega);

/// (1 - e^{-d})^2. Throws DomainError for negative d.
double efficiency(double d);

/// 1 - k2 (1 - C_in) = (1 - k2) 1 + k2 C_in.
///
/// k2 within 1e-12 outside [0, 1] is clamped with a warning; anything
/// further out throws DomainError.
CovarianceMatrix covariance_map(const CovarianceMatrix& c_in, double k2);

/// How modes orthogonal to the pump appear in the read-out pulse.
enum class UnstoredModes {
  /// Fresh vacuum: the unstored light left the ensemble during the write
  /// window and is not part of the retrieved pulse. Default.
  Vacuum,
  /// Pure-loss view: unstored modes keep their input state and their
  /// correlations with the stored mode scale by sqrt(k2).
  Transmitted,
};

/// Single ensemble driven by `pump`, with C_in expressed over
/// `analysis_basis`. The pump must coincide (up to a phase) with one basis
/// vector; otherwise BasisMismatchError.
CovarianceMatrix apply_single(const CovarianceMatrix& c_in,
                              const ModeBasis& analysis_basis,
                              const ModeVector& pump, double k2,
                              UnstoredModes unstored = UnstoredModes::Vacuum);

/// Index of the analysis basis vector matching `pump` up to a phase.
int pump_index_in(const ModeBasis& analysis_basis, const ModeVector& pump);

/// M ensembles in a row, one per pump vector, with C_in expressed over the
/// supermode basis. The pump projector sum_k p_k p_k^H is pulled back into
/// supermode coordinates and applied as a lossy mode map, so the result
/// equals covariance_map(C_in, k2) exactly when the pumps span the
/// supermode subspace. Throws IncompletePumpBasisError when the two
/// projectors differ by more than 1e-8.
CovarianceMatrix apply_cascade(const CovarianceMatrix& c_in,
                               const ModeBasis& supermodes,
                               const ModeBasis& pumps, double k2);

/// Samples of K_w on a symmetric frequency grid.
struct KernelResponse {
  std::vector<double> frequencies;                // rad/s
  std::vector<std::complex<double>> values;
  /// max over the grid of | |K_w|^2 / |K_0|^2 - 1 |.
  double flatness = 0.0;

  void write_csv(std::ostream& os) const;
};

/// n_points samples on [-omega_max, omega_max]. omega_max == 0 collapses to
/// the single point w = 0. Throws PreconditionError when n_points < 2.
KernelResponse frequency_response(const MemoryParams& params, double omega_max,
                                  int n_points);

/// Largest flatness tolerated by the narrowband (k2 = eta) replacement.
inline constexpr double kNarrowbandFlatness = 0.002;

/// round(T * rep_rate). Throws DomainError for negative inputs.
std::int64_t pulse_capacity(double T, double rep_rate);

/// Plain `key = value` parameter blocks, values in SI units. Accepted keys:
///   memory:   d, gamma_s, T, rep_rate (optional)
///   physical: Delta, gamma, Omega_p
/// Values may be arithmetic expressions such as `2pi*10e3`.
MemoryParams load_memory_params(const std::map<std::string, double>& values);
PhysicalParams load_physical_params(const std::map<std::string, double>& values);

}  // namespace combmem
