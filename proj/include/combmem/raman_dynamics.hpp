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
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "combmem/memory_channel.hpp"

namespace combmem {

// Classical (c-number) write/read dynamics of the pump-projected signal
// a = p^H s and the collective coherence b:
//
//   (d/dt + gamma_s) b(z, t) = sqrt(d gamma_s) a(z, t)
//   d/dz a(z, t)             = -sqrt(d gamma_s) b(z, t)
//
// with z in [0, 1] and t in the frame moving with the pulses. Signal
// amplitudes carry units of 1/sqrt(s) so that |a|^2 dt is a photon number;
// b is dimensionless per unit z. Internally everything runs in units of
// 1/gamma_s.

/// Input envelope a_in(t), t in seconds.
using Envelope = std::function<std::complex<double>(double)>;

/// Signal envelope sampled on a time grid (seconds).
struct SampledEnvelope {
  std::vector<double> t;
  std::vector<std::complex<double>> values;

  /// Simpson estimate of sum |a|^2 dt (uniform grids).
  double energy() const;
};

/// Coherence profile b(z) on a uniform grid over [0, 1].
struct StoredProfile {
  std::vector<double> z;
  std::vector<std::complex<double>> b;

  double energy() const;
};

/// Photon bookkeeping for one PDE run. For a write run
/// input + stored_initial = transmitted + stored_final + decayed.
struct EnergyBudget {
  double input = 0.0;
  double stored_initial = 0.0;
  double transmitted = 0.0;
  double stored_final = 0.0;
  double decayed = 0.0;

  /// |in - out| / in, where in = input + stored_initial.
  double relative_residual() const;
};

/// Result of one PDE march. Boundary traces and the final profile are always
/// kept; full a(z, t) and b(z, t) snapshots only when requested.
struct FieldGrid {
  std::vector<double> z;                      // n_z points on [0, 1]
  std::vector<double> t;                      // n_t points, seconds
  std::vector<std::complex<double>> a_in;     // a(0, t)
  std::vector<std::complex<double>> a_out;    // a(1, t)
  std::vector<std::complex<double>> b_final;  // b(z, t_end)
  EnergyBudget budget;

  // Snapshot rows are times, columns positions.
  std::vector<std::size_t> snapshot_t_index;
  std::vector<std::size_t> snapshot_z_index;
  Eigen::MatrixXcd a;
  Eigen::MatrixXcd b;

  StoredProfile stored() const { return {z, b_final}; }
  SampledEnvelope output() const { return {t, a_out}; }

  /// Snapshot export, columns z, t, re_a, im_a, re_b, im_b.
  void write_csv(std::ostream& os) const;
};

struct PdeOptions {
  /// Keep every n-th time row / z column in the snapshots (0 disables).
  int snapshot_stride_t = 0;
  int snapshot_stride_z = 0;
};

/// How long the read phase runs: up to `max_duration_factor` * T, stopping
/// early once the output energy gained over the last T/10 is below
/// `early_stop_fraction` of the total so far (0 disables early stopping).
struct ReadControl {
  double max_duration_factor = 5.0;
  double early_stop_fraction = 1e-4;
};

/// b(z, T) = sqrt(alpha/T) int_0^T e^{-gamma_s t} J0(2 sqrt(alpha z t / T))
///           a_in(T - t) dt on n_z uniform points.
///
/// Composite Simpson with panel doubling until successive estimates agree
/// to 1e-10 (relative L2 over z). Throws ResolutionError if the estimated
/// error is still above 1e-6 at the panel limit.
///
/// `breakpoints` (seconds) mark where a_in is not smooth; the quadrature is
/// split there so Simpson keeps its fourth-order convergence.
StoredProfile write_analytic(const Envelope& a_in, const MemoryParams& params, int n_z,
                             std::span<const double> breakpoints = {});

/// a_out(t) = -sqrt(d gamma_s) e^{-gamma_s t}
///            int_0^1 J0(2 sqrt(d gamma_s (1 - y) t)) b(y) dy
/// at each requested read time (seconds, read clock starting at 0).
/// Throws ResolutionError when the Simpson error estimate exceeds 1e-6 of
/// the integrand's absolute mass (L2 over the requested times).
SampledEnvelope read_analytic(const StoredProfile& profile, const MemoryParams& params,
                              std::span<const double> t_read);

/// Uniform read grid with the spacing T / (n_per_T - 1), evaluated in
/// blocks of T/10 under `control`.
SampledEnvelope retrieve_analytic(const StoredProfile& profile, const MemoryParams& params,
                                  int n_per_T, const ReadControl& control = {});

/// Marches the write phase from b(z, 0) = 0 with a(0, t) = a_in(t) over
/// n_t points on [0, T]. Each step integrates d/dz a by cumulative
/// trapezoid and advances b with the exact exponential factor and a
/// trapezoidal source (second order in both steps). Warns when
/// gamma_s dt > 0.1.
FieldGrid pde_write(const Envelope& a_in, const MemoryParams& params, int n_z, int n_t,
                    const PdeOptions& options = {});

/// Read phase from b(z, 0) = profile (linearly resampled onto n_z points if
/// needed) with a(0, t) = 0, time step T / (n_per_T - 1), duration per
/// `control`.
FieldGrid pde_read(const StoredProfile& profile, const MemoryParams& params, int n_z,
                   int n_per_T, const ReadControl& control = {},
                   const PdeOptions& options = {});

/// Relative L2 distance between two profiles on the same grid (0 when both
/// vanish).
double relative_l2(std::span<const std::complex<double>> a,
                   std::span<const std::complex<double>> b);

/// Raised-cosine (Tukey) window on [start, start + duration]; `taper` is the
/// total tapered fraction.
double tukey_window(double t, double start, double duration, double taper);

/// Windowed complex sinusoid e^{i omega t} w(t) with the window filling
/// [0, T].
Envelope probe_envelope(double omega, double T, double taper = 0.1, double amplitude = 1.0);

enum class DynamicsPath { Analytic, Pde };

struct TransferOptions {
  DynamicsPath path = DynamicsPath::Analytic;
  int n_z = 2000;
  int n_t = 2000;  // samples per write window T
  double taper = 0.1;
  /// Full read window by default: the spectral projection needs the whole
  /// output tail, not just its energy to 1e-4.
  ReadControl read{5.0, 0.0};
};

/// One probe measurement.
///
/// `gain` is the spectral ratio R(w) / X(w) of the ensemble's full
/// coherent response to the probe, referenced to the read clock. The
/// response is the field scattered during the write window,
/// a(1, t) - a_in(t), followed by the read-phase output. For the linear
/// dynamics this ratio is -K_w e^{i w T} independent of the probe shape.
/// `retrieval_gain` uses the read-phase output alone.
struct TransferGain {
  double omega = 0.0;
  std::complex<double> gain;
  std::complex<double> retrieval_gain;
  std::complex<double> expected;  // -K_w e^{i w T}
  double input_energy = 0.0;
  double response_energy = 0.0;
  double retrieved_energy = 0.0;
};

/// Probe envelope supported in [0, T] plus the times where it is not smooth.
struct Probe {
  Envelope shape;
  std::vector<double> breakpoints;
};

/// Tukey-windowed sinusoid filling [0, T].
Probe tukey_probe(double omega, double T, double taper = 0.1, double amplitude = 1.0);

/// Measures the gain at `omega` for an arbitrary probe supported in [0, T].
/// Throws ProbeDesignError when |X(omega)| is below 1% of the probe's peak
/// spectral magnitude.
TransferGain probe_gain(const MemoryParams& params, const Probe& probe, double omega,
                        const TransferOptions& options = {});

/// Largest probe frequency accepted by transfer_function_estimate, in units
/// of gamma_s.
inline constexpr double kMaxProbeOmega = 0.3;

/// Tukey-windowed sinusoid probes filling [0, T], one per frequency.
/// Requires |omega| <= kMaxProbeOmega gamma_s (PreconditionError otherwise).
std::vector<TransferGain> transfer_function_estimate(const MemoryParams& params,
                                                     std::span<const double> probe_frequencies,
                                                     const TransferOptions& options = {});

}  // namespace combmem
