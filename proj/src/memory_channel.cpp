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

#include "combmem/memory_channel.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "combmem/diagnostics.hpp"
#include "combmem/errors.hpp"

namespace combmem {
namespace {

constexpr double kClampTol = 1e-12;

double checked_k2(double k2) {
  if (!std::isfinite(k2) || k2 < -kClampTol || k2 > 1.0 + kClampTol) {
    std::ostringstream msg;
    msg << "k2 = " << k2 << " lies outside [0, 1]";
    throw DomainError(msg.str());
  }
  if (k2 < 0.0 || k2 > 1.0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "clamping k2 = " << k2 << " into [0, 1]";
    warn(msg.str());
    k2 = std::clamp(k2, 0.0, 1.0);
  }
  return k2;
}

double require(const std::map<std::string, double>& values, const std::string& key,
               const std::string& block) {
  const auto it = values.find(key);
  if (it == values.end())
    throw ConfigError("[" + block + "] is missing required key '" + key + "'");
  return it->second;
}

void check_modes(const CovarianceMatrix& c, const ModeBasis& basis, const char* who) {
  if (static_cast<std::size_t>(c.mode_count()) != basis.size())
    throw DimensionError(std::string(who) + ": covariance has " +
                         std::to_string(c.mode_count()) + " modes but the basis has " +
                         std::to_string(basis.size()));
}

}  // namespace

MemoryParams::MemoryParams(double d, double gamma_s, double T,
                           std::optional<double> rep_rate)
    : d_(d), gamma_s_(gamma_s), T_(T), rep_rate_(rep_rate) {
  if (!(d >= 0.0) || !std::isfinite(d))
    throw DomainError("optical depth d must be finite and >= 0");
  if (!(gamma_s > 0.0) || !std::isfinite(gamma_s))
    throw DomainError("induced decay rate gamma_s must be finite and > 0");
  if (!(T > 0.0) || !std::isfinite(T))
    throw DomainError("write duration T must be finite and > 0");
  if (rep_rate && !(*rep_rate > 0.0))
    throw DomainError("repetition rate must be > 0");
}

double PhysicalParams::detuning_ratio() const { return std::abs(Omega_p / Delta); }

double derive_gamma_s(const PhysicalParams& p) {
  if (p.Delta == 0.0) throw DomainError("derive_gamma_s: zero single-photon detuning");
  if (!(p.gamma > 0.0)) throw DomainError("derive_gamma_s: linewidth must be > 0");
  const double ratio = p.Omega_p / p.Delta;
  if (std::abs(ratio) > 0.1) {
    std::ostringstream msg;
    msg << "|Omega_p / Delta| = " << std::abs(ratio)
        << " exceeds 0.1; the far-detuned Raman limit is doubtful";
    warn(msg.str());
  }
  return p.gamma * ratio * ratio;
}

std::complex<double> kernel(const MemoryParams& params, double omega) {
  const std::complex<double> denom(params.gamma_s(), omega);
  return 1.0 - std::exp(-params.d() * params.gamma_s() / denom);
}

double efficiency(double d) {
  if (!(d >= 0.0)) throw DomainError("efficiency: optical depth must be >= 0");
  const double k0 = -std::expm1(-d);
  return k0 * k0;
}

CovarianceMatrix covariance_map(const CovarianceMatrix& c_in, double k2) {
  k2 = checked_k2(k2);
  const Eigen::Index n = c_in.entries().rows();
  return CovarianceMatrix((1.0 - k2) * Eigen::MatrixXd::Identity(n, n) +
                          k2 * c_in.entries());
}

int pump_index_in(const ModeBasis& analysis_basis, const ModeVector& pump) {
  if (!pump.is_normalized(1e-10))
    throw PreconditionError("apply_single: pump is not normalized");
  for (std::size_t j = 0; j < analysis_basis.size(); ++j) {
    if (std::abs(std::abs(inner_product(analysis_basis[j], pump)) - 1.0) <= 1e-10)
      return static_cast<int>(j);
  }
  throw BasisMismatchError("apply_single: pump is not one of the analysis basis vectors");
}

CovarianceMatrix apply_single(const CovarianceMatrix& c_in,
                              const ModeBasis& analysis_basis,
                              const ModeVector& pump, double k2,
                              UnstoredModes unstored) {
  check_modes(c_in, analysis_basis, "apply_single");
  k2 = checked_k2(k2);
  pump_index_in(analysis_basis, pump);
  const int m = c_in.mode_count();
  // Pump projector p p^H in analysis-basis coordinates.
  const Eigen::VectorXcd g = analysis_basis.matrix().adjoint() * pump.amplitudes();
  const Eigen::MatrixXcd stored = g * g.adjoint();
  Eigen::MatrixXcd map = std::sqrt(k2) * stored;
  if (unstored == UnstoredModes::Transmitted)
    map += Eigen::MatrixXcd::Identity(m, m) - stored;
  return apply_attenuating_map(c_in, map);
}

CovarianceMatrix apply_cascade(const CovarianceMatrix& c_in,
                               const ModeBasis& supermodes,
                               const ModeBasis& pumps, double k2) {
  check_modes(c_in, supermodes, "apply_cascade");
  k2 = checked_k2(k2);
  if (!pumps[0].same_range(supermodes[0]))
    throw DimensionError("apply_cascade: pumps and supermodes cover different teeth");
  const double mismatch = projector_distance(projector_of(pumps), projector_of(supermodes));
  if (mismatch > 1e-8) {
    std::ostringstream msg;
    msg << "apply_cascade: pump basis does not span the supermode subspace "
        << "(projector mismatch " << mismatch << ")";
    throw IncompletePumpBasisError(msg.str());
  }
  // sum_k p_k p_k^H pulled back into supermode coordinates.
  const Eigen::MatrixXcd g = supermodes.matrix().adjoint() * pumps.matrix();
  const Eigen::MatrixXcd map = std::sqrt(k2) * (g * g.adjoint());
  return apply_attenuating_map(c_in, map);
}

void KernelResponse::write_csv(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << "omega_rad_s,re_K,im_K,absK2\n";
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    os << frequencies[i] << ',' << values[i].real() << ',' << values[i].imag() << ','
       << std::norm(values[i]) << '\n';
  }
  os.precision(old_precision);
}

KernelResponse frequency_response(const MemoryParams& params, double omega_max,
                                  int n_points) {
  if (n_points < 2) throw PreconditionError("frequency_response: need n_points >= 2");
  if (!(omega_max >= 0.0)) throw DomainError("frequency_response: omega_max must be >= 0");
  KernelResponse out;
  if (omega_max == 0.0) {
    out.frequencies = {0.0};
  } else {
    out.frequencies.resize(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
      out.frequencies[static_cast<std::size_t>(i)] =
          -omega_max + 2.0 * omega_max * i / (n_points - 1);
  }
  const double k0 = std::norm(kernel(params, 0.0));
  for (double w : out.frequencies) {
    const auto k = kernel(params, w);
    out.values.push_back(k);
    if (k0 > 0.0) out.flatness = std::max(out.flatness, std::abs(std::norm(k) / k0 - 1.0));
  }
  return out;
}

std::int64_t pulse_capacity(double T, double rep_rate) {
  if (!(T >= 0.0) || !(rep_rate >= 0.0))
    throw DomainError("pulse_capacity: duration and repetition rate must be >= 0");
  return std::llround(T * rep_rate);
}

MemoryParams load_memory_params(const std::map<std::string, double>& values) {
  std::optional<double> rep_rate;
  if (auto it = values.find("rep_rate"); it != values.end()) rep_rate = it->second;
  return MemoryParams(require(values, "d", "memory"), require(values, "gamma_s", "memory"),
                      require(values, "T", "memory"), rep_rate);
}

PhysicalParams load_physical_params(const std::map<std::string, double>& values) {
  PhysicalParams p{require(values, "Delta", "physical"), require(values, "gamma", "physical"),
                   require(values, "Omega_p", "physical")};
  if (!(p.gamma > 0.0) || !(p.Omega_p >= 0.0) || p.Delta == 0.0)
    throw ConfigError("[physical] needs gamma > 0, Omega_p >= 0 and nonzero Delta");
  return p;
}

}  // namespace combmem
