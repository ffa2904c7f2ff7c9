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

#include "combmem/raman_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "combmem/bessel.hpp"
#include "combmem/diagnostics.hpp"
#include "combmem/errors.hpp"

namespace combmem {
namespace {

using cvec = std::vector<cplx>;

constexpr double kQuadratureTarget = 1e-10;
constexpr double kQuadratureLimit = 1e-6;
constexpr int kMaxPanels = 1 << 16;

// Composite Simpson weights for n equally spaced samples; an odd number of
// intervals closes with the 3/8 rule, a single interval is a trapezoid.
std::vector<double> simpson_weights(std::size_t n, double h) {
  std::vector<double> w(n, 0.0);
  if (n < 2) return w;
  const std::size_t intervals = n - 1;
  if (intervals == 1) {
    w[0] = w[1] = 0.5 * h;
    return w;
  }
  const std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson_end != intervals) {
    const std::size_t s = simpson_end;
    w[s] += 3.0 * h / 8.0;
    w[s + 1] += 9.0 * h / 8.0;
    w[s + 2] += 9.0 * h / 8.0;
    w[s + 3] += 3.0 * h / 8.0;
  }
  return w;
}

double squared_sum(std::span<const cplx> v, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::norm(v[i]);
  return s;
}

double uniform_step(const std::vector<double>& grid, const char* who) {
  if (grid.size() < 2) return 0.0;
  const double h = grid[1] - grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)) + 1e-12 * std::abs(grid.back()))
      throw PreconditionError(std::string(who) + ": grid is not uniform");
  }
  return h;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

// Scaled composite kernel g(s) = e^{-s} sqrt(d/s) J1(2 sqrt(d s)); the
// ensemble's full coherent response is -(g * a_in).
double response_kernel(double d, double s) {
  if (d == 0.0) return 0.0;
  if (s <= 0.0) return d;
  const double x = 2.0 * std::sqrt(d * s);
  if (x < 1e-6) return d * std::exp(-s);  // J1(x) ~ x/2
  return std::exp(-s) * std::sqrt(d / s) * bessel_j1(x);
}

struct MarchResult {
  cvec a_in, a_out, b_final;
  EnergyBudget budget;
  std::vector<std::size_t> snap_t, snap_z;
  std::vector<cvec> snap_a, snap_b;
  std::size_t steps_taken = 0;
};

// Marches the scaled equations (time in 1/gamma_s) from b_init with the
// boundary a(0, tau_n) = boundary(n). Runs `max_steps` steps, or stops
// early per the read control (checked every `block` steps).
template <typename Boundary>
MarchResult march(double d, double dtau, const cvec& b_init, std::size_t max_steps,
                  Boundary&& boundary, const PdeOptions& options, std::size_t block,
                  double early_stop_fraction) {
  const std::size_t nz = b_init.size();
  const double dz = 1.0 / static_cast<double>(nz - 1);
  const double kappa = std::sqrt(d);
  const double decay = std::exp(-dtau);
  const double beta = 0.5 * kappa * dtau;
  const double half = 0.5 * kappa * dz;

  MarchResult r;
  cvec a(nz), b = b_init, c(nz);
  auto z_energy = [&](const cvec& v) {
    double s = 0.0;
    for (std::size_t j = 0; j < nz; ++j)
      s += (j == 0 || j + 1 == nz ? 0.5 : 1.0) * std::norm(v[j]);
    return s * dz;
  };
  auto snapshot = [&](std::size_t n) {
    if (options.snapshot_stride_t <= 0) return;
    if (n % static_cast<std::size_t>(options.snapshot_stride_t) != 0) return;
    const std::size_t sz = static_cast<std::size_t>(std::max(1, options.snapshot_stride_z));
    if (r.snap_z.empty())
      for (std::size_t j = 0; j < nz; j += sz) r.snap_z.push_back(j);
    cvec ra, rb;
    for (std::size_t j : r.snap_z) {
      ra.push_back(a[j]);
      rb.push_back(b[j]);
    }
    r.snap_t.push_back(n);
    r.snap_a.push_back(std::move(ra));
    r.snap_b.push_back(std::move(rb));
  };

  // Initial slice: integrate d/dz a = -kappa b with the given b.
  a[0] = boundary(0);
  for (std::size_t j = 1; j < nz; ++j) a[j] = a[j - 1] - half * (b[j - 1] + b[j]);
  r.a_in.push_back(a[0]);
  r.a_out.push_back(a[nz - 1]);
  r.budget.stored_initial = z_energy(b);
  double b_energy_prev = r.budget.stored_initial;
  snapshot(0);

  double block_energy = 0.0;
  for (std::size_t n = 1; n <= max_steps; ++n) {
    for (std::size_t j = 0; j < nz; ++j) c[j] = decay * (b[j] + beta * a[j]);
    const cplx a_prev_in = a[0], a_prev_out = a[nz - 1];
    a[0] = boundary(n);
    b[0] = c[0] + beta * a[0];
    const double denom = 1.0 + half * beta;
    for (std::size_t j = 1; j < nz; ++j) {
      a[j] = (a[j - 1] - half * (b[j - 1] + c[j])) / denom;
      b[j] = c[j] + beta * a[j];
    }
    const double b_energy = z_energy(b);
    r.budget.input += 0.5 * dtau * (std::norm(a_prev_in) + std::norm(a[0]));
    const double out_step = 0.5 * dtau * (std::norm(a_prev_out) + std::norm(a[nz - 1]));
    r.budget.transmitted += out_step;
    r.budget.decayed += dtau * (b_energy_prev + b_energy);  // 2 gamma int |b|^2
    b_energy_prev = b_energy;
    r.a_in.push_back(a[0]);
    r.a_out.push_back(a[nz - 1]);
    snapshot(n);
    r.steps_taken = n;

    block_energy += out_step;
    if (early_stop_fraction > 0.0 && block > 0 && n % block == 0) {
      if (block_energy <= early_stop_fraction * r.budget.transmitted) break;
      block_energy = 0.0;
    }
  }
  r.b_final = b;
  r.budget.stored_final = b_energy_prev;
  return r;
}

FieldGrid to_field_grid(MarchResult&& r, const MemoryParams& params, double dtau) {
  const double gs = params.gamma_s();
  const double amp = std::sqrt(gs);  // scaled -> SI amplitude
  FieldGrid g;
  const std::size_t nz = r.b_final.size();
  g.z = linspace(0.0, 1.0, static_cast<int>(nz));
  g.t.resize(r.a_out.size());
  for (std::size_t n = 0; n < g.t.size(); ++n) g.t[n] = static_cast<double>(n) * dtau / gs;
  g.a_in = std::move(r.a_in);
  g.a_out = std::move(r.a_out);
  for (auto& v : g.a_in) v *= amp;
  for (auto& v : g.a_out) v *= amp;
  g.b_final = std::move(r.b_final);
  g.budget = r.budget;
  g.snapshot_t_index = std::move(r.snap_t);
  g.snapshot_z_index = std::move(r.snap_z);
  const auto rows = static_cast<Eigen::Index>(g.snapshot_t_index.size());
  const auto cols = static_cast<Eigen::Index>(g.snapshot_z_index.size());
  g.a.resize(rows, cols);
  g.b.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      g.a(i, j) = amp * r.snap_a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      g.b(i, j) = r.snap_b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return g;
}

void check_grid_sizes(int n_z, int n_t, const char* who) {
  if (n_z < 2 || n_t < 2)
    throw PreconditionError(std::string(who) + ": need at least 2 grid points in z and t");
}

void warn_coarse_step(double dtau) {
  if (dtau > 0.1) {
    std::ostringstream msg;
    msg << "PDE time step gamma_s*dt = " << dtau << " exceeds 0.1";
    warn(msg.str());
  }
}

cvec resample(const StoredProfile& profile, std::size_t nz) {
  if (profile.b.size() == nz) return profile.b;
  if (profile.b.size() < 2 || profile.z.size() != profile.b.size())
    throw PreconditionError("stored profile needs matching z and b samples");
  cvec out(nz);
  for (std::size_t j = 0; j < nz; ++j) {
    const double z = static_cast<double>(j) / static_cast<double>(nz - 1);
    const auto it = std::upper_bound(profile.z.begin(), profile.z.end(), z);
    std::size_t hi = static_cast<std::size_t>(std::distance(profile.z.begin(), it));
    hi = std::clamp<std::size_t>(hi, 1, profile.z.size() - 1);
    const std::size_t lo = hi - 1;
    const double f = (z - profile.z[lo]) / (profile.z[hi] - profile.z[lo]);
    out[j] = (1.0 - f) * profile.b[lo] + f * profile.b[hi];
  }
  return out;
}

}  // namespace

double SampledEnvelope::energy() const {
  if (t.size() < 2) return 0.0;
  const auto w = simpson_weights(t.size(), t[1] - t[0]);
  return squared_sum(values, w);
}

double StoredProfile::energy() const {
  if (z.size() < 2) return 0.0;
  const auto w = simpson_weights(z.size(), z[1] - z[0]);
  return squared_sum(b, w);
}

double EnergyBudget::relative_residual() const {
  const double in = input + stored_initial;
  const double out = transmitted + stored_final + decayed;
  if (in == 0.0) return out == 0.0 ? 0.0 : 1.0;
  return std::abs(in - out) / in;
}

void FieldGrid::write_csv(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << "z,t,re_a,im_a,re_b,im_b\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double ti = t[snapshot_t_index[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double zj = z[snapshot_z_index[static_cast<std::size_t>(j)]];
      os << zj << ',' << ti << ',' << a(i, j).real() << ',' << a(i, j).imag() << ','
         << b(i, j).real() << ',' << b(i, j).imag() << '\n';
    }
  }
  os.precision(old_precision);
}

StoredProfile write_analytic(const Envelope& a_in, const MemoryParams& params, int n_z,
                             std::span<const double> breakpoints) {
  if (n_z < 2) throw PreconditionError("write_analytic: need n_z >= 2");
  StoredProfile out;
  out.z = linspace(0.0, 1.0, n_z);
  out.b.assign(static_cast<std::size_t>(n_z), cplx(0.0));
  const double d = params.d();
  if (d == 0.0) return out;

  const double gs = params.gamma_s();
  const double span_tau = params.decay_times();
  const double kappa = std::sqrt(d);
  const double amp = 1.0 / std::sqrt(gs);
  const auto nz = static_cast<std::size_t>(n_z);

  // Segments in lookback time sigma = gamma_s (T - t), split at breakpoints.
  std::vector<double> cuts{0.0, span_tau};
  for (double t : breakpoints) {
    const double sigma = gs * (params.T() - t);
    if (sigma > 0.0 && sigma < span_tau) cuts.push_back(sigma);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const std::size_t segments = cuts.size() - 1;

  // Per segment and z: Simpson endpoint, odd-node and even-node sums.
  std::vector<cvec> ends(segments, cvec(nz)), odd(segments, cvec(nz)), even(segments, cvec(nz));
  auto add_node = [&](cvec& acc, double sigma, double weight) {
    const cplx source = a_in((span_tau - sigma) / gs) * amp * std::exp(-sigma) * weight;
    if (source == cplx(0.0)) return;
    for (std::size_t j = 0; j < nz; ++j)
      acc[j] += source * bessel_j0(2.0 * std::sqrt(d * out.z[j] * sigma));
  };
  auto estimate = [&](int panels) {
    cvec total(nz, cplx(0.0));
    for (std::size_t s = 0; s < segments; ++s) {
      const double h = (cuts[s + 1] - cuts[s]) / panels;
      for (std::size_t j = 0; j < nz; ++j)
        total[j] += h / 3.0 * (ends[s][j] + 4.0 * odd[s][j] + 2.0 * even[s][j]);
    }
    return total;
  };

  int panels = 2;
  for (std::size_t s = 0; s < segments; ++s) {
    add_node(ends[s], cuts[s], 1.0);
    add_node(ends[s], cuts[s + 1], 1.0);
    add_node(odd[s], 0.5 * (cuts[s] + cuts[s + 1]), 1.0);
  }
  cvec previous = estimate(panels);
  double error = 0.0;
  for (int level = 0;; ++level) {
    const int next = 2 * panels;
    for (std::size_t s = 0; s < segments; ++s) {
      for (std::size_t j = 0; j < nz; ++j) {
        even[s][j] += odd[s][j];
        odd[s][j] = 0.0;
      }
      const double h = (cuts[s + 1] - cuts[s]) / next;
      for (int i = 1; i < next; i += 2) add_node(odd[s], cuts[s] + i * h, 1.0);
    }
    panels = next;
    cvec current = estimate(panels);
    double diff = 0.0, norm = 0.0;
    for (std::size_t j = 0; j < nz; ++j) {
      diff += std::norm(current[j] - previous[j]);
      norm += std::norm(current[j]);
    }
    error = norm == 0.0 ? 0.0 : std::sqrt(diff / norm) / 15.0;
    previous = std::move(current);
    if (level >= 2 && error <= kQuadratureTarget) break;
    if (panels >= kMaxPanels) break;
  }
  if (error > kQuadratureLimit) {
    std::ostringstream msg;
    msg << "write_analytic: quadrature error estimate " << error << " exceeds "
        << kQuadratureLimit << " at " << panels << " panels per segment";
    throw ResolutionError(msg.str());
  }
  for (std::size_t j = 0; j < nz; ++j) out.b[j] = kappa * previous[j];
  return out;
}

SampledEnvelope read_analytic(const StoredProfile& profile, const MemoryParams& params,
                              std::span<const double> t_read) {
  if (profile.z.size() < 2 || profile.z.size() != profile.b.size())
    throw PreconditionError("read_analytic: profile needs at least two matching samples");
  const double hz = uniform_step(profile.z, "read_analytic");
  const std::size_t nz = profile.z.size();
  const auto w = simpson_weights(nz, hz);
  // Coarse rule on the largest prefix with a multiple of 4 intervals, for
  // the error estimate.
  const std::size_t prefix = ((nz - 1) / 4) * 4;
  std::vector<double> w_fine, w_coarse;
  if (prefix >= 4) {
    w_fine = simpson_weights(prefix + 1, hz);
    w_coarse = simpson_weights(prefix / 2 + 1, 2.0 * hz);
  }

  const double rate = params.d() * params.gamma_s();
  const double kappa = std::sqrt(rate);
  SampledEnvelope out;
  out.t.assign(t_read.begin(), t_read.end());
  out.values.resize(t_read.size());
  double err2 = 0.0, norm2 = 0.0;
  std::vector<double> j0(nz);
  for (std::size_t n = 0; n < t_read.size(); ++n) {
    const double t = t_read[n];
    if (t < 0.0) throw PreconditionError("read_analytic: negative read time");
    cplx acc = 0.0;
    double mass = 0.0;
    for (std::size_t j = 0; j < nz; ++j) {
      j0[j] = bessel_j0(2.0 * std::sqrt(rate * (1.0 - profile.z[j]) * t));
      acc += w[j] * j0[j] * profile.b[j];
      mass += w[j] * std::abs(j0[j] * profile.b[j]);
    }
    const double pre = -kappa * std::exp(-params.gamma_s() * t);
    out.values[n] = pre * acc;
    norm2 += pre * pre * mass * mass;
    if (!w_fine.empty()) {
      cplx fine = 0.0, coarse = 0.0;
      for (std::size_t j = 0; j <= prefix; ++j) fine += w_fine[j] * j0[j] * profile.b[j];
      for (std::size_t j = 0; j <= prefix / 2; ++j)
        coarse += w_coarse[j] * j0[2 * j] * profile.b[2 * j];
      err2 += std::norm(pre * (fine - coarse) / 15.0);
    }
  }
  if (norm2 > 0.0 && std::sqrt(err2 / norm2) > kQuadratureLimit) {
    std::ostringstream msg;
    msg << "read_analytic: quadrature error estimate " << std::sqrt(err2 / norm2)
        << " exceeds " << kQuadratureLimit << "; refine the stored profile";
    throw ResolutionError(msg.str());
  }
  return out;
}

SampledEnvelope retrieve_analytic(const StoredProfile& profile, const MemoryParams& params,
                                  int n_per_T, const ReadControl& control) {
  if (n_per_T < 2) throw PreconditionError("retrieve_analytic: need n_per_T >= 2");
  const double dt = params.T() / (n_per_T - 1);
  const auto total_steps =
      static_cast<std::size_t>(std::llround(control.max_duration_factor * (n_per_T - 1)));
  const std::size_t block = std::max<std::size_t>(1, static_cast<std::size_t>((n_per_T - 1) / 10));

  SampledEnvelope out;
  double energy = 0.0;
  std::size_t next = 0;
  while (next <= total_steps) {
    const std::size_t stop = std::min(total_steps, next + block - (next == 0 ? 0 : 1));
    std::vector<double> times;
    for (std::size_t n = next; n <= stop; ++n) times.push_back(static_cast<double>(n) * dt);
    const auto part = read_analytic(profile, params, times);
    double block_energy = 0.0;
    for (std::size_t i = 0; i < part.t.size(); ++i) {
      if (!out.values.empty())
        block_energy += 0.5 * dt * (std::norm(out.values.back()) + std::norm(part.values[i]));
      out.t.push_back(part.t[i]);
      out.values.push_back(part.values[i]);
    }
    energy += block_energy;
    next = stop + 1;
    if (control.early_stop_fraction > 0.0 && out.t.size() > 1) {
      if (energy == 0.0 || block_energy <= control.early_stop_fraction * energy) break;
    }
  }
  return out;
}

FieldGrid pde_write(const Envelope& a_in, const MemoryParams& params, int n_z, int n_t,
                    const PdeOptions& options) {
  check_grid_sizes(n_z, n_t, "pde_write");
  const double dtau = params.decay_times() / (n_t - 1);
  warn_coarse_step(dtau);
  const double gs = params.gamma_s();
  const double amp = 1.0 / std::sqrt(gs);
  auto boundary = [&](std::size_t n) {
    return a_in(static_cast<double>(n) * dtau / gs) * amp;
  };
  cvec b0(static_cast<std::size_t>(n_z), cplx(0.0));
  auto r = march(params.d(), dtau, b0, static_cast<std::size_t>(n_t - 1), boundary, options,
                 0, 0.0);
  return to_field_grid(std::move(r), params, dtau);
}

FieldGrid pde_read(const StoredProfile& profile, const MemoryParams& params, int n_z,
                   int n_per_T, const ReadControl& control, const PdeOptions& options) {
  check_grid_sizes(n_z, n_per_T, "pde_read");
  const double dtau = params.decay_times() / (n_per_T - 1);
  warn_coarse_step(dtau);
  const cvec b0 = resample(profile, static_cast<std::size_t>(n_z));
  const auto steps =
      static_cast<std::size_t>(std::llround(control.max_duration_factor * (n_per_T - 1)));
  const std::size_t block = std::max<std::size_t>(1, static_cast<std::size_t>((n_per_T - 1) / 10));
  auto r = march(params.d(), dtau, b0, steps, [](std::size_t) { return cplx(0.0); }, options,
                 block, control.early_stop_fraction);
  return to_field_grid(std::move(r), params, dtau);
}

double relative_l2(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw DimensionError("relative_l2: size mismatch");
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += std::norm(a[i] - b[i]);
    norm += std::max(std::norm(a[i]), std::norm(b[i]));
  }
  if (norm == 0.0) return 0.0;
  return std::sqrt(diff / norm);
}

double tukey_window(double t, double start, double duration, double taper) {
  const double x = t - start;
  if (x < 0.0 || x > duration) return 0.0;
  const double edge = 0.5 * taper * duration;
  if (edge <= 0.0) return 1.0;
  if (x < edge) return 0.5 * (1.0 - std::cos(std::numbers::pi * x / edge));
  if (x > duration - edge) return 0.5 * (1.0 - std::cos(std::numbers::pi * (duration - x) / edge));
  return 1.0;
}

Envelope probe_envelope(double omega, double T, double taper, double amplitude) {
  return [=](double t) {
    return amplitude * tukey_window(t, 0.0, T, taper) * std::polar(1.0, omega * t);
  };
}

Probe tukey_probe(double omega, double T, double taper, double amplitude) {
  if (!(taper > 0.0 && taper <= 1.0))
    throw ProbeDesignError("tukey_probe: taper fraction must lie in (0, 1]");
  const double edge = 0.5 * taper * T;
  return Probe{probe_envelope(omega, T, taper, amplitude), {edge, T - edge}};
}

TransferGain probe_gain(const MemoryParams& params, const Probe& probe, double omega,
                        const TransferOptions& options) {
  check_grid_sizes(options.n_z, options.n_t, "probe_gain");
  const double gs = params.gamma_s();
  const double span_tau = params.decay_times();
  const double w = omega / gs;  // scaled angular frequency
  const double amp = 1.0 / std::sqrt(gs);
  const auto nt = static_cast<std::size_t>(options.n_t);
  const double h = span_tau / (options.n_t - 1);

  cvec x(nt);
  for (std::size_t i = 0; i < nt; ++i) x[i] = probe.shape(static_cast<double>(i) * h / gs) * amp;
  const auto wt = simpson_weights(nt, h);
  auto spectrum = [&](double nu) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < nt; ++i)
      s += wt[i] * x[i] * std::polar(1.0, -nu * static_cast<double>(i) * h);
    return s;
  };
  const cplx carrier = spectrum(w);
  double peak = std::abs(carrier);
  const double scan = 40.0 * std::numbers::pi / span_tau;
  for (int k = -400; k <= 400; ++k) peak = std::max(peak, std::abs(spectrum(w + scan * k / 400.0)));
  if (peak == 0.0 || std::abs(carrier) < 0.01 * peak) {
    std::ostringstream msg;
    msg << "probe_gain: probe spectrum at the carrier is " << std::abs(carrier) / std::max(peak, 1e-300)
        << " of its peak (need >= 0.01)";
    throw ProbeDesignError(msg.str());
  }

  TransferGain g;
  g.omega = omega;
  g.expected = -kernel(params, omega) * std::polar(1.0, omega * params.T());
  g.input_energy = squared_sum(x, wt);

  // Response during the write window, on the write grid.
  cvec during(nt);
  StoredProfile profile;
  SampledEnvelope retrieved;
  if (options.path == DynamicsPath::Analytic) {
    const double d = params.d();
    std::vector<double> kern(nt);
    for (std::size_t i = 0; i < nt; ++i) kern[i] = response_kernel(d, static_cast<double>(i) * h);
    for (std::size_t i = 0; i < nt; ++i) {
      const auto wi = simpson_weights(i + 1, h);
      cplx acc = 0.0;
      for (std::size_t k = 0; k <= i; ++k) acc += wi[k] * kern[i - k] * x[k];
      during[i] = -acc;
    }
    profile = write_analytic(probe.shape, params, options.n_z, probe.breakpoints);
    retrieved = retrieve_analytic(profile, params, options.n_t, options.read);
  } else {
    const FieldGrid write = pde_write(probe.shape, params, options.n_z, options.n_t);
    for (std::size_t i = 0; i < nt; ++i) during[i] = (write.a_out[i] - write.a_in[i]) * amp;
    retrieved = pde_read(write.stored(), params, options.n_z, options.n_t, options.read).output();
  }

  // Spectral projections, read clock (write-window times are t - T).
  cplx r_write = 0.0;
  for (std::size_t i = 0; i < nt; ++i)
    r_write += wt[i] * during[i] * std::polar(1.0, -w * (static_cast<double>(i) * h - span_tau));
  const auto wr = simpson_weights(retrieved.t.size(), h);
  cplx r_read = 0.0;
  cvec read_scaled(retrieved.values.size());
  for (std::size_t j = 0; j < retrieved.values.size(); ++j) {
    read_scaled[j] = retrieved.values[j] * amp;
    r_read += wr[j] * read_scaled[j] * std::polar(1.0, -w * static_cast<double>(j) * h);
  }
  g.gain = (r_write + r_read) / carrier;
  g.retrieval_gain = r_read / carrier;
  g.retrieved_energy = squared_sum(read_scaled, wr);
  g.response_energy = squared_sum(during, wt) + g.retrieved_energy;
  return g;
}

std::vector<TransferGain> transfer_function_estimate(const MemoryParams& params,
                                                     std::span<const double> probe_frequencies,
                                                     const TransferOptions& options) {
  std::vector<TransferGain> out;
  for (double omega : probe_frequencies) {
    if (std::abs(omega) > kMaxProbeOmega * params.gamma_s() * (1.0 + 1e-12))
      throw PreconditionError("transfer_function_estimate: probe frequencies must satisfy "
                              "|omega| <= 0.3 gamma_s");
    out.push_back(probe_gain(params, tukey_probe(omega, params.T(), options.taper), omega, options));
  }
  return out;
}

}  // namespace combmem
