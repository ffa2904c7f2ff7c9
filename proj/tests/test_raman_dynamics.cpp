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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "combmem/diagnostics.hpp"
#include "combmem/errors.hpp"
#include "combmem/memory_channel.hpp"
#include "combmem/raman_dynamics.hpp"

using namespace combmem;

namespace {

constexpr double kGammaS = 2.0 * std::numbers::pi * 10e3;

MemoryParams params(double d, double decay_times) {
  return MemoryParams(d, kGammaS, decay_times / kGammaS);
}

Envelope constant_input(const MemoryParams& p) {
  return [amp = 1.0 / std::sqrt(p.T())](double) { return cplx(amp); };
}

TransferOptions options(DynamicsPath path, int n_z, int n_t) {
  TransferOptions o;
  o.path = path;
  o.n_z = n_z;
  o.n_t = n_t;
  return o;
}

}  // namespace

TEST_CASE("trivial write cases") {
  const auto p = params(4, 10);
  const Envelope zero = [](double) { return cplx(0.0); };
  for (const auto& b : write_analytic(zero, p, 50).b) CHECK(b == cplx(0.0));
  for (const auto& b : write_analytic(constant_input(p), params(0, 10), 50).b) CHECK(b == cplx(0.0));

  const auto free = pde_write(constant_input(p), params(0, 10), 40, 200);
  for (std::size_t n = 0; n < free.t.size(); ++n) CHECK(std::abs(free.a_out[n] - free.a_in[n]) < 1e-15);
  for (const auto& b : free.b_final) CHECK(b == cplx(0.0));

  const auto none = pde_write(zero, p, 40, 200);
  for (const auto& a : none.a_out) CHECK(a == cplx(0.0));
  CHECK(none.budget.relative_residual() == 0.0);

  CHECK_THROWS_AS(write_analytic(zero, p, 1), PreconditionError);
  CHECK_THROWS_AS(pde_write(zero, p, 1, 10), PreconditionError);
}

TEST_CASE("stored energy never exceeds the input energy") {
  const auto p = params(4, 10);
  const auto s = write_analytic(constant_input(p), p, 1001);
  CHECK(s.energy() <= 1.0 + 1e-9);
  CHECK(s.energy() > 0.0);
}

TEST_CASE("PDE write matches the analytic profile and converges at second order") {
  const auto p = params(4, 10);
  const auto in = constant_input(p);
  const double fine = relative_l2(write_analytic(in, p, 2000).b, pde_write(in, p, 2000, 2000).b_final);
  CHECK(fine <= 1e-3);
  const double coarse = relative_l2(write_analytic(in, p, 1000).b, pde_write(in, p, 1000, 1000).b_final);
  CHECK(coarse / fine >= 3.0);
}

TEST_CASE("energy budget is closed during write and read") {
  const auto p = params(4, 10);
  const auto w = pde_write(constant_input(p), p, 1000, 1000);
  CHECK(w.budget.relative_residual() <= 1e-3);
  CHECK(w.budget.stored_final == doctest::Approx(w.stored().energy()).epsilon(1e-3));
  const auto r = pde_read(w.stored(), p, 1000, 1000);
  CHECK(r.budget.relative_residual() <= 1e-3);
  CHECK(r.budget.input == 0.0);
}

TEST_CASE("read phase: trivial cases and PDE cross-check") {
  const auto p = params(4, 10);
  StoredProfile zero{std::vector<double>(101), std::vector<cplx>(101)};
  for (int j = 0; j <= 100; ++j) zero.z[static_cast<std::size_t>(j)] = j / 100.0;
  const std::vector<double> times{0.0, 0.5 / kGammaS, 2.0 / kGammaS};
  for (const auto& v : read_analytic(zero, p, times).values) CHECK(v == cplx(0.0));

  // Narrow bump at the exit face: a_out ~ -sqrt(d gamma_s) e^{-gamma_s t} * integral.
  StoredProfile bump = zero;
  const std::size_t n = 40001;
  bump.z.resize(n);
  bump.b.assign(n, cplx(0.0));
  for (std::size_t j = 0; j < n; ++j) {
    bump.z[j] = static_cast<double>(j) / (n - 1);
    const double x = (1.0 - bump.z[j]) / 1e-3;
    bump.b[j] = std::exp(-x * x);
  }
  const double mass = 0.5 * std::sqrt(std::numbers::pi) * 1e-3;
  for (double tau : {0.0, 0.001, 0.005}) {
    const std::vector<double> t{tau / kGammaS};
    const auto out = read_analytic(bump, p, t).values[0];
    const double expected = -std::sqrt(4.0 * kGammaS) * std::exp(-tau) * mass;
    CHECK(std::abs(out.real() / expected - 1.0) < 1e-3);
  }

  const auto stored = write_analytic(constant_input(p), p, 2000);
  const auto pde = pde_read(stored, p, 2000, 2000);
  const auto exact = read_analytic(stored, p, pde.t);
  CHECK(relative_l2(exact.values, pde.a_out) <= 1e-3);
}

TEST_CASE("coarse PDE steps warn") {
  std::vector<std::string> seen;
  auto previous = set_warning_handler([&](const std::string& m) { seen.push_back(m); });
  pde_write(constant_input(params(4, 10)), params(4, 10), 20, 50);
  set_warning_handler(previous);
  CHECK(seen.size() == 1);
}

TEST_CASE("field snapshots export") {
  const auto p = params(2, 5);
  const auto g = pde_write(constant_input(p), p, 11, 21, PdeOptions{10, 5});
  CHECK(g.a.rows() == 3);
  CHECK(g.a.cols() == 3);
  std::ostringstream os;
  g.write_csv(os);
  const std::string text = os.str();
  CHECK(text.rfind("z,t,re_a,im_a,re_b,im_b\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);
}

TEST_CASE("retrieval stops early once the output has decayed") {
  const auto p = params(4, 10);
  const auto s = write_analytic(constant_input(p), p, 1000);
  const auto full = retrieve_analytic(s, p, 500, ReadControl{5.0, 0.0});
  const auto early = retrieve_analytic(s, p, 500, ReadControl{5.0, 1e-4});
  CHECK(full.t.back() == doctest::Approx(5.0 * p.T()));
  CHECK(early.t.size() < full.t.size());
  CHECK(early.energy() == doctest::Approx(full.energy()).epsilon(1e-3));
}

TEST_CASE("transfer function on the analytic path") {
  const auto p = params(4, 40);
  const std::vector<double> freqs{0.0, 0.1 * kGammaS};
  const auto g = transfer_function_estimate(p, freqs, options(DynamicsPath::Analytic, 2000, 2000));
  const double k0 = std::abs(kernel(p, 0.0));
  CHECK(std::abs(std::abs(g[0].gain) - 0.9817) <= 0.005);
  CHECK(std::abs(std::abs(g[0].gain) / k0 - 1.0) <= 0.005);
  CHECK(std::abs(std::norm(g[1].gain) / (k0 * k0) - 1.0016) <= 0.001);
  const double ratio = std::norm(g[1].gain) / std::norm(g[0].gain);
  const double expected = std::norm(kernel(p, 0.1 * kGammaS)) / (k0 * k0);
  CHECK(std::abs(ratio / expected - 1.0) <= 1e-3);
  for (const auto& x : g) CHECK(std::abs(x.gain - x.expected) / std::abs(x.expected) <= 1e-3);

  const auto none = transfer_function_estimate(params(0, 40), freqs, options(DynamicsPath::Analytic, 200, 400));
  for (const auto& x : none) CHECK(std::abs(x.gain) == 0.0);

  const std::vector<double> too_fast{0.5 * kGammaS};
  CHECK_THROWS_AS(transfer_function_estimate(p, too_fast, options(DynamicsPath::Analytic, 50, 50)),
                  PreconditionError);
}

TEST_CASE("transfer function on the PDE path") {
  const auto p = params(4, 40);
  const std::vector<double> freqs{0.0, 0.1 * kGammaS};
  const auto g = transfer_function_estimate(p, freqs, options(DynamicsPath::Pde, 1000, 4000));
  for (const auto& x : g) CHECK(std::abs(x.gain - x.expected) / std::abs(x.expected) <= 1e-3);
}

TEST_CASE("probe design is checked") {
  const auto p = params(4, 160);
  const Probe silent{[](double) { return cplx(0.0); }, {}};
  CHECK_THROWS_AS(probe_gain(p, silent, 0.0, options(DynamicsPath::Pde, 50, 2000)), ProbeDesignError);
  const Probe off_carrier = tukey_probe(0.3 * kGammaS, p.T(), 1.0);
  CHECK_THROWS_AS(probe_gain(p, off_carrier, -0.3 * kGammaS, options(DynamicsPath::Pde, 50, 2000)),
                  ProbeDesignError);
  CHECK_THROWS_AS(tukey_probe(0.0, p.T(), 0.0), ProbeDesignError);
}

TEST_CASE("linearity and stationarity of the analytic write/read") {
  const auto p = params(4, 40);
  const double w = 0.05 * kGammaS;
  const auto o = options(DynamicsPath::Analytic, 1500, 1500);
  const auto g1 = probe_gain(p, tukey_probe(w, p.T(), 0.1, 1.0), w, o);
  const auto g2 = probe_gain(p, tukey_probe(w, p.T(), 0.1, 3.7), w, o);
  CHECK(std::abs(g1.gain - g2.gain) < 1e-10);
  CHECK(std::abs(g1.retrieval_gain - g2.retrieval_gain) < 1e-10);

  // Same carrier in two shorter windows at different positions.
  auto shifted = [&](double start) {
    const double len = 0.7 * p.T(), edge = 0.05 * len;
    return Probe{[=](double t) { return tukey_window(t, start, len, 0.1) * std::polar(1.0, w * t); },
                 {start, start + edge, start + len - edge, start + len}};
  };
  const auto a = probe_gain(p, shifted(0.0), w, o);
  const auto b = probe_gain(p, shifted(0.3 * p.T()), w, o);
  CHECK(std::abs(a.gain - b.gain) < 1e-4);
  CHECK(std::abs(a.gain - a.expected) < 1e-3);
}

TEST_CASE("efficiency from full dynamics converges as the probe band narrows") {
  for (double d : {1.0, 4.0, 14.0}) {
    const double eta = efficiency(d);
    double first_err = 0.0, last_err = 0.0;
    for (double span : {10.0, 40.0, 160.0}) {
      const auto p = params(d, span);
      const int n_t = static_cast<int>(20 * span) + 1;
      const auto g = probe_gain(p, tukey_probe(0.0, p.T()), 0.0, options(DynamicsPath::Pde, 400, n_t));
      const double err = std::abs(g.response_energy / g.input_energy / eta - 1.0);
      if (span == 10.0) first_err = err;
      last_err = err;
    }
    CHECK(last_err <= 5e-3);
    CHECK(last_err <= first_err);
  }
}

TEST_CASE("narrowband energy transfer at d = 4") {
  const auto p = params(4, 160);
  const auto g = probe_gain(p, tukey_probe(0.0, p.T()), 0.0, options(DynamicsPath::Analytic, 2000, 3200));
  CHECK(std::abs(g.response_energy / g.input_energy - 0.9637) <= 0.002);
}
