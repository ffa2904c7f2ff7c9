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

#include "combmem/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <regex>

#include "combmem/errors.hpp"

namespace combmem {

CovarianceMatrix linear_cluster(int mode_count, double squeezing_db) {
  if (mode_count < 1) throw DomainError("linear_cluster: need at least one mode");
  const std::vector<double> db(static_cast<std::size_t>(mode_count), squeezing_db);
  const CovarianceMatrix seed = squeezed_vacuum(SqueezingSpectrum::from_db(db));
  const Eigen::Index m = mode_count;
  Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 0; k + 1 < m; ++k) adjacency(k, k + 1) = adjacency(k + 1, k) = 1.0;
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * m, 2 * m);
  s.bottomLeftCorner(m, m) = adjacency;
  const CovarianceMatrix out = from_blocked(s * to_blocked(seed) * s.transpose());
  if (std::abs(purity(out) - 1.0) > 1e-9) throw NotPureError("linear_cluster: result is not pure");
  return out;
}

CovarianceMatrix preset_state(const std::string& name) {
  if (name == "epr") {
    const CovarianceMatrix sq =
        squeezed_vacuum(SqueezingSpectrum::from_db({-6.0, -6.0}), {0.0, std::numbers::pi / 2});
    Eigen::MatrixXcd split(2, 2);
    split << 1.0, 1.0, 1.0, -1.0;
    return apply_mode_unitary(sq, split / std::sqrt(2.0));
  }
  if (name == "cluster-linear-4") return linear_cluster(4, -6.0);
  throw ConfigError("unknown preset '" + name + "' (expected epr or cluster-linear-4)");
}

ModeBasis hermite_gauss_supermodes(int count, int tooth_count, double width_teeth) {
  if (count < 1 || count > tooth_count)
    throw DimensionError("hermite_gauss_supermodes: need 1 <= count <= tooth_count");
  const double centre = 0.5 * (tooth_count - 1);
  std::vector<ModeVector> raw;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXcd v(tooth_count);
    for (int j = 0; j < tooth_count; ++j) {
      const double x = (j - centre) / width_teeth;
      // Physicists' Hermite polynomial by recurrence.
      double h_prev = 1.0, h = 2.0 * x;
      if (k == 0) h = 1.0;
      for (int n = 1; n < k; ++n) {
        const double next = 2.0 * x * h - 2.0 * n * h_prev;
        h_prev = h;
        h = next;
      }
      v(j) = h * std::exp(-0.5 * x * x);
    }
    raw.emplace_back(v);
  }
  return gram_schmidt(raw);
}

Eigen::MatrixXcd dft_matrix(int m) {
  if (m < 1) throw DimensionError("dft_matrix: m must be positive");
  Eigen::MatrixXcd f(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(m)),
                           2.0 * std::numbers::pi * j * k / m);
  return f;
}

ModeBasis named_pump_basis(const std::string& name, const ModeBasis& supermodes,
                           std::uint64_t seed) {
  const int m = static_cast<int>(supermodes.size());
  if (name == "supermodes") return supermodes;
  if (name == "dft") return unitary_mix(supermodes, dft_matrix(m));
  static const std::regex random_re(R"(random-unitary(\((\d+)\))?)");
  std::smatch match;
  if (std::regex_match(name, match, random_re)) {
    std::mt19937_64 rng(match[2].matched ? std::stoull(match[2].str()) : seed);
    return unitary_mix(supermodes, random_unitary(m, rng));
  }
  throw ConfigError("unknown pump basis '" + name +
                    "' (expected supermodes, dft, random-unitary[(seed)] or file:PATH)");
}

}  // namespace combmem
