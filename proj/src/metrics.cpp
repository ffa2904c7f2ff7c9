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

#include "combmem/metrics.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "combmem/errors.hpp"
#include "combmem/memory_channel.hpp"

namespace combmem {
namespace {

constexpr double kPureTol = 1e-9;

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw DomainError("efficiency eta must lie in [0, 1], got " + std::to_string(eta));
}

void check_pure_block(const CovarianceMatrix& block, const char* who) {
  if (block.mode_count() != 1)
    throw UnsupportedDimensionError(std::string(who) + ": expects a single-mode block");
  const double det = block.entries().determinant();
  if (std::abs(det - 1.0) > kPureTol)
    throw PreconditionError(std::string(who) + ": input block is not pure (det " +
                            std::to_string(det) + ")");
}

}  // namespace

double output_squeezing(double zeta_in, double eta) {
  if (!(zeta_in > 0.0)) throw DomainError("output_squeezing: zeta_in must be > 0");
  check_eta(eta);
  return eta * zeta_in + (1.0 - eta);
}

double output_purity(const CovarianceMatrix& c_in_block, double eta) {
  check_pure_block(c_in_block, "output_purity");
  check_eta(eta);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c_in_block.entries());
  // Tr(sqrt(C) diag(1, -1)) in the principal frame.
  const double contrast =
      std::sqrt(es.eigenvalues()[1]) - std::sqrt(es.eigenvalues()[0]);
  const double det_out = 1.0 + eta * (1.0 - eta) * contrast * contrast;
  return 1.0 / std::sqrt(det_out);
}

double fidelity_supermode(const CovarianceMatrix& c_in_block, double eta) {
  check_pure_block(c_in_block, "fidelity_supermode");
  check_eta(eta);
  const double excess = c_in_block.entries().trace() - 2.0;
  return 2.0 / std::sqrt(4.0 + (1.0 - eta * eta) * excess);
}

OverallFidelity overall_fidelity(std::span<const SupermodeReport> reports) {
  if (reports.empty()) throw DomainError("overall_fidelity: no supermodes");
  OverallFidelity out;
  for (const auto& r : reports) {
    out.per_mode.push_back(r.fidelity);
    out.product *= r.fidelity;
  }
  return out;
}

SupermodeReport supermode_report(int index, const CovarianceMatrix& c_in_block,
                                 double eta) {
  check_eta(eta);
  if (c_in_block.mode_count() != 1)
    throw UnsupportedDimensionError("supermode_report: expects a single-mode block");
  SupermodeReport r;
  r.index = index;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c_in_block.entries());
  r.zeta_in = es.eigenvalues()[0];
  r.zeta_out = output_squeezing(r.zeta_in, eta);
  if (std::abs(c_in_block.entries().determinant() - 1.0) <= kPureTol) {
    r.purity_out = output_purity(c_in_block, eta);
    r.fidelity = fidelity_supermode(c_in_block, eta);
  } else {
    const CovarianceMatrix out = covariance_map(c_in_block, eta);
    r.purity_out = purity(out);
    r.fidelity = gaussian_fidelity(c_in_block, out);
    r.closed_form = false;
  }
  return r;
}

std::vector<SupermodeReport> fig3_table(const std::vector<double>& zeta_in_db, double d) {
  if (zeta_in_db.empty()) throw DomainError("fig3_table: empty squeezing spectrum");
  const double eta = efficiency(d);
  std::vector<SupermodeReport> out;
  out.reserve(zeta_in_db.size());
  for (std::size_t m = 0; m < zeta_in_db.size(); ++m) {
    const CovarianceMatrix block =
        squeezed_vacuum(SqueezingSpectrum({from_db(zeta_in_db[m])}));
    out.push_back(supermode_report(static_cast<int>(m), block, eta));
  }
  return out;
}

void write_fig3_csv(std::ostream& os, std::span<const SupermodeReport> reports) {
  const auto old_precision = os.precision(17);
  os << "mode_index,zeta_in_dB,zeta_out_dB,purity,fidelity\n";
  for (const auto& r : reports)
    os << r.index << ',' << r.zeta_in_db() << ',' << r.zeta_out_db() << ','
       << r.purity_out << ',' << r.fidelity << '\n';
  os.precision(old_precision);
}

}  // namespace combmem
