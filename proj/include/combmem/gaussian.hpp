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

#include <vector>

#include <Eigen/Dense>

#include "combmem/comb_modes.hpp"

namespace combmem {

/// Real symmetric 2M x 2M quadrature covariance in interleaved ordering
/// (S+_1, S-_1, S+_2, S-_2, ...). Vacuum is exactly the identity.
///
/// Construction symmetrizes entries that agree within 1e-12 (relative to the
/// largest entry) and rejects unphysical matrices: every symplectic
/// eigenvalue must be >= 1 - 1e-9.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(const Eigen::MatrixXd& entries);

  int mode_count() const { return static_cast<int>(entries_.rows() / 2); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  /// 2x2 block coupling modes j and k (0-based); block(m) is the marginal.
  Eigen::Matrix2d block(int j, int k) const;
  Eigen::Matrix2d block(int m) const { return block(m, m); }

 private:
  Eigen::MatrixXd entries_;
};

/// Squeezed-quadrature variances relative to vacuum; every value is > 0.
class SqueezingSpectrum {
 public:
  SqueezingSpectrum() = default;
  explicit SqueezingSpectrum(std::vector<double> values);
  static SqueezingSpectrum from_db(const std::vector<double>& db);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// 10 log10(zeta); negative means squeezed.
  std::vector<double> db() const;

 private:
  std::vector<double> values_;
};

double to_db(double variance_ratio);
double from_db(double db);

Eigen::Matrix2d rotation(double theta);

/// Interleaved symplectic form, block-diagonal in [[0, 1], [-1, 0]].
Eigen::MatrixXd symplectic_form(int mode_count);

/// Real 2M x 2M image of a complex M x M mode map a_j -> sum_k A_jk a_k.
/// Block (j, k) is [[Re A_jk, -Im A_jk], [Im A_jk, Re A_jk]]. Orthogonal
/// and symplectic when A is unitary.
Eigen::MatrixXd symplectic_embedding(const Eigen::MatrixXcd& a);

/// Permutation matrix P with (blocked) = P * (interleaved), where blocked
/// ordering lists all S+ quadratures before all S- quadratures.
Eigen::MatrixXd interleaved_to_blocked(int mode_count);
Eigen::MatrixXd to_blocked(const CovarianceMatrix& c);
CovarianceMatrix from_blocked(const Eigen::MatrixXd& blocked);

CovarianceMatrix vacuum(int mode_count);

/// Product of pure single-mode squeezed vacua; block m equals
/// R(theta_m) diag(1/zeta_m, zeta_m) R(theta_m)^T. An empty angle list means
/// all angles are zero.
CovarianceMatrix squeezed_vacuum(const SqueezingSpectrum& spectrum,
                                 const std::vector<double>& angles = {});

/// C' = S C S^T with S = symplectic_embedding(U).
CovarianceMatrix apply_mode_unitary(const CovarianceMatrix& c,
                                    const Eigen::MatrixXcd& unitary);

/// Passive lossy mode map a -> A a + (vacuum noise) for a contraction A
/// (largest singular value <= 1): C' = S C S^T + 1 - S S^T.
CovarianceMatrix apply_attenuating_map(const CovarianceMatrix& c,
                                       const Eigen::MatrixXcd& a);

/// 1 / sqrt(det C). Throws InvalidStateError for a nonpositive determinant.
double purity(const CovarianceMatrix& c);

/// Ascending symplectic eigenvalues (moduli of the spectrum of i Omega C).
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& c);

/// Eigenvalues of C below 1, ascending. Empty when nothing is squeezed.
SqueezingSpectrum squeezing_spectrum(const CovarianceMatrix& c);

struct SupermodeDecomposition {
  Eigen::MatrixXcd unitary;       // V: apply_mode_unitary(C, V) is block diagonal
  SqueezingSpectrum spectrum;     // ascending, most squeezed first
  std::vector<double> angles;     // theta_m in (-pi/2, pi/2]
};

/// Reduces a pure state to uncorrelated squeezed supermodes.
///
/// Eigen-decomposes C, pairs reciprocal eigenvalues greedily by
/// |lambda_i lambda_j - 1|, and builds the passive transform from the squeezed
/// eigenvectors u_m (the partner direction is Omega u_m). Eigenvalues
/// within 1e-9 of 1 are unsqueezed modes and get a canonical Lagrangian
/// basis; degenerate squeezed eigenspaces get a canonical basis as well,
/// so the output is deterministic. Row phases are fixed so that the largest
/// entry of each row of V is real positive; the residual phase is reported
/// as theta_m. Ties in zeta are broken by the index of the largest
/// eigenvector component.
///
/// Throws NotPureError when purity(C) < 1 - purity_tol.
SupermodeDecomposition supermode_extraction(const CovarianceMatrix& c,
                                            double purity_tol = 1e-6);

/// Uhlmann fidelity of two zero-mean single-mode Gaussian states:
/// F = 2 / (sqrt(L + D) - sqrt(D)), L = det(C1 + C2),
/// D = (det C1 - 1)(det C2 - 1). Throws UnsupportedDimensionError for
/// anything other than 2x2.
double gaussian_fidelity(const CovarianceMatrix& c1, const CovarianceMatrix& c2);

}  // namespace combmem
