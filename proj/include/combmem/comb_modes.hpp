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
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace combmem {

using cplx = std::complex<double>;

/// Default number of comb teeth represented per mode vector.
inline constexpr int kDefaultToothCount = 128;

/// Complex amplitude per comb tooth, starting at tooth index `tooth_offset`.
///
/// Represents pump shapes, supermodes and signal projections alike. The
/// amplitude list is never empty and every entry is finite.
class ModeVector {
 public:
  explicit ModeVector(Eigen::VectorXcd amplitudes, int tooth_offset = 0);
  explicit ModeVector(const std::vector<cplx>& amplitudes, int tooth_offset = 0);

  /// Unit vector on a single tooth `index` (0-based within the range).
  static ModeVector tooth(int index, int tooth_count, int tooth_offset = 0);

  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  int tooth_offset() const { return tooth_offset_; }
  int tooth_count() const { return static_cast<int>(amplitudes_.size()); }
  bool same_range(const ModeVector& other) const;

  double norm() const { return amplitudes_.norm(); }
  bool is_normalized(double tol = 1e-12) const;
  ModeVector normalized() const;

 private:
  Eigen::VectorXcd amplitudes_;
  int tooth_offset_;
};

/// Orthonormal list of mode vectors over a shared tooth range.
class ModeBasis {
 public:
  /// Throws PreconditionError if the vectors are not orthonormal within
  /// 1e-10, DimensionError if their tooth ranges differ.
  explicit ModeBasis(std::vector<ModeVector> vectors);

  std::size_t size() const { return vectors_.size(); }
  const ModeVector& operator[](std::size_t i) const { return vectors_[i]; }
  auto begin() const { return vectors_.begin(); }
  auto end() const { return vectors_.end(); }
  const std::vector<ModeVector>& vectors() const { return vectors_; }

  int tooth_count() const { return vectors_.front().tooth_count(); }
  int tooth_offset() const { return vectors_.front().tooth_offset(); }

  /// N x M matrix whose columns are the basis vectors.
  Eigen::MatrixXcd matrix() const;

 private:
  std::vector<ModeVector> vectors_;
};

/// Hermitian, idempotent N x N matrix P = sum_k p_k p_k^H.
class Projector {
 public:
  explicit Projector(Eigen::MatrixXcd matrix);

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  int rank() const;

 private:
  Eigen::MatrixXcd matrix_;
};

/// sum_m conj(u_m) v_m. Throws DimensionError on mismatched tooth ranges.
cplx inner_product(const ModeVector& u, const ModeVector& v);

/// Modified Gram-Schmidt with one reorthogonalization pass. The first output
/// is parallel to the first input. Throws LinearDependenceError when a
/// residual drops below 1e-8 of its input norm.
ModeBasis gram_schmidt(std::span<const ModeVector> vectors);

Projector projector_of(const ModeBasis& basis);

/// q_j = sum_k U_jk p_k. Throws PreconditionError if U is not unitary
/// within 1e-10 or its size does not match the basis.
ModeBasis unitary_mix(const ModeBasis& basis, const Eigen::MatrixXcd& unitary);

/// Largest entry of |A A^H - 1|.
double unitarity_defect(const Eigen::MatrixXcd& a);
bool is_unitary(const Eigen::MatrixXcd& a, double tol = 1e-10);

/// Max-abs distance between two projectors of equal size.
double projector_distance(const Projector& a, const Projector& b);

/// Haar-random unitary (QR of a complex Ginibre matrix with phase fix-up).
Eigen::MatrixXcd random_unitary(int m, std::mt19937_64& rng);

}  // namespace combmem
