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

#include "combmem/comb_modes.hpp"

#include <cmath>
#include <string>

#include "combmem/errors.hpp"

namespace combmem {
namespace {

constexpr double kOrthonormalTol = 1e-10;
constexpr double kDependenceTol = 1e-8;

void check_finite(const Eigen::VectorXcd& v) {
  if (v.size() == 0) throw DomainError("ModeVector: empty amplitude list");
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
      throw DomainError("ModeVector: non-finite amplitude at tooth " +
                        std::to_string(i));
  }
}

void check_same_range(const ModeVector& u, const ModeVector& v) {
  if (!u.same_range(v))
    throw DimensionError("mode vectors cover different tooth ranges: [" +
                         std::to_string(u.tooth_offset()) + ", +" +
                         std::to_string(u.tooth_count()) + ") vs [" +
                         std::to_string(v.tooth_offset()) + ", +" +
                         std::to_string(v.tooth_count()) + ")");
}

}  // namespace

ModeVector::ModeVector(Eigen::VectorXcd amplitudes, int tooth_offset)
    : amplitudes_(std::move(amplitudes)), tooth_offset_(tooth_offset) {
  check_finite(amplitudes_);
}

ModeVector::ModeVector(const std::vector<cplx>& amplitudes, int tooth_offset)
    : ModeVector(Eigen::Map<const Eigen::VectorXcd>(
                     amplitudes.data(),
                     static_cast<Eigen::Index>(amplitudes.size())),
                 tooth_offset) {}

ModeVector ModeVector::tooth(int index, int tooth_count, int tooth_offset) {
  if (index < 0 || index >= tooth_count)
    throw DimensionError("tooth index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(tooth_count);
  v[index] = 1.0;
  return ModeVector(std::move(v), tooth_offset);
}

bool ModeVector::same_range(const ModeVector& other) const {
  return tooth_offset_ == other.tooth_offset_ &&
         amplitudes_.size() == other.amplitudes_.size();
}

bool ModeVector::is_normalized(double tol) const {
  return std::abs(amplitudes_.squaredNorm() - 1.0) <= tol;
}

ModeVector ModeVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw DomainError("cannot normalize a zero mode vector");
  return ModeVector(amplitudes_ / n, tooth_offset_);
}

ModeBasis::ModeBasis(std::vector<ModeVector> vectors)
    : vectors_(std::move(vectors)) {
  if (vectors_.empty()) throw PreconditionError("ModeBasis: no vectors");
  for (std::size_t i = 1; i < vectors_.size(); ++i)
    check_same_range(vectors_.front(), vectors_[i]);
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    for (std::size_t j = i; j < vectors_.size(); ++j) {
      const cplx g = inner_product(vectors_[i], vectors_[j]);
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(g - expected) > kOrthonormalTol)
        throw PreconditionError("ModeBasis: vectors " + std::to_string(i) +
                                " and " + std::to_string(j) +
                                " are not orthonormal");
    }
  }
}

Eigen::MatrixXcd ModeBasis::matrix() const {
  Eigen::MatrixXcd m(tooth_count(), static_cast<Eigen::Index>(size()));
  for (std::size_t k = 0; k < size(); ++k)
    m.col(static_cast<Eigen::Index>(k)) = vectors_[k].amplitudes();
  return m;
}

Projector::Projector(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols())
    throw DimensionError("Projector: matrix is not square");
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw PreconditionError("Projector: matrix is not Hermitian");
  if ((matrix_ * matrix_ - matrix_).cwiseAbs().maxCoeff() > 1e-10)
    throw PreconditionError("Projector: matrix is not idempotent");
}

int Projector::rank() const {
  // Eigenvalues of a projector are 0 or 1, so the trace is the rank.
  return static_cast<int>(std::lround(matrix_.trace().real()));
}

cplx inner_product(const ModeVector& u, const ModeVector& v) {
  check_same_range(u, v);
  return u.amplitudes().dot(v.amplitudes());  // Eigen conjugates the lhs
}

ModeBasis gram_schmidt(std::span<const ModeVector> vectors) {
  if (vectors.empty()) throw PreconditionError("gram_schmidt: no vectors");
  std::vector<ModeVector> out;
  out.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    check_same_range(vectors.front(), vectors[i]);
    const double input_norm = vectors[i].norm();
    if (input_norm == 0.0)
      throw LinearDependenceError("gram_schmidt: input " + std::to_string(i) +
                                  " is the zero vector");
    Eigen::VectorXcd w = vectors[i].amplitudes();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : out) w -= q.amplitudes().dot(w) * q.amplitudes();
    }
    const double residual = w.norm();
    if (residual < kDependenceTol * input_norm)
      throw LinearDependenceError(
          "gram_schmidt: input " + std::to_string(i) +
          " is linearly dependent on the previous inputs (residual " +
          std::to_string(residual / input_norm) + ")");
    out.emplace_back(w / residual, vectors.front().tooth_offset());
  }
  return ModeBasis(std::move(out));
}

Projector projector_of(const ModeBasis& basis) {
  const Eigen::MatrixXcd m = basis.matrix();
  Eigen::MatrixXcd p = m * m.adjoint();
  // Remove rounding asymmetry so the Hermitian check is exact.
  p = 0.5 * (p + p.adjoint()).eval();
  return Projector(std::move(p));
}

double unitarity_defect(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a * a.adjoint() - Eigen::MatrixXcd::Identity(a.rows(), a.cols()))
      .cwiseAbs()
      .maxCoeff();
}

bool is_unitary(const Eigen::MatrixXcd& a, double tol) {
  return unitarity_defect(a) <= tol;
}

ModeBasis unitary_mix(const ModeBasis& basis, const Eigen::MatrixXcd& unitary) {
  const auto m = static_cast<Eigen::Index>(basis.size());
  if (unitary.rows() != m || unitary.cols() != m)
    throw PreconditionError("unitary_mix: unitary size does not match basis");
  if (!is_unitary(unitary, kOrthonormalTol))
    throw PreconditionError("unitary_mix: matrix is not unitary (defect " +
                            std::to_string(unitarity_defect(unitary)) + ")");
  // Columns of the mixed matrix are q_j = sum_k U_jk p_k.
  const Eigen::MatrixXcd mixed = basis.matrix() * unitary.transpose();
  std::vector<ModeVector> out;
  out.reserve(basis.size());
  for (Eigen::Index j = 0; j < m; ++j)
    out.emplace_back(Eigen::VectorXcd(mixed.col(j)), basis.tooth_offset());
  return ModeBasis(std::move(out));
}

double projector_distance(const Projector& a, const Projector& b) {
  if (a.matrix().rows() != b.matrix().rows())
    throw DimensionError("projector_distance: size mismatch");
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd random_unitary(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd z(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) z(i, j) = cplx(normal(rng), normal(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

}  // namespace combmem
