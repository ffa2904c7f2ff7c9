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

#include "combmem/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "combmem/errors.hpp"

namespace combmem {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPhysicalTol = 1e-9;
// Eigenvalues this close to 1 belong to unsqueezed modes.
constexpr double kUnsqueezedTol = 1e-9;
// Relative gap below which squeezed eigenvalues count as degenerate.
constexpr double kDegenerateTol = 1e-9;

Eigen::MatrixXd sqrt_spd(const Eigen::MatrixXd& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
  if (es.info() != Eigen::Success)
    throw InvalidStateError("covariance eigen-decomposition failed");
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw InvalidStateError("covariance matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

// Orthonormal basis for span(Q) chosen by pivoting over the canonical axes
// in `order`: at each step the axis whose residual after projecting out the
// already chosen vectors is largest wins (first axis on ties). With
// `lagrangian` set, each chosen u is accompanied by Omega u, and only the u
// vectors are returned.
std::vector<Eigen::VectorXd> canonical_basis(const Eigen::MatrixXd& q,
                                             const std::vector<int>& order,
                                             int count, bool lagrangian,
                                             const Eigen::MatrixXd& omega) {
  const Eigen::MatrixXd proj = q * q.transpose();
  std::vector<Eigen::VectorXd> chosen;  // includes Omega u when lagrangian
  std::vector<Eigen::VectorXd> result;
  for (int step = 0; step < count; ++step) {
    Eigen::VectorXd best;
    double best_norm = -1.0;
    for (int axis : order) {
      Eigen::VectorXd r = proj.col(axis);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : chosen) r -= v.dot(r) * v;
      const double n = r.norm();
      if (n > best_norm * (1.0 + 1e-12) + 1e-14) {
        best_norm = n;
        best = r;
      }
    }
    if (best_norm <= 1e-6)
      throw NotPureError("supermode_extraction: degenerate eigenspace is not "
                         "closed under the symplectic form");
    Eigen::VectorXd u = best / best_norm;
    chosen.push_back(u);
    if (lagrangian) {
      Eigen::VectorXd w = omega * u;
      for (const auto& v : chosen) w -= v.dot(w) * v;
      chosen.push_back(w.normalized());
    }
    result.push_back(u);
  }
  return result;
}

Eigen::MatrixXcd nearest_unitary(const Eigen::MatrixXcd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double normalize_half_turn(double theta) {
  // Squeezing ellipses are invariant under theta -> theta + pi.
  theta = std::remainder(theta, std::numbers::pi);
  if (theta <= -std::numbers::pi / 2) theta += std::numbers::pi;
  return theta;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(const Eigen::MatrixXd& entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0 ||
      entries.rows() % 2 != 0)
    throw DimensionError("CovarianceMatrix: expected a nonempty 2M x 2M matrix, got " +
                         std::to_string(entries.rows()) + "x" +
                         std::to_string(entries.cols()));
  if (!entries.allFinite())
    throw InvalidStateError("CovarianceMatrix: non-finite entries");
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale)
    throw InvalidStateError("CovarianceMatrix: matrix is not symmetric");
  entries_ = 0.5 * (entries + entries.transpose());
  const auto nu = symplectic_eigenvalues(entries_);
  if (nu.front() < 1.0 - kPhysicalTol)
    throw InvalidStateError("CovarianceMatrix: unphysical state, smallest "
                            "symplectic eigenvalue " + std::to_string(nu.front()));
}

Eigen::Matrix2d CovarianceMatrix::block(int j, int k) const {
  if (j < 0 || k < 0 || j >= mode_count() || k >= mode_count())
    throw DimensionError("CovarianceMatrix::block: mode index out of range");
  return entries_.block<2, 2>(2 * j, 2 * k);
}

SqueezingSpectrum::SqueezingSpectrum(std::vector<double> values)
    : values_(std::move(values)) {
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("squeezing variance must be positive and finite, got " +
                        std::to_string(v));
  }
}

SqueezingSpectrum SqueezingSpectrum::from_db(const std::vector<double>& db) {
  std::vector<double> v;
  v.reserve(db.size());
  for (double x : db) v.push_back(combmem::from_db(x));
  return SqueezingSpectrum(std::move(v));
}

std::vector<double> SqueezingSpectrum::db() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (double v : values_) out.push_back(to_db(v));
  return out;
}

double to_db(double variance_ratio) {
  if (!(variance_ratio > 0.0)) throw DomainError("to_db: nonpositive variance");
  return 10.0 * std::log10(variance_ratio);
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }

Eigen::Matrix2d rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::MatrixXd symplectic_form(int mode_count) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * mode_count, 2 * mode_count);
  for (int m = 0; m < mode_count; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  return omega;
}

Eigen::MatrixXd symplectic_embedding(const Eigen::MatrixXcd& a) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  Eigen::MatrixXd s(2 * rows, 2 * cols);
  for (Eigen::Index j = 0; j < rows; ++j) {
    for (Eigen::Index k = 0; k < cols; ++k) {
      const double re = a(j, k).real(), im = a(j, k).imag();
      s(2 * j, 2 * k) = re;
      s(2 * j, 2 * k + 1) = -im;
      s(2 * j + 1, 2 * k) = im;
      s(2 * j + 1, 2 * k + 1) = re;
    }
  }
  return s;
}

Eigen::MatrixXd interleaved_to_blocked(int mode_count) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2 * mode_count, 2 * mode_count);
  for (int m = 0; m < mode_count; ++m) {
    p(m, 2 * m) = 1.0;
    p(mode_count + m, 2 * m + 1) = 1.0;
  }
  return p;
}

Eigen::MatrixXd to_blocked(const CovarianceMatrix& c) {
  const Eigen::MatrixXd p = interleaved_to_blocked(c.mode_count());
  return p * c.entries() * p.transpose();
}

CovarianceMatrix from_blocked(const Eigen::MatrixXd& blocked) {
  if (blocked.rows() % 2 != 0)
    throw DimensionError("from_blocked: odd dimension");
  const Eigen::MatrixXd p = interleaved_to_blocked(static_cast<int>(blocked.rows() / 2));
  return CovarianceMatrix(p.transpose() * blocked * p);
}

CovarianceMatrix vacuum(int mode_count) {
  if (mode_count < 1) throw DomainError("vacuum: mode count must be >= 1");
  return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * mode_count, 2 * mode_count));
}

CovarianceMatrix squeezed_vacuum(const SqueezingSpectrum& spectrum,
                                 const std::vector<double>& angles) {
  const int m = static_cast<int>(spectrum.size());
  if (m == 0) throw DomainError("squeezed_vacuum: empty spectrum");
  if (!angles.empty() && angles.size() != spectrum.size())
    throw DimensionError("squeezed_vacuum: " + std::to_string(angles.size()) +
                         " angles for " + std::to_string(m) + " modes");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int k = 0; k < m; ++k) {
    const double zeta = spectrum[static_cast<std::size_t>(k)];
    const Eigen::Matrix2d r = rotation(angles.empty() ? 0.0 : angles[static_cast<std::size_t>(k)]);
    c.block<2, 2>(2 * k, 2 * k) =
        r * Eigen::Vector2d(1.0 / zeta, zeta).asDiagonal() * r.transpose();
  }
  return CovarianceMatrix(c);
}

CovarianceMatrix apply_mode_unitary(const CovarianceMatrix& c,
                                    const Eigen::MatrixXcd& unitary) {
  if (unitary.rows() != c.mode_count() || unitary.cols() != c.mode_count())
    throw DimensionError("apply_mode_unitary: unitary size does not match mode count");
  if (!is_unitary(unitary, 1e-10))
    throw PreconditionError("apply_mode_unitary: matrix is not unitary (defect " +
                            std::to_string(unitarity_defect(unitary)) + ")");
  const Eigen::MatrixXd s = symplectic_embedding(unitary);
  return CovarianceMatrix(s * c.entries() * s.transpose());
}

CovarianceMatrix apply_attenuating_map(const CovarianceMatrix& c,
                                       const Eigen::MatrixXcd& a) {
  if (a.rows() != c.mode_count() || a.cols() != c.mode_count())
    throw DimensionError("apply_attenuating_map: map size does not match mode count");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  if (svd.singularValues().size() > 0 && svd.singularValues()[0] > 1.0 + 1e-12)
    throw PreconditionError("apply_attenuating_map: map amplifies (singular value " +
                            std::to_string(svd.singularValues()[0]) + ")");
  const Eigen::MatrixXd s = symplectic_embedding(a);
  const Eigen::Index n = s.rows();
  return CovarianceMatrix(s * c.entries() * s.transpose() +
                          Eigen::MatrixXd::Identity(n, n) - s * s.transpose());
}

double purity(const CovarianceMatrix& c) {
  const double det = c.entries().determinant();
  if (!(det > 0.0))
    throw InvalidStateError("purity: nonpositive covariance determinant");
  return 1.0 / std::sqrt(det);
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& c) {
  const Eigen::Index n = c.rows();
  const int m = static_cast<int>(n / 2);
  const Eigen::MatrixXd root = sqrt_spd(c);
  // i * root * Omega * root is Hermitian with spectrum {+-nu_k}.
  const Eigen::MatrixXcd h =
      cplx(0.0, 1.0) * (root * symplectic_form(m) * root).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  std::vector<double> nu;
  nu.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index i = m; i < n; ++i) nu.push_back(es.eigenvalues()[i]);
  return nu;
}

SqueezingSpectrum squeezing_spectrum(const CovarianceMatrix& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.entries(), Eigen::EigenvaluesOnly);
  std::vector<double> zeta;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lambda = es.eigenvalues()[i];
    if (lambda < 1.0 - kUnsqueezedTol) zeta.push_back(lambda);
  }
  return SqueezingSpectrum(std::move(zeta));
}

SupermodeDecomposition supermode_extraction(const CovarianceMatrix& c,
                                            double purity_tol) {
  const double p = purity(c);
  if (p < 1.0 - purity_tol)
    throw NotPureError("supermode_extraction: purity " + std::to_string(p) +
                       " is below 1 - " + std::to_string(purity_tol));
  const int m = c.mode_count();
  const Eigen::Index n = 2 * m;
  const Eigen::MatrixXd omega = symplectic_form(m);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.entries());
  const Eigen::VectorXd& lambda = es.eigenvalues();  // ascending
  const Eigen::MatrixXd& vecs = es.eigenvectors();

  // Greedy reciprocal pairing: the smallest unpaired eigenvalue takes the
  // partner minimizing |lambda_i lambda_j - 1|.
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::vector<int> squeezed;   // eigen-indices of squeezed directions
  std::vector<int> unsqueezed; // eigen-indices near 1 (both members of pairs)
  for (Eigen::Index i = 0; i < n; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    used[static_cast<std::size_t>(i)] = true;
    Eigen::Index partner = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double mismatch = std::abs(lambda[i] * lambda[j] - 1.0);
      if (mismatch < best) {
        best = mismatch;
        partner = j;
      }
    }
    used[static_cast<std::size_t>(partner)] = true;
    if (lambda[i] >= 1.0 - kUnsqueezedTol) {
      unsqueezed.push_back(static_cast<int>(i));
      unsqueezed.push_back(static_cast<int>(partner));
    } else {
      squeezed.push_back(static_cast<int>(i));
    }
  }

  // Squeezed directions, grouped into degenerate clusters (ascending order).
  std::vector<Eigen::VectorXd> directions;
  std::vector<int> interleaved_order(static_cast<std::size_t>(n));
  std::iota(interleaved_order.begin(), interleaved_order.end(), 0);
  for (std::size_t start = 0; start < squeezed.size();) {
    std::size_t stop = start + 1;
    while (stop < squeezed.size() &&
           lambda[squeezed[stop]] - lambda[squeezed[start]] <=
               kDegenerateTol * lambda[squeezed[start]])
      ++stop;
    if (stop - start == 1) {
      directions.push_back(vecs.col(squeezed[start]));
    } else {
      Eigen::MatrixXd q(n, static_cast<Eigen::Index>(stop - start));
      for (std::size_t k = start; k < stop; ++k)
        q.col(static_cast<Eigen::Index>(k - start)) = vecs.col(squeezed[k]);
      for (auto& u : canonical_basis(q, interleaved_order,
                                     static_cast<int>(stop - start), false, omega))
        directions.push_back(std::move(u));
    }
    start = stop;
  }
  if (!unsqueezed.empty()) {
    Eigen::MatrixXd q(n, static_cast<Eigen::Index>(unsqueezed.size()));
    for (std::size_t k = 0; k < unsqueezed.size(); ++k)
      q.col(static_cast<Eigen::Index>(k)) = vecs.col(unsqueezed[k]);
    // Prefer S- axes so that vacuum modes map to the identity unitary.
    std::vector<int> order;
    for (int k = 0; k < m; ++k) order.push_back(2 * k + 1);
    for (int k = 0; k < m; ++k) order.push_back(2 * k);
    for (auto& u : canonical_basis(q, order, static_cast<int>(unsqueezed.size() / 2),
                                   true, omega))
      directions.push_back(std::move(u));
  }

  // Row m of V reads the squeezed quadrature u_m as S-' and Omega u_m as S+'.
  Eigen::MatrixXcd v(m, m);
  for (int r = 0; r < m; ++r) {
    const Eigen::VectorXd& u = directions[static_cast<std::size_t>(r)];
    for (int k = 0; k < m; ++k) v(r, k) = cplx(u[2 * k + 1], u[2 * k]);
  }
  v = nearest_unitary(v);

  // Phase convention: the largest entry of each row is real positive.
  std::vector<int> pivot(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    int arg = 0;
    for (int k = 1; k < m; ++k)
      if (std::abs(v(r, k)) > std::abs(v(r, arg)) * (1.0 + 1e-12) + 1e-15) arg = k;
    pivot[static_cast<std::size_t>(r)] = arg;
    v.row(r) *= std::polar(1.0, -std::arg(v(r, arg)));
  }

  const Eigen::MatrixXd s = symplectic_embedding(v);
  const Eigen::MatrixXd diag = s * c.entries() * s.transpose();
  std::vector<double> zeta(static_cast<std::size_t>(m)), theta(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    const Eigen::Matrix2d b = diag.block<2, 2>(2 * r, 2 * r);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> bs(b);
    zeta[static_cast<std::size_t>(r)] = bs.eigenvalues()[0];
    const Eigen::Vector2d anti = bs.eigenvectors().col(1);
    theta[static_cast<std::size_t>(r)] =
        bs.eigenvalues()[1] - bs.eigenvalues()[0] < 1e-12
            ? 0.0
            : normalize_half_turn(std::atan2(anti[1], anti[0]));
  }

  // Most squeezed first; ties broken by the largest eigenvector component.
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    const double za = zeta[static_cast<std::size_t>(a)], zb = zeta[static_cast<std::size_t>(b)];
    if (std::abs(za - zb) > 1e-10 * std::max(za, zb)) return za < zb;
    return pivot[static_cast<std::size_t>(a)] < pivot[static_cast<std::size_t>(b)];
  });

  SupermodeDecomposition out;
  out.unitary.resize(m, m);
  std::vector<double> sorted_zeta;
  for (int r = 0; r < m; ++r) {
    const int src = perm[static_cast<std::size_t>(r)];
    out.unitary.row(r) = v.row(src);
    sorted_zeta.push_back(zeta[static_cast<std::size_t>(src)]);
    out.angles.push_back(theta[static_cast<std::size_t>(src)]);
  }
  out.spectrum = SqueezingSpectrum(std::move(sorted_zeta));
  return out;
}

double gaussian_fidelity(const CovarianceMatrix& c1, const CovarianceMatrix& c2) {
  if (c1.mode_count() != 1 || c2.mode_count() != 1)
    throw UnsupportedDimensionError(
        "gaussian_fidelity: only single-mode (2x2) states are supported");
  const double lam = (c1.entries() + c2.entries()).determinant();
  // det C - 1 below the rounding floor of the determinant counts as pure.
  const auto excess = [](const CovarianceMatrix& c) {
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * c.entries().squaredNorm();
    const double e = c.entries().determinant() - 1.0;
    return std::abs(e) <= floor ? 0.0 : e;
  };
  const double delta = std::max(0.0, excess(c1) * excess(c2));
  // 2 / (sqrt(L + D) - sqrt(D)) rewritten without the cancellation.
  return 2.0 * (std::sqrt(lam + delta) + std::sqrt(delta)) / lam;
}

}  // namespace combmem
