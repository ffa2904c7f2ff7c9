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

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "combmem/errors.hpp"
#include "combmem/gaussian.hpp"
#include "combmem/memory_channel.hpp"
#include "test_support.hpp"

using namespace combmem;
using combmem::testing::frobenius;

namespace {

Eigen::MatrixXd diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

// --- Fock-space oracle for single-mode Uhlmann fidelity -----------------

using Mat = Eigen::MatrixXcd;

Mat annihilation(int n) {
  Mat a = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Zero-mean Gaussian state with covariance c (vacuum = identity) as a
// truncated Fock density matrix: S(xi) rho_thermal S(xi)^H.
Mat fock_state(const Eigen::Matrix2d& c, int n) {
  const int big = 2 * n;
  const double nu = std::sqrt(c.determinant());
  const double nbar = 0.5 * (nu - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c / nu);
  // Squeezed direction = eigenvector of the smaller eigenvalue e^{-2r}.
  const double r = -0.5 * std::log(es.eigenvalues()(0));
  const Eigen::Vector2d u = es.eigenvectors().col(0);
  const double phi = 2.0 * std::atan2(u(1), u(0));
  const Mat a = annihilation(big);
  const std::complex<double> xi = std::polar(r, phi);
  const Mat gen = 0.5 * (std::conj(xi) * a * a - xi * a.adjoint() * a.adjoint());
  // exp of an anti-Hermitian generator via the Hermitian eigensolver.
  Eigen::SelfAdjointEigenSolver<Mat> hs(std::complex<double>(0, 1) * gen);
  Eigen::VectorXcd phases(big);
  for (int k = 0; k < big; ++k) phases(k) = std::polar(1.0, -hs.eigenvalues()(k));
  const Mat s = hs.eigenvectors() * phases.asDiagonal() * hs.eigenvectors().adjoint();
  Mat thermal = Mat::Zero(big, big);
  for (int k = 0; k < big; ++k)
    thermal(k, k) = std::pow(nbar, k) / std::pow(nbar + 1.0, k + 1);
  if (nbar == 0.0) thermal(0, 0) = 1.0;
  Mat rho = (s * thermal * s.adjoint()).topLeftCorner(n, n);
  return rho / rho.trace();
}

Eigen::Matrix2d fock_covariance(const Mat& rho) {
  const Mat a = annihilation(static_cast<int>(rho.rows()) + 1).topLeftCorner(rho.rows(), rho.rows());
  const Mat x = a + a.adjoint();
  const Mat p = std::complex<double>(0, -1) * (a - a.adjoint());
  Eigen::Matrix2d c;
  c(0, 0) = (rho * x * x).trace().real();
  c(1, 1) = (rho * p * p).trace().real();
  c(0, 1) = c(1, 0) = 0.5 * (rho * (x * p + p * x)).trace().real();
  return c;
}

double fock_fidelity(const Mat& r1, const Mat& r2) {
  const Mat s1 = psd_sqrt(r1);
  const double t = psd_sqrt(s1 * r2 * s1).trace().real();
  return t * t;
}

}  // namespace

TEST_CASE("vacuum") {
  CHECK(vacuum(1).entries() == Eigen::MatrixXd::Identity(2, 2));
  CHECK(vacuum(3).entries() == Eigen::MatrixXd::Identity(6, 6));
  for (int m = 1; m <= 5; ++m) CHECK(purity(vacuum(m)) == 1.0);
  CHECK_THROWS_AS(vacuum(0), DomainError);
}

TEST_CASE("squeezed vacuum examples") {
  CHECK(squeezed_vacuum(SqueezingSpectrum({1.0}), {0.0}).entries() == Eigen::MatrixXd::Identity(2, 2));
  CHECK(squeezed_vacuum(SqueezingSpectrum({0.25})).entries() == diag({4, 0.25}));
  const auto c = squeezed_vacuum(SqueezingSpectrum({0.5, 0.8}), {0, 0});
  CHECK(frobenius(c.entries(), diag({2, 0.5, 1.25, 0.8})) < 1e-15);
  CHECK(std::abs(c.block(0).determinant() - 1.0) < 1e-12);
  CHECK(std::abs(c.block(1).determinant() - 1.0) < 1e-12);
  CHECK_THROWS_AS(SqueezingSpectrum({0.0}), DomainError);
  CHECK_THROWS_AS(SqueezingSpectrum({-0.3}), DomainError);
  CHECK_THROWS_AS(squeezed_vacuum(SqueezingSpectrum({0.5}), {0.0, 1.0}), DimensionError);
}

TEST_CASE("covariance validation") {
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(CovarianceMatrix{asym}, InvalidStateError);
  CHECK_THROWS_AS(CovarianceMatrix{Eigen::MatrixXd::Identity(3, 3)}, DimensionError);
  CHECK_THROWS_AS(CovarianceMatrix{diag({0.5, 0.5})}, InvalidStateError);
  CHECK_THROWS_AS(CovarianceMatrix{diag({1.0, std::nan("")})}, InvalidStateError);
}

TEST_CASE("dB conversion") {
  CHECK(from_db(-6.0) == doctest::Approx(0.251188643150958).epsilon(1e-14));
  CHECK(1.0 / from_db(-6.0) == doctest::Approx(3.981071705535).epsilon(1e-12));
  CHECK(to_db(from_db(-3.7)) == doctest::Approx(-3.7).epsilon(1e-14));
}

TEST_CASE("apply_mode_unitary examples") {
  const auto c = squeezed_vacuum(SqueezingSpectrum({0.3, 0.6}), {0.2, 1.1});
  CHECK(frobenius(apply_mode_unitary(c, Eigen::MatrixXcd::Identity(2, 2)).entries(), c.entries()) < 1e-15);
  Eigen::MatrixXcd phase(1, 1);
  phase(0, 0) = std::polar(1.0, 0.7);
  CHECK(frobenius(apply_mode_unitary(vacuum(1), phase).entries(), Eigen::MatrixXd::Identity(2, 2)) < 1e-15);

  const CovarianceMatrix pair(diag({4, 0.25, 0.25, 4}));
  Eigen::MatrixXcd bs(2, 2);
  bs << 1, 1, 1, -1;
  bs /= std::sqrt(2.0);
  const auto epr = apply_mode_unitary(pair, bs);
  const auto nu = symplectic_eigenvalues(epr.entries());
  CHECK(std::abs(nu[0] - 1.0) < 1e-10);
  CHECK(std::abs(nu[1] - 1.0) < 1e-10);
  // Marginals of an EPR pair are thermal.
  CHECK(epr.block(0)(0, 0) == doctest::Approx(2.125));
  CHECK(std::abs(epr.block(0)(0, 1)) < 1e-15);

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2) * 1.1;
  CHECK_THROWS_AS(apply_mode_unitary(pair, bad), PreconditionError);
}

TEST_CASE("symplectic embeddings of random unitaries") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 5;
    const Eigen::MatrixXcd u = random_unitary(m, rng);
    const Eigen::MatrixXd s = symplectic_embedding(u);
    const Eigen::MatrixXd omega = symplectic_form(m);
    CHECK(std::abs(s.determinant() - 1.0) < 1e-10);
    CHECK((s.transpose() * omega * s - omega).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((s.transpose() * s - Eigen::MatrixXd::Identity(2 * m, 2 * m)).cwiseAbs().maxCoeff() < 1e-10);
    const auto c = combmem::testing::random_pure_state(m, rng);
    const auto mixed = covariance_map(c, 0.7);
    CHECK(std::abs(purity(apply_mode_unitary(mixed, u)) - purity(mixed)) < 1e-10);
  }
}

TEST_CASE("blocked ordering round trip") {
  std::mt19937_64 rng(8);
  const auto c = combmem::testing::random_pure_state(3, rng);
  CHECK(frobenius(from_blocked(to_blocked(c)).entries(), c.entries()) < 1e-15);
  const Eigen::MatrixXd b = to_blocked(c);
  CHECK(b(0, 3) == c(0, 1));  // x_1 p_1
  CHECK(b(1, 4) == c(2, 3));  // x_2 p_2
}

TEST_CASE("purity examples") {
  CHECK(purity(vacuum(2)) == 1.0);
  CHECK(purity(CovarianceMatrix(diag({4, 0.25}))) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(purity(CovarianceMatrix(diag({2, 1}))) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("squeezing spectrum examples") {
  CHECK(squeezing_spectrum(vacuum(3)).empty());
  const auto s = squeezing_spectrum(CovarianceMatrix(diag({4, 0.25})));
  REQUIRE(s.size() == 1);
  CHECK(s[0] == doctest::Approx(0.25));
  const double z = from_db(-6.0);
  const auto out = covariance_map(CovarianceMatrix(diag({1.0 / z, z})), efficiency(4.0));
  const auto so = squeezing_spectrum(out);
  REQUIRE(so.size() == 1);
  CHECK(so[0] == doctest::Approx(0.27836736174).epsilon(1e-10));
}

TEST_CASE("pure states have reciprocal eigenvalue pairs") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 1 + trial % 6;
    const auto c = combmem::testing::random_pure_state(m, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.entries());
    const Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < m; ++i)
      CHECK(std::abs(ev(i) * ev(2 * m - 1 - i) - 1.0) < 1e-8);
  }
}

TEST_CASE("supermode extraction examples") {
  const auto product = squeezed_vacuum(SqueezingSpectrum({0.3, 0.6}), {0.0, 0.0});
  const auto dec = supermode_extraction(product);
  CHECK(dec.spectrum[0] == doctest::Approx(0.3));
  CHECK(dec.spectrum[1] == doctest::Approx(0.6));
  CHECK((dec.unitary.cwiseAbs() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);

  const double z = from_db(-6.0);
  const auto sq = squeezed_vacuum(SqueezingSpectrum({z, z}), {0.0, std::numbers::pi / 2});
  Eigen::MatrixXcd bs(2, 2);
  bs << 1, 1, 1, -1;
  bs /= std::sqrt(2.0);
  const auto epr = apply_mode_unitary(sq, bs);
  const auto e = supermode_extraction(epr);
  CHECK(e.spectrum[0] == doctest::Approx(0.25119).epsilon(1e-5));
  CHECK(e.spectrum[1] == doctest::Approx(0.25119).epsilon(1e-5));
  CHECK((e.unitary.cwiseAbs() - Eigen::MatrixXd::Constant(2, 2, 1.0 / std::sqrt(2.0))).cwiseAbs().maxCoeff() < 1e-8);
  const auto blocks = apply_mode_unitary(epr, e.unitary);
  CHECK(blocks.block(0, 1).cwiseAbs().maxCoeff() < 1e-8);
  for (int m = 0; m < 2; ++m) {
    const Eigen::Matrix2d expected = rotation(e.angles[static_cast<std::size_t>(m)]) *
                                     Eigen::Vector2d(1.0 / e.spectrum[m], e.spectrum[m]).asDiagonal() *
                                     rotation(e.angles[static_cast<std::size_t>(m)]).transpose();
    CHECK((blocks.block(m) - expected).norm() < 1e-8);
  }

  const auto v = supermode_extraction(vacuum(3));
  for (std::size_t m = 0; m < 3; ++m) CHECK(v.spectrum[m] == doctest::Approx(1.0));
  CHECK((v.unitary - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(supermode_extraction(CovarianceMatrix(diag({2, 1}))), NotPureError);
}

TEST_CASE("supermode extraction is deterministic for degenerate spectra") {
  std::mt19937_64 rng(3);
  const double z = from_db(-4.0);
  const auto base = squeezed_vacuum(SqueezingSpectrum({z, z, z}));
  const auto c = apply_mode_unitary(base, random_unitary(3, rng));
  const auto a = supermode_extraction(c);
  const auto b = supermode_extraction(CovarianceMatrix(c.entries()));
  CHECK((a.unitary - b.unitary).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("supermode round trip on random pure states") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + trial % 6;
    const auto c = combmem::testing::random_pure_state(m, rng);
    const auto dec = supermode_extraction(c);
    for (std::size_t k = 1; k < dec.spectrum.size(); ++k)
      CHECK(dec.spectrum[k - 1] <= dec.spectrum[k]);
    const auto rebuilt =
        apply_mode_unitary(squeezed_vacuum(dec.spectrum, dec.angles), dec.unitary.adjoint());
    CHECK(frobenius(rebuilt.entries(), c.entries()) < 1e-8);
  }
}

TEST_CASE("gaussian fidelity basics") {
  CHECK(gaussian_fidelity(vacuum(1), vacuum(1)) == doctest::Approx(1.0).epsilon(1e-15));
  const auto sq = squeezed_vacuum(SqueezingSpectrum({0.2}), {0.4});
  CHECK(gaussian_fidelity(sq, sq) == doctest::Approx(1.0).epsilon(1e-12));
  const auto in = CovarianceMatrix(diag({4, 0.25}));
  CHECK(gaussian_fidelity(in, covariance_map(in, efficiency(4.0))) > 0.98);
  CHECK_THROWS_AS(gaussian_fidelity(vacuum(2), vacuum(2)), UnsupportedDimensionError);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = covariance_map(combmem::testing::random_squeezed_block(rng), u(rng));
    const auto b = covariance_map(combmem::testing::random_squeezed_block(rng), u(rng));
    const double fab = gaussian_fidelity(a, b);
    CHECK(std::abs(fab - gaussian_fidelity(b, a)) < 1e-12);
    CHECK(fab > 0.0);
    CHECK(fab <= 1.0 + 1e-12);
    CHECK(std::abs(gaussian_fidelity(a, a) - 1.0) < 1e-10);
    if (frobenius(a.entries(), b.entries()) > 1e-3) CHECK(fab < 1.0 - 1e-10);
  }
}

TEST_CASE("gaussian fidelity matches a Fock-space Uhlmann computation") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 70;
  for (int trial = 0; trial < 6; ++trial) {
    const auto in = combmem::testing::random_squeezed_block(rng, 0.7);
    const auto out = covariance_map(in, 0.2 + 0.8 * u(rng));
    const Mat r_in = fock_state(in.block(0), n);
    const Mat r_out = fock_state(out.block(0), n);
    CHECK((fock_covariance(r_in) - in.block(0)).norm() < 1e-7);
    CHECK((fock_covariance(r_out) - out.block(0)).norm() < 1e-7);
    CHECK(std::abs(fock_fidelity(r_in, r_out) - gaussian_fidelity(in, out)) < 1e-7);
  }
}
