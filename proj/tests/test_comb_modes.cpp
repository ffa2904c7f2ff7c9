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
#include <random>

#include "combmem/comb_modes.hpp"
#include "combmem/errors.hpp"
#include "test_support.hpp"

using namespace combmem;

namespace {

ModeVector mv(std::initializer_list<cplx> a, int offset = 0) {
  return ModeVector(std::vector<cplx>(a), offset);
}

const cplx I(0.0, 1.0);

}  // namespace

TEST_CASE("inner products") {
  CHECK(inner_product(mv({1, 0, 0}), mv({1, 0, 0})) == cplx(1.0));
  CHECK(inner_product(mv({1, 0}), mv({0, 1})) == cplx(0.0));
  // Term by term: conj(1)*1 + conj(i)*(-i) = 1 + (-i)(-i) = 1 - 1 = 0.
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(inner_product(mv({s, I * s}), mv({s, -I * s}))) < 1e-16);
  // Conjugate-linear in the first slot.
  CHECK(inner_product(mv({I}), mv({1})) == -I);
  CHECK_THROWS_AS(inner_product(mv({1, 0}), mv({1, 0, 0})), DimensionError);
  CHECK_THROWS_AS(inner_product(mv({1, 0}, 0), mv({1, 0}, 1)), DimensionError);
}

TEST_CASE("mode vector invariants") {
  CHECK_THROWS_AS(ModeVector(std::vector<cplx>{}), DomainError);
  CHECK_THROWS_AS(mv({std::nan(""), 0}), DomainError);
  const auto t = ModeVector::tooth(2, 5, -2);
  CHECK(t.tooth_offset() == -2);
  CHECK(t.is_normalized());
  CHECK(mv({3, 4}).normalized().amplitudes()(1) == cplx(0.8));
}

TEST_CASE("gram_schmidt examples") {
  const std::vector<ModeVector> ortho{mv({1, 0}), mv({0, 2})};
  const auto b = gram_schmidt(ortho);
  CHECK(std::abs(b[0].amplitudes()(0) - 1.0) < 1e-15);
  CHECK(std::abs(b[1].amplitudes()(1) - 1.0) < 1e-15);

  const double s = 1.0 / std::sqrt(2.0);
  const std::vector<ModeVector> tilted{mv({s, s}), mv({1, 0})};
  const auto t = gram_schmidt(tilted);
  CHECK(std::abs(inner_product(t[0], mv({s, s})) - 1.0) < 1e-14);
  CHECK(std::abs(inner_product(t[1], mv({s, -s})) - 1.0) < 1e-14);
  CHECK(std::abs(inner_product(t[0], t[1])) < 1e-15);
  const std::vector<ModeVector> canon{mv({1, 0}), mv({0, 1})};
  CHECK(projector_distance(projector_of(t), projector_of(ModeBasis(canon))) < 1e-12);

  const std::vector<ModeVector> collinear{mv({1, 0}), mv({2, 0})};
  CHECK_THROWS_AS(gram_schmidt(collinear), LinearDependenceError);
}

TEST_CASE("gram_schmidt Gram matrix is the identity for random inputs") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ModeVector> vs;
    for (int k = 0; k < 6; ++k) {
      Eigen::VectorXcd v(32);
      for (auto& x : v) x = {g(rng), g(rng)};
      vs.emplace_back(v);
    }
    const Eigen::MatrixXcd q = gram_schmidt(vs).matrix();
    CHECK((q.adjoint() * q - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("projector examples") {
  std::vector<ModeVector> full;
  for (int i = 0; i < 4; ++i) full.push_back(ModeVector::tooth(i, 4));
  const auto p = projector_of(ModeBasis(full));
  CHECK(p.matrix().isApprox(Eigen::MatrixXcd::Identity(4, 4), 1e-15));
  CHECK(p.rank() == 4);

  const std::vector<ModeVector> one{mv({1, 0, 0})};
  const auto p1 = projector_of(ModeBasis(one));
  CHECK(p1.matrix()(0, 0) == cplx(1.0));
  CHECK(p1.matrix().cwiseAbs().sum() == 1.0);

  CHECK_THROWS_AS(ModeBasis(std::vector<ModeVector>{mv({1, 0}), mv({1, 1})}), PreconditionError);
  CHECK_THROWS_AS(ModeBasis(std::vector<ModeVector>{mv({1, 0}), mv({0, 1, 0})}), DimensionError);
  Eigen::MatrixXcd not_idempotent = 2.0 * Eigen::MatrixXcd::Identity(2, 2);
  CHECK_THROWS_AS(Projector{not_idempotent}, PreconditionError);
  Eigen::MatrixXcd not_hermitian = Eigen::MatrixXcd::Zero(2, 2);
  not_hermitian(0, 1) = 1.0;
  CHECK_THROWS_AS(Projector{not_hermitian}, PreconditionError);
}

TEST_CASE("unitary_mix examples") {
  const std::vector<ModeVector> e{mv({1, 0}), mv({0, 1})};
  const ModeBasis basis(e);
  const auto same = unitary_mix(basis, Eigen::MatrixXcd::Identity(2, 2));
  CHECK(same.matrix().isApprox(basis.matrix()));

  const double s = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd rot(2, 2);
  rot << s, s, -s, s;
  const auto mixed = unitary_mix(basis, rot);
  CHECK(std::abs(mixed[0].amplitudes()(0) - s) < 1e-15);
  CHECK(std::abs(mixed[0].amplitudes()(1) - s) < 1e-15);
  CHECK(std::abs(mixed[1].amplitudes()(0) + s) < 1e-15);
  CHECK(std::abs(mixed[1].amplitudes()(1) - s) < 1e-15);
  CHECK(projector_distance(projector_of(mixed), projector_of(basis)) < 1e-15);

  Eigen::MatrixXcd stretched = Eigen::MatrixXcd::Identity(2, 2);
  stretched(0, 0) = 1.5;
  CHECK_THROWS_AS(unitary_mix(basis, stretched), PreconditionError);
  CHECK_THROWS_AS(unitary_mix(basis, Eigen::MatrixXcd::Identity(3, 3)), PreconditionError);
}

TEST_CASE("projector invariant under 100 random re-mixings") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 6;
    std::vector<ModeVector> vs;
    for (int k = 0; k < m; ++k) {
      Eigen::VectorXcd v(16);
      for (auto& x : v) x = {g(rng), g(rng)};
      vs.emplace_back(v, -8);
    }
    const ModeBasis b = gram_schmidt(vs);
    const Eigen::MatrixXcd u = random_unitary(m, rng);
    CHECK(is_unitary(u));
    const Projector p = projector_of(b);
    const Projector q = projector_of(unitary_mix(b, u));
    CHECK(projector_distance(p, q) < 1e-10);
    CHECK((q.matrix() * q.matrix() - q.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((q.matrix() - q.matrix().adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(q.rank() == m);
  }
}
