// Copyright 2026 The ionsim Authors
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

#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "ionsim/observables.hpp"
#include "ionsim/spin_system.hpp"
#include "oracles.hpp"

using namespace ionsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RealMatrix random_couplings(int n, std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  RealMatrix j = RealMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) j(a, b) = j(b, a) = u(rng);
  return j;
}

RealMatrix mirror_table(double j12, double j13, double j14, double j23) {
  RealMatrix j = RealMatrix::Zero(4, 4);
  auto set = [&](int a, int b, double v) { j(a, b) = j(b, a) = constants::kTwoPi * v; };
  set(0, 1, j12), set(2, 3, j12), set(0, 2, j13), set(1, 3, j13), set(0, 3, j14), set(1, 2, j23);
  return j;
}

}  // namespace

TEST_CASE("single spin in a z field has levels +-b/2 and ground state down") {
  RealMatrix j = RealMatrix::Zero(1, 1);
  const auto h = build_ising(Axis::kZ, 3.0, j);
  const auto g = ground_state(h);
  CHECK_THAT(g.energy, WithinAbs(-1.5, 1e-12));
  CHECK_THAT(g.gap, WithinAbs(3.0, 1e-12));
  CHECK(std::abs(g.state(1)) == 1.0);
}

TEST_CASE("two-spin zz coupling has degenerate pairs at -+J") {
  RealMatrix j(2, 2);
  j << 0.0, 2.0, 2.0, 0.0;
  const auto h = build_ising(Axis::kZ, 0.0, j);
  const RealVector d = h.diagonal().real();
  CHECK(d(0) == -2.0);
  CHECK(d(3) == -2.0);
  CHECK(d(1) == 2.0);
  CHECK(d(2) == 2.0);
  CHECK(ground_state(h).degenerate);
  CHECK(gap(h) == 0.0);
}

TEST_CASE("Ising matrices match an explicit Kronecker-product construction") {
  std::mt19937 rng(7);
  for (int n = 1; n <= 4; ++n) {
    const auto j = random_couplings(n, rng);
    for (char axis : {'x', 'z'}) {
      const auto h = build_ising(axis == 'x' ? Axis::kX : Axis::kZ, 0.7, j);
      CHECK((h - oracle::ising(axis, 0.7, j)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(hermiticity_defect(h) < 1e-12);
    }
  }
}

TEST_CASE("x Ising is the z Ising conjugated by a global pi/4 y rotation") {
  std::mt19937 rng(3);
  const auto j = random_couplings(3, rng);
  const auto r = global_y_rotation(3, constants::kPi / 4.0);
  const ComplexMatrix conj = r * build_ising(Axis::kZ, 0.4, j) * r.adjoint();
  CHECK((conj - build_ising(Axis::kX, 0.4, j)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero-field z Ising commutes with the global spin flip") {
  std::mt19937 rng(5);
  const auto j = random_couplings(4, rng);
  ComplexMatrix flip = ComplexMatrix::Identity(16, 16);
  for (int k = 0; k < 4; ++k) flip = flip * pauli('x', k, 4);
  const auto h = build_ising(Axis::kZ, 0.0, j);
  CHECK((h * flip - flip * h).norm() < 1e-12);
}

TEST_CASE("x and z Ising spectra coincide") {
  std::mt19937 rng(11);
  const auto j = random_couplings(3, rng);
  const auto a = ground_state(build_ising(Axis::kX, 0.3, j)).spectrum;
  const auto b = ground_state(build_ising(Axis::kZ, 0.3, j)).spectrum;
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("effective Hamiltonian is linear in alpha") {
  std::mt19937 rng(13);
  const auto j = random_couplings(3, rng);
  const SpinModelParams p0{j, 0.5, 0.0, 0.4};
  const SpinModelParams p1{j, 0.5, 0.6, 0.4};
  const ComplexMatrix diff = build_effective(p1) - build_effective(p0);
  CHECK((diff - 0.6 * 0.4 * build_ising(Axis::kX, 0.5, j)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((build_effective(p0) - 0.4 * build_ising(Axis::kZ, 0.5, j)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("XX limit of the effective Hamiltonian") {
  std::mt19937 rng(17);
  const auto j = random_couplings(3, rng);
  const ComplexMatrix h = build_effective({j, 0.0, 1.0, 0.5});
  ComplexMatrix expect = ComplexMatrix::Zero(8, 8);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      expect -= 0.5 * j(a, b) *
                (pauli('z', a, 3) * pauli('z', b, 3) + pauli('x', a, 3) * pauli('x', b, 3));
  CHECK((h - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ground energy and gap agree with an independent eigensolver for N <= 3") {
  std::mt19937 rng(19);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto j = random_couplings(n, rng);
      const ComplexMatrix h = build_effective({j, 0.37, 0.8, 0.6});
      const auto g = ground_state(h);
      const auto e = oracle::eigenvalues(oracle::ising('z', 0.37, j) * 0.6 +
                                         oracle::ising('x', 0.37, j) * (0.6 * 0.8));
      CHECK_THAT(g.energy, WithinAbs(e[0], 1e-10));
      if (!g.degenerate && n > 1) CHECK_THAT(g.gap, WithinAbs(e[1] - e[0], 1e-10));
    }
  }
}

TEST_CASE("dimension limit is enforced") {
  const RealMatrix j = RealMatrix::Zero(11, 11);
  try {
    build_ising(Axis::kZ, 0.0, j);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimension);
  }
}

TEST_CASE("invalid coupling matrices are rejected") {
  RealMatrix j(2, 2);
  j << 0.0, 1.0, 2.0, 0.0;
  CHECK_THROWS_AS(build_ising(Axis::kZ, 0.0, j), Error);
  j << 1.0, 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(build_ising(Axis::kZ, 0.0, j), Error);
  CHECK_THROWS_AS(build_effective({RealMatrix::Zero(2, 2), 0.0, 1.5, 1.0}), Error);
}

TEST_CASE("zero-field z Ising with couplings is degenerate") {
  const auto j = mirror_table(28.8, 22.2, 2.2, 298.8);
  CHECK(ground_state(build_ising(Axis::kZ, 0.0, j)).degenerate);
  CHECK_FALSE(ground_state(build_ising(Axis::kZ, 100.0, j)).degenerate);
}

TEST_CASE("XX ground state of the anharmonic chains has long-distance entanglement") {
  for (const auto& j : {mirror_table(28.8, 22.2, 2.2, 298.8), mirror_table(17.6, 13.8, 1.3, 351.5)}) {
    const auto g = ground_state(build_effective({j, 0.0, 1.0, 1.0}));
    REQUIRE_FALSE(g.degenerate);
    CHECK(end_to_end_concurrence(g.state) > 0.5);
  }
}

TEST_CASE("XX gap of the anharmonic chain, with beta = 100/208") {
  // Frozen from the exact diagonalisation in this repository's convention
  // (each unordered pair counted once); see the acceptance suite for the
  // comparison with the reference value.
  const auto j = mirror_table(28.8, 22.2, 2.2, 298.8);
  const double beta = 100.0 / 208.0;
  const auto g = ground_state(build_effective({j, 0.0, 1.0, beta}));
  const auto e = oracle::eigenvalues(beta * (oracle::ising('z', 0.0, j) + oracle::ising('x', 0.0, j)));
  CHECK_THAT(g.gap, WithinRel(e[1] - e[0], 1e-9));
  CHECK_THAT(g.gap / constants::kTwoPi, WithinRel(9.685, 1e-3));
}
