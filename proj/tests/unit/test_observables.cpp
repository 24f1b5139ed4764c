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
#include "ionsim/pulse_engine.hpp"
#include "oracles.hpp"

using namespace ionsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kTwoPi = constants::kTwoPi;

RealMatrix mirror_table(double j12, double j13, double j14, double j23) {
  RealMatrix j = RealMatrix::Zero(4, 4);
  auto set = [&](int a, int b, double v) { j(a, b) = j(b, a) = kTwoPi * v; };
  set(0, 1, j12), set(2, 3, j12), set(0, 2, j13), set(1, 3, j13), set(0, 3, j14), set(1, 2, j23);
  return j;
}

PureState random_state(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  PureState psi(static_cast<Eigen::Index>(hilbert_dimension(n)));
  for (Eigen::Index k = 0; k < psi.size(); ++k) psi(k) = Complex(g(rng), g(rng));
  return psi.normalized();
}

ComplexMatrix random_unitary_2(std::mt19937& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) a(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  return qr.householderQ();
}

PureState bell() {
  PureState psi = PureState::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  return psi;
}

}  // namespace

TEST_CASE("reduced density matches the Kronecker partial trace") {
  std::mt19937 rng(1);
  for (int n = 2; n <= 4; ++n) {
    const auto psi = random_state(n, rng);
    const ComplexMatrix rho = to_density(psi);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const auto expect = oracle::keep_pair(rho, i, j, n);
        CHECK((reduced_density(psi, i, j).rho - expect).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((reduced_density(DensityMatrix(rho), i, j).rho - expect).cwiseAbs().maxCoeff() < 1e-12);
      }
  }
}

TEST_CASE("reduced density of a product state is the product of its factors") {
  PureState up(2), plus(2), psi(8);
  up << 1.0, 0.0;
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  psi = oracle::kron(oracle::kron(up, plus), up);
  const auto r = reduced_density(psi, 0, 2);
  CHECK_THAT(r.rho(0, 0).real(), WithinAbs(1.0, 1e-15));
  CHECK(r.rho.cwiseAbs().sum() - 1.0 < 1e-15);
  CHECK(concurrence(r) == 0.0);
}

TEST_CASE("GHZ end spins are classically correlated") {
  PureState ghz = PureState::Zero(16);
  ghz(0) = ghz(15) = 1.0 / std::sqrt(2.0);
  const auto r = reduced_density(ghz, 0, 3);
  CHECK_THAT(r.rho(0, 0).real(), WithinAbs(0.5, 1e-15));
  CHECK_THAT(r.rho(3, 3).real(), WithinAbs(0.5, 1e-15));
  CHECK(std::abs(r.rho(0, 3)) < 1e-15);
  CHECK(end_to_end_concurrence(ghz) < 1e-12);
}

TEST_CASE("concurrence of Bell, product and Werner states") {
  CHECK_THAT(concurrence(to_density(bell())), WithinAbs(1.0, 1e-12));
  CHECK(concurrence(to_density(basis_state(2, 1))) < 1e-12);
  for (double p : {0.2, 0.5, 1.0}) {
    const ComplexMatrix w = p * to_density(bell()) + (1.0 - p) * ComplexMatrix::Identity(4, 4) / 4.0;
    CHECK_THAT(concurrence(w), WithinAbs(oracle::werner_concurrence(p), 1e-9));
  }
}

TEST_CASE("concurrence is invariant under local unitaries") {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto psi = random_state(2, rng);
    const ComplexMatrix u = oracle::kron(random_unitary_2(rng), random_unitary_2(rng));
    const ComplexMatrix rho = 0.7 * to_density(psi) + 0.3 * ComplexMatrix::Identity(4, 4) / 4.0;
    CHECK_THAT(concurrence(u * rho * u.adjoint()), WithinAbs(concurrence(rho), 1e-9));
    // Pure-state closed form 2 |ad - bc|.
    CHECK_THAT(concurrence(to_density(psi)),
               WithinAbs(2.0 * std::abs(psi(0) * psi(3) - psi(1) * psi(2)), 1e-9));
  }
}

TEST_CASE("concurrence stays inside [0, 1]") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto psi = random_state(4, rng);
    const double c = end_to_end_concurrence(psi);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
  }
}

TEST_CASE("concurrence rejects bad shapes and pair indices") {
  CHECK_THROWS_AS(concurrence(ComplexMatrix::Identity(2, 2)), Error);
  CHECK_THROWS_AS(reduced_density(bell(), 1, 0), Error);
  CHECK_THROWS_AS(reduced_density(bell(), 0, 2), Error);
}

TEST_CASE("fidelity examples") {
  std::mt19937 rng(4);
  const auto psi = random_state(3, rng);
  CHECK_THAT(fidelity(psi, psi), WithinAbs(1.0, 1e-12));
  CHECK_THAT(fidelity(PureState(Complex(0, 1) * psi), psi), WithinAbs(1.0, 1e-12));
  CHECK(fidelity(basis_state(3, 0), basis_state(3, 5)) == 0.0);
  CHECK_THAT(fidelity(maximally_mixed(3), psi), WithinAbs(1.0 / 8.0, 1e-12));
  CHECK_THAT(fidelity(to_density(psi), psi), WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(fidelity(psi, basis_state(2, 0)), Error);
}

TEST_CASE("subspace fidelity counts weight inside a degenerate level") {
  ComplexMatrix space = ComplexMatrix::Zero(4, 2);
  space(0, 0) = 1.0;
  space(3, 1) = 1.0;
  CHECK_THAT(subspace_fidelity(bell(), space), WithinAbs(1.0, 1e-15));
  CHECK_THAT(subspace_fidelity(maximally_mixed(2), space), WithinAbs(0.5, 1e-15));
}

TEST_CASE("closely spaced centre pairs entangle the end spins more strongly") {
  // Ground state at the end of the ramp: alpha = 1, b = 0.
  auto xx_concurrence = [](const RealMatrix& j) {
    return end_to_end_concurrence(ground_state(build_effective({j, 0.0, 1.0, 1.0})).state);
  };
  const double c1 = xx_concurrence(mirror_table(479, 349, 273, 457));
  const double c3 = xx_concurrence(mirror_table(17.6, 13.8, 1.3, 351.5));
  const double c4 = xx_concurrence(mirror_table(28.8, 22.2, 2.2, 298.8));
  CHECK(c3 > c1);
  CHECK(c4 > c1);
  CHECK(c3 > 0.9);
}

TEST_CASE("a static schedule keeps the initial ground state") {
  const auto j = mirror_table(28.8, 22.2, 2.2, 298.8);
  const Schedule s{kTwoPi * 100.0, 0.0, 100e-6, 1e-6, 30};
  const auto rows = trajectory_observables(effective_run(j, s), j);
  REQUIRE(rows.size() == 31);
  for (const auto& r : rows) {
    CHECK_THAT(r.fidelity, WithinAbs(1.0, 1e-8));
    CHECK_THAT(r.concurrence, WithinAbs(rows.front().concurrence, 1e-8));
  }
}

TEST_CASE("trajectory observables start at unit fidelity") {
  const auto j = mirror_table(17.6, 13.8, 1.3, 351.5);
  const Schedule s{kTwoPi * 100.0, kTwoPi * 10.0, 100e-6, 1e-6, 10};
  const auto rows = trajectory_observables(adiabatic_run(DriveContext::resonant(j), s), j);
  REQUIRE(rows.size() == 11);
  CHECK_THAT(rows.front().fidelity, WithinAbs(1.0, 1e-12));
  CHECK_FALSE(rows.front().degenerate);
  CHECK(rows.front().gap > 0.0);
  CHECK(rows.front().alpha == 0.0);
  CHECK(rows.front().field == kTwoPi * 100.0);
  for (const auto& r : rows) {
    CHECK(r.fidelity >= 0.0);
    CHECK(r.fidelity <= 1.0);
  }
}
