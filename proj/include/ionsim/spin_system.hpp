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

// Dense spin Hamiltonians in units of hbar = 1 (energies in rad/s).
//
//   H_Ising^(zeta) = (b/2) sum_j sigma_j^zeta - sum_{i<j} J_ij sigma_i^zeta sigma_j^zeta
//   H_eff          = beta [H_Ising^(z) + alpha H_Ising^(x)]
//
// Each unordered pair carries weight J_ij once (the symmetric double sum
// with a factor 1/2).

#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "ionsim/error.hpp"
#include "ionsim/linalg.hpp"
#include "ionsim/quantum_state.hpp"

namespace ionsim {

inline constexpr int kDefaultMaxSpins = 10;

enum class Axis { kX, kZ };

inline void validate_couplings(const RealMatrix& j, int max_spins = kDefaultMaxSpins) {
  require(j.rows() == j.cols(), ErrorCode::kDimension, "coupling matrix must be square");
  require(j.rows() >= 1, ErrorCode::kDimension, "need at least one spin");
  require(j.rows() <= max_spins, ErrorCode::kDimension,
          std::to_string(j.rows()) + " spins exceeds the limit of " + std::to_string(max_spins));
  const double scale = std::max(1.0, j.cwiseAbs().maxCoeff());
  require(symmetry_defect(j) <= 1e-12 * scale, ErrorCode::kInvalidArgument,
          "coupling matrix must be symmetric");
  require(j.diagonal().cwiseAbs().maxCoeff() == 0.0, ErrorCode::kInvalidArgument,
          "coupling matrix must have zero diagonal");
}

struct SpinModelParams {
  RealMatrix couplings;  // rad/s
  double field = 0.0;    // b, rad/s
  double alpha = 0.0;
  double beta = 1.0;

  int spins() const { return static_cast<int>(couplings.rows()); }

  void validate(int max_spins = kDefaultMaxSpins) const {
    validate_couplings(couplings, max_spins);
    require(alpha >= 0.0 && alpha <= 1.0, ErrorCode::kInvalidArgument,
            "alpha must lie in [0, 1]");
    require(beta > 0.0, ErrorCode::kInvalidArgument, "beta must be positive");
  }
};

/// Diagonal of H_Ising^(z) in the computational basis.
inline RealVector ising_z_diagonal(double field, const RealMatrix& j) {
  const int n = static_cast<int>(j.rows());
  const auto dim = static_cast<Eigen::Index>(hilbert_dimension(n));
  RealVector d(dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    double e = 0.0;
    for (int a = 0; a < n; ++a) {
      const double za = z_sign(s, a, n);
      e += 0.5 * field * za;
      for (int b = a + 1; b < n; ++b) e -= j(a, b) * za * z_sign(s, b, n);
    }
    d(s) = e;
  }
  return d;
}

inline ComplexMatrix build_ising(Axis axis, double field, const RealMatrix& j,
                                 int max_spins = kDefaultMaxSpins) {
  validate_couplings(j, max_spins);
  const int n = static_cast<int>(j.rows());
  const auto dim = static_cast<Eigen::Index>(hilbert_dimension(n));
  if (axis == Axis::kZ) {
    return ising_z_diagonal(field, j).cast<Complex>().asDiagonal();
  }
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    const auto us = static_cast<std::size_t>(s);
    for (int a = 0; a < n; ++a) {
      const auto ma = spin_mask(a, n);
      h(static_cast<Eigen::Index>(us ^ ma), s) += 0.5 * field;
      for (int b = a + 1; b < n; ++b)
        h(static_cast<Eigen::Index>(us ^ ma ^ spin_mask(b, n)), s) -= j(a, b);
    }
  }
  return h;
}

inline ComplexMatrix build_effective(const SpinModelParams& p, int max_spins = kDefaultMaxSpins) {
  p.validate(max_spins);
  return p.beta * (build_ising(Axis::kZ, p.field, p.couplings, max_spins) +
                   p.alpha * build_ising(Axis::kX, p.field, p.couplings, max_spins));
}

/// Single-site Pauli operator ('x', 'y' or 'z') on `spin` of `spins`.
inline ComplexMatrix pauli(char which, int spin, int spins) {
  const auto dim = static_cast<Eigen::Index>(hilbert_dimension(spins));
  const auto mask = spin_mask(spin, spins);
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    const auto us = static_cast<std::size_t>(s);
    const bool down = us & mask;
    const auto flipped = static_cast<Eigen::Index>(us ^ mask);
    switch (which) {
      case 'x': m(flipped, s) = 1.0; break;
      // sigma^y |up> = i |down>, sigma^y |down> = -i |up>.
      case 'y': m(flipped, s) = down ? -kI : kI; break;
      case 'z': m(s, s) = down ? -1.0 : 1.0; break;
      default: throw Error(ErrorCode::kInvalidArgument, "unknown Pauli operator");
    }
  }
  return m;
}

/// Product over spins of exp(-i angle sigma_j^y).
inline ComplexMatrix global_y_rotation(int spins, double angle) {
  ComplexMatrix single(2, 2);
  single << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  ComplexMatrix r = ComplexMatrix::Identity(1, 1);
  for (int k = 0; k < spins; ++k) {
    ComplexMatrix next(r.rows() * 2, r.cols() * 2);
    for (Eigen::Index a = 0; a < r.rows(); ++a)
      for (Eigen::Index b = 0; b < r.cols(); ++b) next.block(2 * a, 2 * b, 2, 2) = r(a, b) * single;
    r = std::move(next);
  }
  return r;
}

struct GroundState {
  double energy = 0.0;
  PureState state;
  ComplexMatrix ground_space;  // orthonormal columns spanning the lowest level
  double gap = 0.0;            // E_1 - E_0; zero when degenerate
  bool degenerate = false;
  RealVector spectrum;
};

/// Lowest eigenpair. Levels closer than `degeneracy_tolerance` times the
/// spectral range are treated as one level.
inline GroundState ground_state(const ComplexMatrix& h, double degeneracy_tolerance = 1e-9) {
  require(h.rows() == h.cols() && h.rows() > 0, ErrorCode::kDimension,
          "Hamiltonian must be square and non-empty");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  require(solver.info() == Eigen::Success, ErrorCode::kEigenSolver,
          "Hamiltonian eigendecomposition failed");
  const RealVector& e = solver.eigenvalues();
  GroundState g;
  g.spectrum = e;
  g.energy = e(0);
  g.state = solver.eigenvectors().col(0);
  const double range = e(e.size() - 1) - e(0);
  const double threshold = degeneracy_tolerance * range;
  Eigen::Index count = 1;
  while (count < e.size() && e(count) - e(0) <= threshold) ++count;
  g.ground_space = solver.eigenvectors().leftCols(count);
  g.degenerate = count > 1 || range == 0.0;
  g.gap = (g.degenerate || e.size() < 2) ? 0.0 : e(1) - e(0);
  return g;
}

inline double gap(const ComplexMatrix& h) { return ground_state(h).gap; }

}  // namespace ionsim
