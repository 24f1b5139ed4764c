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

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ionsim/error.hpp"
#include "ionsim/linalg.hpp"
#include "ionsim/quantum_state.hpp"
#include "ionsim/schedule.hpp"
#include "ionsim/spin_system.hpp"

namespace ionsim {

/// Two-qubit density matrix in the basis |s_i s_j>, spin i first.
struct TwoQubitState {
  ComplexMatrix rho;
  int first = 0;
  int second = 1;
};

namespace detail {
inline void check_pair(int i, int j, int spins) {
  require(i >= 0 && j >= 0 && i < spins && j < spins, ErrorCode::kDimension,
          "spin index out of range");
  require(i < j, ErrorCode::kInvalidArgument, "pair indices must satisfy i < j");
}

inline Eigen::Index pair_index(std::size_t s, std::size_t mi, std::size_t mj) {
  return static_cast<Eigen::Index>(((s & mi) ? 2 : 0) + ((s & mj) ? 1 : 0));
}
}  // namespace detail

inline TwoQubitState reduced_density(const PureState& psi, int i, int j) {
  const int n = spin_count(psi);
  detail::check_pair(i, j, n);
  const auto mi = spin_mask(i, n), mj = spin_mask(j, n);
  const auto dim = static_cast<std::size_t>(psi.size());
  ComplexMatrix r = ComplexMatrix::Zero(4, 4);
  // Pair every basis state with the ones sharing its other spins.
  for (std::size_t s = 0; s < dim; ++s) {
    const std::size_t rest = s & ~(mi | mj);
    const std::size_t partners[4] = {rest, rest | mj, rest | mi, rest | mi | mj};
    const auto a = detail::pair_index(s, mi, mj);
    for (std::size_t b = 0; b < 4; ++b)
      r(a, static_cast<Eigen::Index>(b)) +=
          psi(static_cast<Eigen::Index>(s)) *
          std::conj(psi(static_cast<Eigen::Index>(partners[b])));
  }
  return {r, i, j};
}

inline TwoQubitState reduced_density(const DensityMatrix& rho, int i, int j) {
  require(rho.rows() == rho.cols(), ErrorCode::kDimension, "density matrix must be square");
  const int n = spin_count(rho);
  detail::check_pair(i, j, n);
  const auto mi = spin_mask(i, n), mj = spin_mask(j, n);
  const auto dim = static_cast<std::size_t>(rho.rows());
  ComplexMatrix r = ComplexMatrix::Zero(4, 4);
  for (std::size_t s = 0; s < dim; ++s) {
    const std::size_t rest = s & ~(mi | mj);
    const std::size_t partners[4] = {rest, rest | mj, rest | mi, rest | mi | mj};
    const auto a = detail::pair_index(s, mi, mj);
    for (std::size_t b = 0; b < 4; ++b)
      r(a, static_cast<Eigen::Index>(b)) +=
          rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(partners[b]));
  }
  return {r, i, j};
}

/// Wootters concurrence max(0, l1 - l2 - l3 - l4) with l_k the square roots
/// of the eigenvalues of sqrt(rho) rho~ sqrt(rho), rho~ = (Y x Y) rho* (Y x Y).
/// The l_k are taken as singular values of sqrt(rho) sqrt(rho~), which keeps
/// rank-deficient states accurate.
inline double concurrence(const ComplexMatrix& rho, double tolerance = 1e-9) {
  require(rho.rows() == 4 && rho.cols() == 4, ErrorCode::kDimension,
          "concurrence needs a 4x4 density matrix");
  const ComplexMatrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  require(eig.info() == Eigen::Success, ErrorCode::kEigenSolver, "eigendecomposition failed");
  RealVector p = eig.eigenvalues();
  if (p.minCoeff() < -tolerance)
    warn("two-qubit state has eigenvalue " + std::to_string(p.minCoeff()) + "; clipped to zero");
  // Rounding-level eigenvalues would otherwise enter through their square root.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, p.maxCoeff());
  p = (p.array() > noise).select(p, 0.0);
  const ComplexMatrix root =
      eig.eigenvectors() * p.cwiseSqrt().cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
  // Y x Y is real: the antidiagonal (-1, 1, 1, -1).
  ComplexMatrix yy = ComplexMatrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const ComplexMatrix flipped_root = yy * root.conjugate() * yy;
  Eigen::JacobiSVD<ComplexMatrix> svd(root * flipped_root);
  const RealVector l = svd.singularValues();  // descending
  return std::clamp(l(0) - l(1) - l(2) - l(3), 0.0, 1.0);
}

inline double concurrence(const TwoQubitState& s) { return concurrence(s.rho); }

template <QuantumState S>
double end_to_end_concurrence(const S& state) {
  const int n = spin_count(state);
  if (n < 2) return 0.0;
  return concurrence(reduced_density(state, 0, n - 1));
}

inline double fidelity(const PureState& psi, const PureState& ref) {
  require(psi.size() == ref.size(), ErrorCode::kDimension, "state dimensions differ");
  return std::clamp(std::norm(ref.dot(psi)), 0.0, 1.0);
}

inline double fidelity(const DensityMatrix& rho, const PureState& ref) {
  require(rho.rows() == ref.size() && rho.cols() == ref.size(), ErrorCode::kDimension,
          "state dimensions differ");
  return std::clamp(ref.dot(rho * ref).real(), 0.0, 1.0);
}

/// Weight of the state inside the span of the orthonormal columns of `space`.
inline double subspace_fidelity(const PureState& psi, const ComplexMatrix& space) {
  require(psi.size() == space.rows(), ErrorCode::kDimension, "state dimensions differ");
  return std::clamp((space.adjoint() * psi).squaredNorm(), 0.0, 1.0);
}

inline double subspace_fidelity(const DensityMatrix& rho, const ComplexMatrix& space) {
  require(rho.rows() == space.rows(), ErrorCode::kDimension, "state dimensions differ");
  return std::clamp((space.adjoint() * rho * space).trace().real(), 0.0, 1.0);
}

struct ObservableRow {
  double time = 0.0;
  double alpha = 0.0;
  double field = 0.0;
  double beta = 1.0;
  double fidelity = 0.0;
  double concurrence = 0.0;
  double gap = 0.0;
  bool degenerate = false;
  double dephasing_rate = 0.0;
};

/// Per sample: fidelity with the ground state of H_eff(alpha, b, beta),
/// concurrence of the end spins and the instantaneous gap. A degenerate
/// ground level is scored with its projector.
template <QuantumState S>
std::vector<ObservableRow> trajectory_observables(const Trajectory<S>& traj,
                                                  const RealMatrix& couplings) {
  std::vector<ObservableRow> rows;
  rows.reserve(traj.size());
  for (const auto& s : traj.samples) {
    const auto gs = ground_state(build_effective({couplings, s.field, s.alpha, s.beta}));
    ObservableRow row;
    row.time = s.time;
    row.alpha = s.alpha;
    row.field = s.field;
    row.beta = s.beta;
    row.degenerate = gs.degenerate;
    row.fidelity = gs.degenerate ? subspace_fidelity(s.state, gs.ground_space)
                                 : fidelity(s.state, gs.state);
    row.concurrence = end_to_end_concurrence(s.state);
    row.gap = gs.gap;
    row.dephasing_rate = traj.dephasing_rate;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ionsim
