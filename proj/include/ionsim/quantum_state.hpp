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

// States of N qubits in the sigma^z eigenbasis, tensor order spin 0 (x)
// spin 1 (x) ... Spin j is bit (N-1-j) of the basis index; bit value 0 is
// spin up (sigma^z = +1), 1 is spin down.
//
// Pure states are plain vectors and mixed states plain matrices, so
// templates over the state type cover both.

#pragma once

#include <bit>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>

#include "ionsim/error.hpp"
#include "ionsim/linalg.hpp"

namespace ionsim {

using PureState = ComplexVector;
using DensityMatrix = ComplexMatrix;

template <class S>
concept QuantumState = std::same_as<S, PureState> || std::same_as<S, DensityMatrix>;

inline std::size_t hilbert_dimension(int spins) { return std::size_t{1} << spins; }

/// N for a 2^N-dimensional space; throws if the dimension is not a power of two.
inline int spins_for_dimension(Eigen::Index dim) {
  require(dim > 0 && std::has_single_bit(static_cast<std::size_t>(dim)), ErrorCode::kDimension,
          "state dimension " + std::to_string(dim) + " is not a power of two");
  return std::countr_zero(static_cast<std::size_t>(dim));
}

template <QuantumState S>
int spin_count(const S& state) {
  return spins_for_dimension(state.rows());
}

inline std::size_t spin_mask(int spin, int spins) {
  return std::size_t{1} << (spins - 1 - spin);
}

/// +1 if `spin` is up in basis state `index`, -1 if down.
inline double z_sign(std::size_t index, int spin, int spins) {
  return (index & spin_mask(spin, spins)) ? -1.0 : 1.0;
}

inline PureState basis_state(int spins, std::size_t index) {
  PureState psi = PureState::Zero(static_cast<Eigen::Index>(hilbert_dimension(spins)));
  psi(static_cast<Eigen::Index>(index)) = 1.0;
  return psi;
}

inline PureState all_down(int spins) { return basis_state(spins, hilbert_dimension(spins) - 1); }

inline DensityMatrix to_density(const PureState& psi) { return psi * psi.adjoint(); }

inline DensityMatrix maximally_mixed(int spins) {
  const auto d = static_cast<Eigen::Index>(hilbert_dimension(spins));
  return DensityMatrix::Identity(d, d) / static_cast<double>(d);
}

inline void validate_state(const PureState& psi, double tol = 1e-10) {
  spins_for_dimension(psi.size());
  require(std::abs(psi.norm() - 1.0) < tol, ErrorCode::kInvalidArgument,
          "pure state is not normalised");
}

inline void validate_state(const DensityMatrix& rho, double tol = 1e-10) {
  require(rho.rows() == rho.cols(), ErrorCode::kDimension, "density matrix must be square");
  spins_for_dimension(rho.rows());
  require(hermiticity_defect(rho) < tol, ErrorCode::kInvalidArgument,
          "density matrix is not Hermitian");
  require(std::abs(rho.trace().real() - 1.0) < tol, ErrorCode::kInvalidArgument,
          "density matrix trace is not one");
  Eigen::SelfAdjointEigenSolver<DensityMatrix> eig(rho, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() > -tol, ErrorCode::kPositivity,
          "density matrix has a negative eigenvalue");
}

inline double trace_of(const PureState& psi) { return psi.squaredNorm(); }
inline double trace_of(const DensityMatrix& rho) { return rho.trace().real(); }

}  // namespace ionsim
