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

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "ionsim/error.hpp"

namespace ionsim {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Largest |H - H^dagger| entry.
inline double hermiticity_defect(const ComplexMatrix& h) {
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

inline double symmetry_defect(const RealMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// exp(-i H t) for Hermitian H, through the eigendecomposition.
inline ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
  require(h.rows() == h.cols(), ErrorCode::kDimension, "expm_hermitian needs a square matrix");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  require(solver.info() == Eigen::Success, ErrorCode::kEigenSolver,
          "Hermitian eigendecomposition failed");
  const RealVector& e = solver.eigenvalues();
  ComplexVector phases(e.size());
  for (Eigen::Index k = 0; k < e.size(); ++k) phases(k) = std::exp(-kI * e(k) * t);
  const ComplexMatrix& v = solver.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

/// Spectral-norm distance between two operators.
inline double operator_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  Eigen::JacobiSVD<ComplexMatrix> svd(a - b);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace ionsim
