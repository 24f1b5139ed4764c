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

// Linear ion crystals in a one-dimensional axial potential: equilibrium
// positions, Hessian, normal modes, gradient-induced qubit splittings,
// spin-spin couplings and Lamb-Dicke parameters.
//
// Everything is SI; frequencies are angular (rad/s).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "ionsim/constants.hpp"
#include "ionsim/error.hpp"
#include "ionsim/linalg.hpp"

namespace ionsim {

struct IonSpecies {
  double mass = 0.0;    // kg
  double charge = 0.0;  // C
  /// d(omega_qubit)/dB in rad/s per tesla; mu_B g / hbar with g = 1 by default.
  double magnetic_slope = constants::kBohrMagneton / constants::kHbar;

  static IonSpecies ytterbium171() {
    return {constants::kYtterbium171Mass * constants::kAtomicMassUnit - constants::kElectronMass,
            constants::kElementaryCharge, constants::kBohrMagneton / constants::kHbar};
  }

  /// q^2 / (4 pi eps0).
  double coulomb_strength() const { return constants::kCoulomb * charge * charge; }

  void validate() const {
    require(mass > 0.0, ErrorCode::kInvalidArgument, "ion mass must be positive");
    require(charge > 0.0, ErrorCode::kInvalidArgument, "ion charge must be positive");
    require(std::isfinite(magnetic_slope), ErrorCode::kInvalidArgument,
            "magnetic slope must be finite");
  }
};

/// phi(x) = c2 x^2 + c4 x^4 + c6 x^6, coefficients in J/m^k.
struct EvenPolynomial {
  double c2 = 0.0;
  double c4 = 0.0;
  double c6 = 0.0;

  double value(double x) const {
    const double x2 = x * x;
    return ((c6 * x2 + c4) * x2 + c2) * x2;
  }
  double first_derivative(double x) const {
    const double x2 = x * x;
    return ((6.0 * c6 * x2 + 4.0 * c4) * x2 + 2.0 * c2) * x;
  }
  double second_derivative(double x) const {
    const double x2 = x * x;
    return (30.0 * c6 * x2 + 12.0 * c4) * x2 + 2.0 * c2;
  }
  bool confining() const {
    if (c6 != 0.0) return c6 > 0.0;
    if (c4 != 0.0) return c4 > 0.0;
    return c2 > 0.0;
  }
};

struct HarmonicWell {
  double omega;  // rad/s
};

/// Reflection-symmetric triple well: outer minima at +-separation with
/// local trap frequency outer_omega, central curvature m * center_omega^2.
struct TripleWell {
  double separation;    // m
  double center_omega;  // rad/s
  double outer_omega;   // rad/s
};

class AxialPotential {
 public:
  using Shape = std::variant<HarmonicWell, TripleWell, EvenPolynomial>;

  static AxialPotential harmonic(double omega) { return AxialPotential(HarmonicWell{omega}); }
  static AxialPotential triple_well(double separation, double center_omega, double outer_omega) {
    return AxialPotential(TripleWell{separation, center_omega, outer_omega});
  }
  static AxialPotential polynomial(double c2, double c4, double c6) {
    return AxialPotential(EvenPolynomial{c2, c4, c6});
  }

  const Shape& shape() const { return shape_; }

  /// The potential as an explicit polynomial for an ion of the given mass.
  EvenPolynomial coefficients(double mass) const {
    return std::visit(
        [mass](const auto& s) -> EvenPolynomial {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, HarmonicWell>) {
            return {0.5 * mass * s.omega * s.omega, 0.0, 0.0};
          } else if constexpr (std::is_same_v<T, TripleWell>) {
            const double wc2 = s.center_omega * s.center_omega;
            const double wo2 = s.outer_omega * s.outer_omega;
            const double xo2 = s.separation * s.separation;
            return {0.5 * mass * wc2, -mass * (4.0 * wc2 + wo2) / (8.0 * xo2),
                    mass * (2.0 * wc2 + wo2) / (12.0 * xo2 * xo2)};
          } else {
            return s;
          }
        },
        shape_);
  }

  /// Uniform rescaling phi -> factor * phi, keeping the parametrisation.
  AxialPotential scaled(double factor) const {
    require(factor > 0.0, ErrorCode::kInvalidArgument, "potential scale factor must be positive");
    const double root = std::sqrt(factor);
    return std::visit(
        [&](const auto& s) -> AxialPotential {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, HarmonicWell>) {
            return harmonic(s.omega * root);
          } else if constexpr (std::is_same_v<T, TripleWell>) {
            return triple_well(s.separation, s.center_omega * root, s.outer_omega * root);
          } else {
            return polynomial(s.c2 * factor, s.c4 * factor, s.c6 * factor);
          }
        },
        shape_);
  }

  void validate() const {
    std::visit(
        [](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, HarmonicWell>) {
            require(s.omega > 0.0, ErrorCode::kInvalidArgument,
                    "harmonic trap frequency must be positive");
          } else if constexpr (std::is_same_v<T, TripleWell>) {
            require(s.separation > 0.0, ErrorCode::kInvalidArgument,
                    "triple-well separation must be positive");
            require(s.center_omega > 0.0 && s.outer_omega > 0.0, ErrorCode::kInvalidArgument,
                    "triple-well frequencies must be positive");
          } else {
            require(s.confining(), ErrorCode::kNonConfining,
                    "highest nonzero polynomial coefficient must be positive");
          }
        },
        shape_);
  }

 private:
  explicit AxialPotential(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

/// Abscissae of the local minima of an even polynomial, ascending.
inline std::vector<double> local_minima(const EvenPolynomial& p) {
  // phi'(x) = 2x (3 c6 u^2 + 2 c4 u + c2), u = x^2.
  std::vector<double> candidates{0.0};
  std::vector<double> roots;
  if (p.c6 != 0.0) {
    const double disc = 4.0 * p.c4 * p.c4 - 12.0 * p.c6 * p.c2;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      roots = {(-2.0 * p.c4 - s) / (6.0 * p.c6), (-2.0 * p.c4 + s) / (6.0 * p.c6)};
    }
  } else if (p.c4 != 0.0) {
    roots = {-p.c2 / (2.0 * p.c4)};
  }
  for (double u : roots)
    if (u > 0.0) {
      candidates.push_back(std::sqrt(u));
      candidates.push_back(-std::sqrt(u));
    }
  std::vector<double> minima;
  for (double x : candidates) {
    const double curvature = p.second_derivative(x);
    bool is_min = curvature > 0.0;
    if (curvature == 0.0) {
      // Flat at x: a minimum only if the potential rises on both sides.
      const double h = 1e-6 * std::max(1e-12, std::abs(x) + 1e-9);
      is_min = p.value(x + h) > p.value(x) && p.value(x - h) > p.value(x);
    }
    if (is_min) minima.push_back(x);
  }
  std::sort(minima.begin(), minima.end());
  minima.erase(std::unique(minima.begin(), minima.end()), minima.end());
  return minima;
}

namespace detail {

// Natural length of the crystal: where the Coulomb force k/l^2 balances the
// stiffest confining term. For a harmonic well l = (k / (m w^2))^(1/3).
inline double crystal_length(const EvenPolynomial& p, double coulomb) {
  double best = std::numeric_limits<double>::infinity();
  const double coeff[] = {p.c2, p.c4, p.c6};
  for (int n = 0; n < 3; ++n) {
    const double order = 2.0 * (n + 1);
    if (coeff[n] > 0.0)
      best = std::min(best, std::pow(coulomb / (order * coeff[n]), 1.0 / (order + 1.0)));
  }
  require(std::isfinite(best), ErrorCode::kNonConfining, "potential has no confining term");
  return best;
}

// Scaled problem: u = x / l, energies in units of k / l.
struct ScaledChain {
  double a2, a4, a6;

  ScaledChain(const EvenPolynomial& p, double length, double coulomb) {
    const double e0 = coulomb / length;
    const double l2 = length * length;
    a2 = p.c2 * l2 / e0;
    a4 = p.c4 * l2 * l2 / e0;
    a6 = p.c6 * l2 * l2 * l2 / e0;
  }

  double energy(const RealVector& u) const {
    double e = 0.0;
    const auto n = u.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x2 = u(i) * u(i);
      e += ((a6 * x2 + a4) * x2 + a2) * x2;
      for (Eigen::Index j = i + 1; j < n; ++j) e += 1.0 / std::abs(u(i) - u(j));
    }
    return e;
  }

  RealVector gradient(const RealVector& u) const {
    const auto n = u.size();
    RealVector g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = u(i);
      const double x2 = x * x;
      double gi = ((6.0 * a6 * x2 + 4.0 * a4) * x2 + 2.0 * a2) * x;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = x - u(j);
        gi -= (d > 0 ? 1.0 : -1.0) / (d * d);
      }
      g(i) = gi;
    }
    return g;
  }

  RealMatrix hessian(const RealVector& u) const {
    const auto n = u.size();
    RealMatrix h = RealMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x2 = u(i) * u(i);
      h(i, i) = (30.0 * a6 * x2 + 12.0 * a4) * x2 + 2.0 * a2;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        const double d = std::abs(u(i) - u(j));
        const double c = 2.0 / (d * d * d);
        h(i, i) += c;
        h(i, j) = -c;
      }
    }
    return h;
  }
};

inline bool strictly_increasing(const RealVector& u) {
  for (Eigen::Index i = 1; i < u.size(); ++i)
    if (!(u(i) > u(i - 1))) return false;
  return true;
}

inline void require_distinct(std::span<const double> positions) {
  std::vector<double> sorted(positions.begin(), positions.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    require(sorted[i] != sorted[i - 1], ErrorCode::kDivergentEnergy,
            "two ions coincide; Coulomb energy diverges");
}

}  // namespace detail

/// Sum of the axial potential over ions plus the pairwise Coulomb repulsion.
inline double total_energy(std::span<const double> positions, const AxialPotential& potential,
                           const IonSpecies& species) {
  detail::require_distinct(positions);
  const auto poly = potential.coefficients(species.mass);
  const double k = species.coulomb_strength();
  double e = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    e += poly.value(positions[i]);
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      e += k / std::abs(positions[i] - positions[j]);
  }
  return e;
}

/// dE/dx_i in N (the negative of the net force on each ion).
inline RealVector energy_gradient(std::span<const double> positions,
                                  const AxialPotential& potential, const IonSpecies& species) {
  detail::require_distinct(positions);
  const auto poly = potential.coefficients(species.mass);
  const double k = species.coulomb_strength();
  const auto n = static_cast<Eigen::Index>(positions.size());
  RealVector g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double gi = poly.first_derivative(positions[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = positions[i] - positions[j];
      gi -= k * (d > 0 ? 1.0 : -1.0) / (d * d);
    }
    g(i) = gi;
  }
  return g;
}

/// Force unit used for relative equilibrium tolerances: k / l^2.
inline double force_scale(const AxialPotential& potential, const IonSpecies& species) {
  const double k = species.coulomb_strength();
  const double l = detail::crystal_length(potential.coefficients(species.mass), k);
  return k / (l * l);
}

inline double crystal_length(const AxialPotential& potential, const IonSpecies& species) {
  return detail::crystal_length(potential.coefficients(species.mass),
                                species.coulomb_strength());
}

struct EquilibriumOptions {
  double gradient_tolerance = 1e-10;  // max |dE/dx| / force_scale
  double position_tolerance = 1e-12;  // m
  int max_iterations = 500;
};

/// Local minimum of total_energy reached from the guess by damped Newton.
///
/// Several local minima can exist (ions distributed differently over the
/// wells). The one returned is the one this descent reaches from the guess,
/// which defaults to equally spaced ions across an estimate of the chain
/// length. Ordering is preserved by the Coulomb barrier, so permutations are
/// canonicalised to ascending order.
inline std::vector<double> find_equilibrium(const AxialPotential& potential,
                                            const IonSpecies& species, int ions,
                                            std::optional<std::vector<double>> guess = {},
                                            const EquilibriumOptions& options = {}) {
  require(ions >= 1, ErrorCode::kInvalidArgument, "need at least one ion");
  species.validate();
  potential.validate();
  const auto poly = potential.coefficients(species.mass);
  require(poly.confining(), ErrorCode::kNonConfining, "potential does not confine the ions");
  const double k = species.coulomb_strength();
  const double length = detail::crystal_length(poly, k);
  const detail::ScaledChain chain(poly, length, k);

  RealVector u(ions);
  if (guess) {
    require(static_cast<int>(guess->size()) == ions, ErrorCode::kInvalidArgument,
            "guess must have one entry per ion");
    detail::require_distinct(*guess);
    std::vector<double> sorted = *guess;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < ions; ++i) u(i) = sorted[i] / length;
  } else if (ions == 1) {
    const auto minima = local_minima(poly);
    double best = 0.0;
    double best_value = std::numeric_limits<double>::infinity();
    for (double x : minima)
      if (poly.value(x) < best_value) {
        best_value = poly.value(x);
        best = x;
      }
    u(0) = best / length;
  } else {
    const double half = 0.75 * std::pow(static_cast<double>(ions - 1), 0.6);
    for (int i = 0; i < ions; ++i) u(i) = -half + 2.0 * half * i / (ions - 1);
  }

  const double step_tolerance = options.position_tolerance / length;
  int kicks = 0;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const RealVector g = chain.gradient(u);
    const double gnorm = g.cwiseAbs().maxCoeff();
    const RealMatrix h = chain.hessian(u);
    Eigen::LLT<RealMatrix> llt(h);
    const bool convex = llt.info() == Eigen::Success;

    if (gnorm < options.gradient_tolerance) {
      if (convex) {
        std::vector<double> x(ions);
        for (int i = 0; i < ions; ++i) x[i] = u(i) * length;
        return x;
      }
      // Stationary but not a minimum: push off along the softest direction.
      require(++kicks <= 8, ErrorCode::kNonConvergence,
              "equilibrium search stuck at a saddle point");
      Eigen::SelfAdjointEigenSolver<RealMatrix> eig(h);
      RealVector kick = 1e-2 * eig.eigenvectors().col(0);
      while (!detail::strictly_increasing(u + kick)) kick *= 0.5;
      u += kick;
      continue;
    }

    RealVector p = convex ? RealVector(llt.solve(-g)) : RealVector(-g / std::max(1.0, h.diagonal().cwiseAbs().maxCoeff()));
    const double e = chain.energy(u);
    const double slope = g.dot(p);
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
      const RealVector trial = u + alpha * p;
      if (!detail::strictly_increasing(trial)) continue;
      const double et = chain.energy(trial);
      if (et <= e + 1e-4 * alpha * slope ||
          chain.gradient(trial).cwiseAbs().maxCoeff() < gnorm) {
        accepted = true;
        break;
      }
    }
    require(accepted, ErrorCode::kNonConvergence, "line search failed in equilibrium search");
    u += alpha * p;
    if ((alpha * p).cwiseAbs().maxCoeff() < step_tolerance &&
        chain.gradient(u).cwiseAbs().maxCoeff() < 1e3 * options.gradient_tolerance && convex) {
      std::vector<double> x(ions);
      for (int i = 0; i < ions; ++i) x[i] = u(i) * length;
      return x;
    }
  }
  throw Error(ErrorCode::kNonConvergence, "equilibrium search exceeded " +
                                              std::to_string(options.max_iterations) +
                                              " iterations");
}

struct Hessian {
  RealMatrix matrix;           // J/m^2
  double relative_force = 0.0;  // max |dE/dx| / force_scale at the input positions
  bool at_equilibrium = true;   // relative_force below 1e-6
};

/// Analytic Hessian of total_energy. Off-equilibrium input is accepted and
/// flagged through `at_equilibrium`.
inline Hessian hessian(std::span<const double> positions, const AxialPotential& potential,
                       const IonSpecies& species) {
  detail::require_distinct(positions);
  const auto poly = potential.coefficients(species.mass);
  const double k = species.coulomb_strength();
  const auto n = static_cast<Eigen::Index>(positions.size());
  Hessian out;
  out.matrix = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.matrix(i, i) = poly.second_derivative(positions[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = std::abs(positions[i] - positions[j]);
      const double c = 2.0 * k / (d * d * d);
      out.matrix(i, i) += c;
      out.matrix(i, j) = -c;
    }
  }
  const RealVector g = energy_gradient(positions, potential, species);
  out.relative_force = n ? g.cwiseAbs().maxCoeff() / force_scale(potential, species) : 0.0;
  out.at_equilibrium = out.relative_force < 1e-6;
  return out;
}

struct NormalModes {
  RealVector frequencies;  // rad/s, ascending
  RealMatrix vectors;      // columns orthonormal; S^T A S = diag(m nu^2)
};

/// Sign convention: the largest-magnitude component of each mode is positive.
inline NormalModes normal_modes(const RealMatrix& a, const IonSpecies& species) {
  require(a.rows() == a.cols(), ErrorCode::kDimension, "Hessian must be square");
  require(symmetry_defect(a) <= 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff()),
          ErrorCode::kInvalidArgument, "Hessian must be symmetric");
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(a);
  require(solver.info() == Eigen::Success, ErrorCode::kEigenSolver,
          "Hessian eigendecomposition failed");
  NormalModes modes;
  const RealVector& ev = solver.eigenvalues();
  modes.vectors = solver.eigenvectors();
  modes.frequencies.resize(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    require(ev(k) > 0.0, ErrorCode::kUnstable,
            "Hessian has a non-positive eigenvalue; the configuration is not a minimum");
    modes.frequencies(k) = std::sqrt(ev(k) / species.mass);
    Eigen::Index arg = 0;
    modes.vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (modes.vectors(arg, k) < 0.0) modes.vectors.col(k) *= -1.0;
  }
  return modes;
}

/// Delta omega_i = slope * gradient * x_i (linear field, zero offset).
inline std::vector<double> qubit_splittings(std::span<const double> positions, double gradient,
                                            const IonSpecies& species) {
  std::vector<double> out(positions.size());
  const double kappa = species.magnetic_slope * gradient;
  for (std::size_t i = 0; i < positions.size(); ++i) out[i] = kappa * positions[i];
  return out;
}

/// J_ij = (hbar/2) (d omega/dx)^2 (A^-1)_ij in rad/s, zero diagonal.
inline RealMatrix coupling_matrix(const RealMatrix& a, double gradient, const IonSpecies& species) {
  require(a.rows() == a.cols(), ErrorCode::kDimension, "Hessian must be square");
  Eigen::FullPivLU<RealMatrix> lu(a);
  require(lu.isInvertible(), ErrorCode::kSingular, "Hessian is singular");
  const double kappa = species.magnetic_slope * gradient;
  const double prefactor = 0.5 * constants::kHbar * kappa * kappa;
  RealMatrix inverse = lu.inverse();
  inverse = 0.5 * (inverse + inverse.transpose()).eval();
  RealMatrix j = prefactor * inverse;
  j.diagonal().setZero();
  return j;
}

/// eta_jk = sqrt(hbar / 2 m nu_k) * (slope * gradient / nu_k) * S_jk.
inline RealMatrix lamb_dicke(const NormalModes& modes, double gradient,
                             const IonSpecies& species) {
  const auto n = modes.vectors.rows();
  RealMatrix eta(n, modes.frequencies.size());
  const double kappa = species.magnetic_slope * gradient;
  for (Eigen::Index k = 0; k < modes.frequencies.size(); ++k) {
    const double nu = modes.frequencies(k);
    require(nu > 0.0, ErrorCode::kInvalidArgument, "mode frequencies must be positive");
    const double scale = std::sqrt(constants::kHbar / (2.0 * species.mass * nu)) * kappa / nu;
    eta.col(k) = scale * modes.vectors.col(k);
  }
  return eta;
}

struct SidebandDiagnostic {
  std::vector<double> per_mode;  // max_j eta_jk^2 (n_k + 1)
  std::vector<bool> negligible;
  double threshold = 0.1;
  bool all_negligible() const {
    return std::all_of(negligible.begin(), negligible.end(), [](bool b) { return b; });
  }
};

inline SidebandDiagnostic sideband_negligibility(const RealMatrix& eta,
                                                 std::span<const double> occupations,
                                                 double threshold = 0.1) {
  require(static_cast<Eigen::Index>(occupations.size()) == eta.cols(), ErrorCode::kDimension,
          "one occupation per mode required");
  SidebandDiagnostic out;
  out.threshold = threshold;
  for (Eigen::Index k = 0; k < eta.cols(); ++k) {
    require(occupations[k] >= 0.0, ErrorCode::kInvalidArgument,
            "mode occupations must be non-negative");
    const double peak = eta.col(k).cwiseAbs2().maxCoeff() * (occupations[k] + 1.0);
    out.per_mode.push_back(peak);
    out.negligible.push_back(peak < threshold);
  }
  return out;
}

struct ChainSolution {
  std::vector<double> positions;   // m, ascending
  RealMatrix hessian;              // J/m^2
  RealVector mode_frequencies;     // rad/s, ascending
  RealMatrix mode_matrix;          // orthogonal
  std::vector<double> splittings;  // rad/s
  RealMatrix couplings;            // rad/s
  RealMatrix lamb_dicke;           // dimensionless
  double gradient = 0.0;           // T/m

  int ions() const { return static_cast<int>(positions.size()); }
  double max_lamb_dicke() const { return lamb_dicke.cwiseAbs().maxCoeff(); }
};

inline ChainSolution solve_chain(const AxialPotential& potential, const IonSpecies& species,
                                 int ions, double gradient,
                                 std::optional<std::vector<double>> guess = {}) {
  ChainSolution s;
  s.positions = find_equilibrium(potential, species, ions, std::move(guess));
  s.hessian = hessian(s.positions, potential, species).matrix;
  auto modes = normal_modes(s.hessian, species);
  s.splittings = qubit_splittings(s.positions, gradient, species);
  s.couplings = coupling_matrix(s.hessian, gradient, species);
  s.lamb_dicke = lamb_dicke(modes, gradient, species);
  s.mode_frequencies = std::move(modes.frequencies);
  s.mode_matrix = std::move(modes.vectors);
  s.gradient = gradient;
  return s;
}

struct CalibrationTargets {
  double lowest_mode;  // rad/s
  double eta_max;
};

struct Calibration {
  AxialPotential potential;
  double scale = 1.0;  // applied to the input potential
  double gradient = 0.0;
  ChainSolution solution;
};

/// Rescales the potential so the softest mode hits the target, then picks
/// the gradient that makes max |eta_jk| equal the target (eta is linear in
/// the gradient).
inline Calibration calibrate(const AxialPotential& potential, const IonSpecies& species, int ions,
                             const CalibrationTargets& targets) {
  require(targets.lowest_mode > 0.0 && targets.eta_max > 0.0, ErrorCode::kInvalidArgument,
          "calibration targets must be positive");
  potential.validate();

  auto lowest_mode = [&](double scale) {
    const auto p = potential.scaled(scale);
    const auto x = find_equilibrium(p, species, ions);
    return normal_modes(hessian(x, p, species).matrix, species).frequencies(0);
  };
  // log(nu0) is increasing in log(scale); nu0 ~ sqrt(scale) for a harmonic well.
  auto residual = [&](double log_scale) {
    return std::log(lowest_mode(std::exp(log_scale)) / targets.lowest_mode);
  };

  const double nu_unit = lowest_mode(1.0);
  const double start = 2.0 * std::log(targets.lowest_mode / nu_unit);
  double log_scale = start;
  if (std::abs(residual(start)) > 1e-13) {
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t max_iter = 200;
    try {
      auto [lo, hi] = boost::math::tools::bracket_and_solve_root(residual, start, 1.1, true, tol,
                                                                  max_iter);
      log_scale = 0.5 * (lo + hi);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kNonConvergence, std::string("potential calibration: ") + e.what());
    }
    require(max_iter < 200, ErrorCode::kNonConvergence,
            "potential calibration did not converge");
  }

  Calibration out{potential.scaled(std::exp(log_scale)), std::exp(log_scale), 0.0, {}};
  const auto unit = solve_chain(out.potential, species, ions, 1.0);
  const double eta_unit = unit.max_lamb_dicke();
  require(eta_unit > 0.0, ErrorCode::kNonConvergence, "Lamb-Dicke parameters vanish");
  out.gradient = targets.eta_max / eta_unit;
  out.solution = solve_chain(out.potential, species, ions, out.gradient);
  return out;
}

}  // namespace ionsim
