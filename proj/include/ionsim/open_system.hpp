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

// Pure dephasing master equation
//
//   rho' = -i [H, rho] + (gamma/2) sum_j (sigma_j^z rho sigma_j^z - rho).
//
// The dissipator is diagonal in the computational basis: rho_ab decays at
// gamma * w_ab with w_ab the number of spins on which a and b differ.

#pragma once

#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ionsim/error.hpp"
#include "ionsim/linalg.hpp"
#include "ionsim/pulse_engine.hpp"
#include "ionsim/quantum_state.hpp"
#include "ionsim/schedule.hpp"

namespace ionsim {

struct DephasingConfig {
  double rate = 0.0;  // gamma, 1/s

  static DephasingConfig from_time(double dephasing_time) {
    require(dephasing_time > 0.0, ErrorCode::kInvalidArgument, "dephasing time must be positive");
    return {1.0 / dephasing_time};
  }

  double time() const { return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity(); }

  void validate() const {
    require(rate >= 0.0 && std::isfinite(rate), ErrorCode::kInvalidArgument,
            "dephasing rate must be non-negative");
  }
};

/// w_ab = popcount(a xor b).
inline RealMatrix dephasing_weights(int spins) {
  const auto dim = static_cast<Eigen::Index>(hilbert_dimension(spins));
  RealMatrix w(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b)
      w(a, b) = std::popcount(static_cast<std::size_t>(a ^ b));
  return w;
}

inline ComplexMatrix lindblad_rhs(const DensityMatrix& rho, const ComplexMatrix& h, double gamma) {
  require(rho.rows() == rho.cols() && h.rows() == rho.rows() && h.cols() == rho.cols(),
          ErrorCode::kDimension, "state and Hamiltonian dimensions differ");
  const int n = spins_for_dimension(rho.rows());
  ComplexMatrix d = -kI * (h * rho - rho * h);
  if (gamma != 0.0) d.array() -= gamma * dephasing_weights(n).array() * rho.array();
  return d;
}

/// Exact dephasing over dt with H = 0.
class Dephaser {
 public:
  Dephaser(int spins, double gamma) : weights_(dephasing_weights(spins)), gamma_(gamma) {}

  void apply(DensityMatrix& rho, double dt) const {
    if (gamma_ == 0.0 || dt == 0.0) return;
    rho.array() *= (-gamma_ * dt * weights_.array()).exp();
  }

  double rate() const { return gamma_; }

 private:
  RealMatrix weights_;
  double gamma_;
};

struct MasterOptions {
  double splitting_tolerance = 1e-10;   // per-segment Strang error target
  double positivity_tolerance = 1e-7;
  double trace_tolerance = 1e-8;
  int stride = 1;
};

inline void check_density(const DensityMatrix& rho, const MasterOptions& opt) {
  const double tr = rho.trace().real();
  require(std::abs(tr - 1.0) <= opt.trace_tolerance, ErrorCode::kIntegrator,
          "trace drifted to " + std::to_string(tr));
  Eigen::SelfAdjointEigenSolver<DensityMatrix> eig(0.5 * (rho + rho.adjoint()),
                                                    Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  require(lo >= -opt.positivity_tolerance, ErrorCode::kPositivity,
          "density matrix eigenvalue " + std::to_string(lo));
}

/// Substeps for Strang splitting of one segment so the accumulated
/// commutator error stays below `tolerance`.
inline int strang_substeps(double duration, double gamma, double norm, double tolerance) {
  const double e = duration * duration * duration * gamma * norm * norm / (12.0 * tolerance);
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(e))));
}

/// Propagates rho through one sequence with dephasing in every step.
/// Diagonal segments commute with the dissipator and are exact; driven
/// segments use Strang splitting.
inline void evolve_master(DensityMatrix& rho, const PulseSequence& seq, const DriveContext& ctx,
                          DriveClock& clock, const Dephaser& dephaser,
                          const MasterOptions& opt = {}) {
  for_each_segment(seq, ctx, clock, [&](const Segment& seg) {
    if (dephaser.rate() == 0.0 || seg.kind == Segment::Kind::kDiagonal) {
      StepPropagator::make(seg, seg.duration).apply(rho);
      dephaser.apply(rho, seg.duration);
      return;
    }
    const int n = strang_substeps(seg.duration, dephaser.rate(), seg.norm_bound(),
                                  opt.splitting_tolerance);
    const double h = seg.duration / n;
    const auto u = StepPropagator::make(seg, h);
    dephaser.apply(rho, 0.5 * h);
    for (int k = 0; k < n; ++k) {
      u.apply(rho);
      dephaser.apply(rho, k + 1 < n ? h : 0.5 * h);
    }
  });
  rho = 0.5 * (rho + rho.adjoint()).eval();
}

/// Pulse-protocol run of the master equation; the default initial state is
/// the projector onto the ground state of H_eff(0, b0).
inline Trajectory<DensityMatrix> master_adiabatic_run(
    const DriveContext& ctx, const Schedule& schedule, const DephasingConfig& dephasing,
    std::optional<DensityMatrix> initial = std::nullopt, const MasterOptions& opt = {}) {
  ctx.validate();
  schedule.validate();
  dephasing.validate();
  check_separation(ctx, schedule.rabi());
  DensityMatrix rho =
      initial ? *initial : to_density(initial_ground_state(ctx.couplings, schedule));
  validate_state(rho);
  require(rho.rows() == static_cast<Eigen::Index>(hilbert_dimension(ctx.spins())),
          ErrorCode::kDimension, "initial state dimension does not match the spin count");
  const Dephaser dephaser(ctx.spins(), dephasing.rate);
  DriveClock clock;
  auto traj = stroboscopic_run(schedule, ctx.spins(), std::move(rho), opt.stride,
                               [&](DensityMatrix& state, const PulseSequence& seq, double start) {
                                 clock.time = start;
                                 evolve_master(state, seq, ctx, clock, dephaser, opt);
                               });
  for (const auto& s : traj.samples) check_density(s.state, opt);
  traj.dephasing_rate = dephasing.rate;
  return traj;
}

/// Master equation with the continuous effective Hamiltonian.
inline Trajectory<DensityMatrix> master_effective_run(
    const RealMatrix& couplings, const Schedule& schedule, const DephasingConfig& dephasing,
    std::optional<DensityMatrix> initial = std::nullopt, const IntegratorOptions& iopt = {},
    const MasterOptions& mopt = {}) {
  dephasing.validate();
  require(iopt.stride >= 1, ErrorCode::kInvalidArgument, "sample stride must be at least one");
  const EffectiveHamiltonian h(couplings, schedule);
  const int n = h.spins();
  DensityMatrix rho0 = initial ? *initial : to_density(ground_state(h.at(0.0)).state);
  validate_state(rho0);
  require(rho0.rows() == static_cast<Eigen::Index>(hilbert_dimension(n)), ErrorCode::kDimension,
          "initial state dimension does not match the spin count");

  const auto dim = rho0.rows();
  const RealMatrix decay = dephasing.rate * dephasing_weights(n);
  const auto times = cycle_boundaries(schedule, n);
  detail::OdeState x(rho0.data(), rho0.data() + dim * dim);
  auto rhs = [&](const detail::OdeState& in, detail::OdeState& out, double t) {
    out.resize(in.size());
    Eigen::Map<const ComplexMatrix> r(in.data(), dim, dim);
    Eigen::Map<ComplexMatrix> d(out.data(), dim, dim);
    const ComplexMatrix ht = h.at(t);
    d.noalias() = -kI * (ht * r - r * ht);
    d.array() -= decay.array() * r.array();
  };
  const double scale = h.at(0.0).cwiseAbs().rowwise().sum().maxCoeff() + decay.maxCoeff();

  Trajectory<DensityMatrix> traj;
  traj.dephasing_rate = dephasing.rate;
  const auto last = times.size() - 1;
  detail::integrate_at(rhs, x, times, scale, iopt, [&](const detail::OdeState& s, std::size_t k) {
    if (k % static_cast<std::size_t>(iopt.stride) != 0 && k != last) return;
    const double t = times[k];
    DensityMatrix r = Eigen::Map<const ComplexMatrix>(s.data(), dim, dim);
    r = 0.5 * (r + r.adjoint()).eval();
    check_density(r, mopt);
    traj.samples.push_back({t, schedule.alpha_at(t), schedule.field_at(t), schedule.beta_at(t, n),
                            std::move(r)});
  });
  return traj;
}

}  // namespace ionsim
