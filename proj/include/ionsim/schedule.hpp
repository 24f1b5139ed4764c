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

// Adiabatic ramp alpha(t) = 1 - exp(-r t), b(t) = b0 exp(-r t) and the
// stroboscopic cycle bookkeeping shared by the pulse and effective routes.

#pragma once

#include <cmath>
#include <vector>

#include "ionsim/constants.hpp"
#include "ionsim/error.hpp"
#include "ionsim/linalg.hpp"
#include "ionsim/quantum_state.hpp"
#include "ionsim/spin_system.hpp"

namespace ionsim {

/// Rabi frequency of a pi/2 pulse of the given length (Omega dt = pi/4).
inline double pulse_rabi(double pulse_time) { return constants::kPi / (4.0 * pulse_time); }

/// beta = dt1 / ((1 + alpha) dt1 + 2 N dt).
inline double duty_factor(double alpha, double free_time, double pulse_time, int spins) {
  return free_time / ((1.0 + alpha) * free_time + 2.0 * spins * pulse_time);
}

/// Length of one pulse cycle: dt1 + dt2 + 2 N dt with dt2 = alpha dt1.
inline double cycle_time(double alpha, double free_time, double pulse_time, int spins) {
  return (1.0 + alpha) * free_time + 2.0 * spins * pulse_time;
}

struct Schedule {
  double initial_field = 0.0;  // b0, rad/s
  double rate = 0.0;           // r, 1/s (angular)
  double free_time = 0.0;      // dt1, s
  double pulse_time = 0.0;     // dt, s
  int cycles = 1;

  double rabi() const { return pulse_rabi(pulse_time); }
  double alpha_at(double t) const { return 1.0 - std::exp(-rate * t); }
  double field_at(double t) const { return initial_field * std::exp(-rate * t); }
  double alpha_rate(double t) const { return rate * std::exp(-rate * t); }
  double field_rate(double t) const { return -rate * initial_field * std::exp(-rate * t); }
  double beta_at(double t, int spins) const {
    return duty_factor(alpha_at(t), free_time, pulse_time, spins);
  }

  void validate() const {
    require(initial_field >= 0.0 && std::isfinite(initial_field), ErrorCode::kInvalidArgument,
            "initial field b0 must be non-negative");
    require(rate >= 0.0 && std::isfinite(rate), ErrorCode::kInvalidArgument,
            "ramp rate must be non-negative");
    require(free_time > 0.0, ErrorCode::kInvalidArgument, "free evolution time must be positive");
    require(pulse_time > 0.0, ErrorCode::kInvalidArgument, "pulse time must be positive");
    require(cycles >= 1, ErrorCode::kInvalidArgument, "need at least one cycle");
  }
};

/// Cycle start times t_0 = 0, t_1, ..., t_cycles. Each cycle freezes
/// alpha and b at its start, and its length depends on that alpha.
inline std::vector<double> cycle_boundaries(const Schedule& s, int spins) {
  s.validate();
  std::vector<double> t(static_cast<std::size_t>(s.cycles) + 1, 0.0);
  for (int n = 0; n < s.cycles; ++n)
    t[n + 1] = t[n] + cycle_time(s.alpha_at(t[n]), s.free_time, s.pulse_time, spins);
  return t;
}

/// Smallest cycle count whose boundaries reach `duration`.
inline int cycles_for_duration(Schedule s, int spins, double duration) {
  require(duration > 0.0, ErrorCode::kInvalidArgument, "duration must be positive");
  s.cycles = 1;
  s.validate();
  double t = 0.0;
  int n = 0;
  while (t < duration) {
    t += cycle_time(s.alpha_at(t), s.free_time, s.pulse_time, spins);
    ++n;
  }
  return n;
}

template <QuantumState S>
struct TrajectorySample {
  double time = 0.0;
  double alpha = 0.0;
  double field = 0.0;
  double beta = 1.0;
  S state;
};

/// States at stroboscopic times with the schedule values at those times.
template <QuantumState S>
struct Trajectory {
  std::vector<TrajectorySample<S>> samples;
  double dephasing_rate = 0.0;

  const TrajectorySample<S>& back() const { return samples.back(); }
  std::size_t size() const { return samples.size(); }
};

/// H_eff(t) = beta(t) [H_z(b(t)) + alpha(t) H_x(b(t))] with its analytic
/// time derivative.
class EffectiveHamiltonian {
 public:
  EffectiveHamiltonian(const RealMatrix& couplings, const Schedule& schedule)
      : schedule_(schedule), spins_(static_cast<int>(couplings.rows())) {
    validate_couplings(couplings);
    schedule.validate();
    zz_ = ising_z_diagonal(0.0, couplings);
    sz_ = ising_z_diagonal(1.0, RealMatrix::Zero(spins_, spins_));
    xx_ = build_ising(Axis::kX, 0.0, couplings);
    sx_ = build_ising(Axis::kX, 1.0, RealMatrix::Zero(spins_, spins_));
  }

  int spins() const { return spins_; }
  const Schedule& schedule() const { return schedule_; }

  ComplexMatrix at(double t) const {
    return compose(schedule_.alpha_at(t), schedule_.field_at(t), schedule_.beta_at(t, spins_));
  }

  /// beta [H_z(b) + alpha H_x(b)] for explicit parameters.
  ComplexMatrix compose(double alpha, double field, double beta) const {
    ComplexMatrix h = alpha * (xx_ + field * sx_);
    h.diagonal() += (zz_ + field * sz_).cast<Complex>();
    return beta * h;
  }

  ComplexMatrix derivative(double t) const {
    const double a = schedule_.alpha_at(t);
    const double b = schedule_.field_at(t);
    const double beta = schedule_.beta_at(t, spins_);
    const double da = schedule_.alpha_rate(t);
    const double db = schedule_.field_rate(t);
    const double dbeta = -beta * beta * da;
    ComplexMatrix dh = dbeta / beta * compose(a, b, beta);
    ComplexMatrix inner = da * (xx_ + b * sx_) + a * db * sx_;
    inner.diagonal() += (db * sz_).cast<Complex>();
    dh += beta * inner;
    return dh;
  }

  /// y = -i H(t) x without forming H.
  void apply_generator(double t, const ComplexVector& x, ComplexVector& y) const {
    const double a = schedule_.alpha_at(t);
    const double b = schedule_.field_at(t);
    const double beta = schedule_.beta_at(t, spins_);
    y.noalias() = (a * beta) * (xx_ * x + b * (sx_ * x));
    y.array() += beta * (zz_ + b * sz_).array().cast<Complex>() * x.array();
    y *= -kI;
  }

 private:
  Schedule schedule_;
  int spins_;
  RealVector zz_;     // -sum_{i<j} J_ij z_i z_j
  RealVector sz_;     // (1/2) sum_j z_j
  ComplexMatrix xx_;  // -sum_{i<j} J_ij x_i x_j
  ComplexMatrix sx_;  // (1/2) sum_j x_j
};

}  // namespace ionsim
