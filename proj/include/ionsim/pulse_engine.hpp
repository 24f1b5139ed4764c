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

// Microwave pulse cycles and their propagation.
//
// One cycle in time order:
//   free(dt1), pi/2 pulses -Omega on spins N-1..0, free(dt2),
//   pi/2 pulses +Omega on spins 0..N-1
// which composes to exp(-i H_x dt2) exp(-i H_z dt1) for ideal pulses.
//
// Resonant mode keeps only the addressed spin's drive term, so a pulse
// Hamiltonian couples basis states in pairs and has a closed-form
// propagator. Full mode keeps the off-resonant terms on every spin and is
// sliced in time.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "ionsim/constants.hpp"
#include "ionsim/error.hpp"
#include "ionsim/linalg.hpp"
#include "ionsim/quantum_state.hpp"
#include "ionsim/schedule.hpp"
#include "ionsim/spin_system.hpp"

namespace ionsim {

struct PulseStep {
  double duration = 0.0;        // s
  double rabi = 0.0;            // Omega, rad/s; zero for free evolution
  std::optional<int> target;    // addressed spin
  double detuning = 0.0;        // effective field b during the step, rad/s
  double phase = 0.0;           // extra drive phase, rad

  bool driven() const { return rabi != 0.0; }

  void validate(int spins) const {
    require(duration > 0.0, ErrorCode::kInvalidArgument, "step duration must be positive");
    if (driven()) {
      require(target.has_value(), ErrorCode::kInvalidArgument, "driven step needs a target spin");
      require(*target >= 0 && *target < spins, ErrorCode::kDimension, "target spin out of range");
    }
  }
};

struct PulseSequence {
  std::vector<PulseStep> steps;
  int spins = 0;
  double alpha = 0.0;
  double field = 0.0;
  double free_time_z = 0.0;  // dt1
  double free_time_x = 0.0;  // dt2
  double pulse_time = 0.0;   // dt
  double rabi = 0.0;         // Omega bar

  double cycle_time() const {
    double t = 0.0;
    for (const auto& s : steps) t += s.duration;
    return t;
  }
  double beta() const { return duty_factor(alpha, free_time_z, pulse_time, spins); }
};

inline PulseSequence build_sequence(int spins, double field, double alpha, double free_time,
                                    double pulse_time) {
  require(spins >= 1, ErrorCode::kDimension, "need at least one spin");
  require(alpha >= 0.0, ErrorCode::kInvalidArgument, "alpha must be non-negative");
  require(free_time > 0.0 && pulse_time > 0.0, ErrorCode::kInvalidArgument,
          "free and pulse times must be positive");
  PulseSequence seq;
  seq.spins = spins;
  seq.alpha = alpha;
  seq.field = field;
  seq.free_time_z = free_time;
  seq.free_time_x = alpha * free_time;
  seq.pulse_time = pulse_time;
  seq.rabi = pulse_rabi(pulse_time);
  auto free = [&](double d) { seq.steps.push_back({d, 0.0, std::nullopt, field, 0.0}); };
  auto pulse = [&](int j, double sign) {
    seq.steps.push_back({pulse_time, sign * seq.rabi, j, field, 0.0});
  };
  free(free_time);
  for (int j = spins - 1; j >= 0; --j) pulse(j, -1.0);
  if (seq.free_time_x > 0.0) free(seq.free_time_x);
  for (int j = 0; j < spins; ++j) pulse(j, +1.0);
  return seq;
}

enum class DriveMode { kResonant, kFull };

struct DriveContext {
  RealMatrix couplings;             // rad/s
  std::vector<double> resonances;   // omega_j, rad/s; only differences matter
  DriveMode mode = DriveMode::kResonant;
  bool ideal_pulses = false;        // resonant mode: b and J off while driving
  bool phase_correction = true;     // full mode: drive phase cancels the frame phase
  double slices_per_detuning = 50.0;

  int spins() const { return static_cast<int>(couplings.rows()); }

  static DriveContext resonant(RealMatrix couplings) {
    DriveContext c;
    c.couplings = std::move(couplings);
    return c;
  }

  static DriveContext full(RealMatrix couplings, std::vector<double> resonances) {
    DriveContext c;
    c.couplings = std::move(couplings);
    c.resonances = std::move(resonances);
    c.mode = DriveMode::kFull;
    return c;
  }

  double detuning(int from, int to) const { return resonances[from] - resonances[to]; }

  double max_detuning(int target) const {
    double m = 0.0;
    if (mode != DriveMode::kFull) return m;
    for (int j = 0; j < spins(); ++j) m = std::max(m, std::abs(detuning(target, j)));
    return m;
  }

  double min_separation() const {
    double m = std::numeric_limits<double>::infinity();
    for (int a = 0; a < spins(); ++a)
      for (int b = a + 1; b < spins(); ++b) m = std::min(m, std::abs(detuning(a, b)));
    return m;
  }

  void validate() const {
    validate_couplings(couplings);
    require(slices_per_detuning > 0.0, ErrorCode::kInvalidArgument,
            "slice factor must be positive");
    if (mode == DriveMode::kFull) {
      require(static_cast<int>(resonances.size()) == spins(), ErrorCode::kDimension,
              "need one resonance frequency per spin");
      require(spins() == 1 || min_separation() > 0.0, ErrorCode::kResonantSpin,
              "spin resonance frequencies must be distinct in full mode");
    }
  }
};

/// Global time and the accumulated rotating-frame phase. Each change of
/// the effective field b shifts the frame by (b_new - b_old) t.
struct DriveClock {
  double time = 0.0;
  double frame_phase = 0.0;
  std::optional<double> field;

  void enter_field(double b) {
    if (field && *field != b) frame_phase += (b - *field) * time;
    field = b;
  }
};

/// Hamiltonian of one step at time t (ignored in resonant mode).
inline ComplexMatrix step_hamiltonian(const PulseStep& step, const DriveContext& ctx,
                                      double t = 0.0, double frame_phase = 0.0) {
  const int n = ctx.spins();
  step.validate(n);
  const bool drop_static = step.driven() && ctx.mode == DriveMode::kResonant && ctx.ideal_pulses;
  const auto dim = static_cast<Eigen::Index>(hilbert_dimension(n));
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  if (!drop_static) h.diagonal() = ising_z_diagonal(step.detuning, ctx.couplings).cast<Complex>();
  if (!step.driven()) return h;
  const int m = *step.target;
  if (ctx.mode == DriveMode::kResonant) return h + step.rabi * pauli('y', m, n);

  const double drive_phase = step.phase + (ctx.phase_correction ? -frame_phase : 0.0);
  for (int j = 0; j < n; ++j) {
    const double theta = ctx.detuning(m, j) * t + frame_phase + drive_phase;
    const double c = std::cos(theta), s = std::sin(theta);
    const auto mask = spin_mask(j, n);
    // Omega (cos theta sigma^y - sin theta sigma^x) on spin j.
    for (Eigen::Index a = 0; a < dim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const bool down = ua & mask;
      const auto b = static_cast<Eigen::Index>(ua ^ mask);
      const Complex y = down ? -kI : kI;
      h(b, a) += step.rabi * (c * y - s);
    }
  }
  return h;
}

/// One constant-Hamiltonian piece of a sequence.
struct Segment {
  enum class Kind { kDiagonal, kPaired, kDense };
  Kind kind = Kind::kDiagonal;
  double duration = 0.0;
  const RealVector* energies = nullptr;  // diagonal part (kDiagonal, kPaired)
  double rabi = 0.0;                     // kPaired: Omega sigma^y on target
  int target = -1;
  ComplexMatrix hamiltonian;             // kDense

  /// Row-sum bound on the operator norm.
  double norm_bound() const {
    switch (kind) {
      case Kind::kDiagonal: return energies->cwiseAbs().maxCoeff();
      case Kind::kPaired: return energies->cwiseAbs().maxCoeff() + std::abs(rabi);
      case Kind::kDense: return hamiltonian.cwiseAbs().rowwise().sum().maxCoeff();
    }
    return 0.0;
  }
};

/// exp(-i H t) stored in the cheapest exact form.
class StepPropagator {
 public:
  static StepPropagator make(const Segment& seg, double t) {
    StepPropagator p;
    switch (seg.kind) {
      case Segment::Kind::kDiagonal:
        p.kind_ = Segment::Kind::kDiagonal;
        p.phases_ = (-kI * t * seg.energies->cast<Complex>().array()).exp().matrix();
        break;
      case Segment::Kind::kPaired: p = paired(*seg.energies, seg.rabi, seg.target, t); break;
      case Segment::Kind::kDense:
        p.kind_ = Segment::Kind::kDense;
        p.dense_ = expm_hermitian(seg.hamiltonian, t);
        break;
    }
    return p;
  }

  void apply(PureState& psi) const {
    switch (kind_) {
      case Segment::Kind::kDiagonal: psi.array() *= phases_.array(); break;
      case Segment::Kind::kPaired:
        for (const auto& b : blocks_) {
          const Complex x0 = psi(b.up), x1 = psi(b.down);
          psi(b.up) = b.u00 * x0 + b.u01 * x1;
          psi(b.down) = b.u10 * x0 + b.u11 * x1;
        }
        break;
      case Segment::Kind::kDense: psi = dense_ * psi; break;
    }
  }

  /// rho -> U rho U^dagger.
  void apply(DensityMatrix& rho) const {
    switch (kind_) {
      case Segment::Kind::kDiagonal:
        rho.array() *= (phases_ * phases_.adjoint()).array();
        break;
      case Segment::Kind::kPaired:
        for (const auto& b : blocks_) {
          for (Eigen::Index c = 0; c < rho.cols(); ++c) {
            const Complex x0 = rho(b.up, c), x1 = rho(b.down, c);
            rho(b.up, c) = b.u00 * x0 + b.u01 * x1;
            rho(b.down, c) = b.u10 * x0 + b.u11 * x1;
          }
        }
        for (const auto& b : blocks_) {
          for (Eigen::Index r = 0; r < rho.rows(); ++r) {
            const Complex x0 = rho(r, b.up), x1 = rho(r, b.down);
            rho(r, b.up) = x0 * std::conj(b.u00) + x1 * std::conj(b.u01);
            rho(r, b.down) = x0 * std::conj(b.u10) + x1 * std::conj(b.u11);
          }
        }
        break;
      case Segment::Kind::kDense: rho = dense_ * rho * dense_.adjoint(); break;
    }
  }

  ComplexMatrix matrix(Eigen::Index dim) const {
    switch (kind_) {
      case Segment::Kind::kDiagonal: return phases_.asDiagonal();
      case Segment::Kind::kPaired: {
        ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
        for (const auto& b : blocks_) {
          u(b.up, b.up) = b.u00;
          u(b.up, b.down) = b.u01;
          u(b.down, b.up) = b.u10;
          u(b.down, b.down) = b.u11;
        }
        return u;
      }
      case Segment::Kind::kDense: return dense_;
    }
    return {};
  }

 private:
  struct Block {
    Eigen::Index up, down;
    Complex u00, u01, u10, u11;
  };

  // H restricted to {|.. up_m ..>, |.. down_m ..>} is
  // [[d0, -i Omega], [i Omega, d1]].
  static StepPropagator paired(const RealVector& e, double rabi, int target, double t) {
    StepPropagator p;
    p.kind_ = Segment::Kind::kPaired;
    const auto dim = e.size();
    const int n = spins_for_dimension(dim);
    const auto mask = spin_mask(target, n);
    p.blocks_.reserve(static_cast<std::size_t>(dim / 2));
    for (Eigen::Index a = 0; a < dim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      if (ua & mask) continue;
      const auto b = static_cast<Eigen::Index>(ua | mask);
      const double c = 0.5 * (e(a) + e(b));
      const double d = 0.5 * (e(a) - e(b));
      const double w = std::hypot(d, rabi);
      const Complex g = std::exp(-kI * (c * t));
      const double cw = std::cos(w * t);
      const double sw = w > 0.0 ? std::sin(w * t) / w : t;
      p.blocks_.push_back({a, b, g * (cw - kI * sw * d), -g * sw * rabi, g * sw * rabi,
                           g * (cw + kI * sw * d)});
    }
    return p;
  }

  Segment::Kind kind_ = Segment::Kind::kDiagonal;
  ComplexVector phases_;
  std::vector<Block> blocks_;
  ComplexMatrix dense_;
};

/// Calls `visit(const Segment&)` for each constant piece of `seq` in time
/// order and advances `clock` through the sequence.
template <class Visitor>
void for_each_segment(const PulseSequence& seq, const DriveContext& ctx, DriveClock& clock,
                      Visitor&& visit) {
  const int n = ctx.spins();
  require(seq.spins == n || seq.steps.empty(), ErrorCode::kDimension,
          "sequence and drive context disagree on the spin count");
  const auto dim = static_cast<Eigen::Index>(hilbert_dimension(n));
  const RealVector zero = RealVector::Zero(dim);
  RealVector diag;
  std::optional<double> diag_field;
  for (const auto& step : seq.steps) {
    step.validate(n);
    clock.enter_field(step.detuning);
    if (!diag_field || *diag_field != step.detuning) {
      diag = ising_z_diagonal(step.detuning, ctx.couplings);
      diag_field = step.detuning;
    }
    Segment seg;
    if (!step.driven()) {
      seg.kind = Segment::Kind::kDiagonal;
      seg.duration = step.duration;
      seg.energies = &diag;
      visit(seg);
    } else if (ctx.mode == DriveMode::kResonant) {
      seg.kind = Segment::Kind::kPaired;
      seg.duration = step.duration;
      seg.energies = ctx.ideal_pulses ? &zero : &diag;
      seg.rabi = step.rabi;
      seg.target = *step.target;
      visit(seg);
    } else {
      const double span = step.duration * ctx.slices_per_detuning * ctx.max_detuning(*step.target);
      const int slices = std::max(1, static_cast<int>(std::ceil(span)));
      const double h = step.duration / slices;
      seg.kind = Segment::Kind::kDense;
      seg.duration = h;
      for (int k = 0; k < slices; ++k) {
        seg.hamiltonian = step_hamiltonian(step, ctx, clock.time + (k + 0.5) * h, clock.frame_phase);
        visit(seg);
      }
    }
    clock.time += step.duration;
  }
}

template <QuantumState S>
void apply_sequence(S& state, const PulseSequence& seq, const DriveContext& ctx, DriveClock& clock) {
  for_each_segment(seq, ctx, clock, [&](const Segment& seg) {
    StepPropagator::make(seg, seg.duration).apply(state);
  });
}

inline PureState evolve_pure(PureState psi, const PulseSequence& seq, const DriveContext& ctx,
                             DriveClock& clock) {
  require(psi.size() == static_cast<Eigen::Index>(hilbert_dimension(ctx.spins())),
          ErrorCode::kDimension, "state dimension does not match the spin count");
  apply_sequence(psi, seq, ctx, clock);
  return psi;
}

inline PureState evolve_pure(const PureState& psi, const PulseSequence& seq,
                             const DriveContext& ctx) {
  DriveClock clock;
  return evolve_pure(psi, seq, ctx, clock);
}

/// Product of step propagators over one sequence.
inline ComplexMatrix sequence_unitary(const PulseSequence& seq, const DriveContext& ctx) {
  const auto dim = static_cast<Eigen::Index>(hilbert_dimension(ctx.spins()));
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  DriveClock clock;
  for_each_segment(seq, ctx, clock, [&](const Segment& seg) {
    u = StepPropagator::make(seg, seg.duration).matrix(dim) * u;
  });
  return u;
}

/// Ground state of H_eff at t = 0 (alpha = 0, b = b0).
inline PureState initial_ground_state(const RealMatrix& couplings, const Schedule& schedule) {
  const EffectiveHamiltonian h(couplings, schedule);
  return ground_state(h.at(0.0)).state;
}

/// Steps `state` cycle by cycle with alpha and b frozen at each cycle's
/// start; `advance(state, sequence, start_time)` propagates one cycle.
/// Every `stride`-th boundary and the final one are recorded.
template <QuantumState S, class Advance>
Trajectory<S> stroboscopic_run(const Schedule& s, int spins, S state, int stride,
                               Advance&& advance) {
  require(stride >= 1, ErrorCode::kInvalidArgument, "sample stride must be at least one");
  const auto t = cycle_boundaries(s, spins);
  Trajectory<S> traj;
  auto record = [&](int n) {
    traj.samples.push_back({t[n], s.alpha_at(t[n]), s.field_at(t[n]), s.beta_at(t[n], spins), state});
  };
  record(0);
  for (int n = 0; n < s.cycles; ++n) {
    const auto seq = build_sequence(spins, s.field_at(t[n]), s.alpha_at(t[n]), s.free_time,
                                    s.pulse_time);
    advance(state, seq, t[n]);
    if ((n + 1) % stride == 0 || n + 1 == s.cycles) record(n + 1);
  }
  return traj;
}

inline void check_separation(const DriveContext& ctx, double rabi) {
  if (ctx.mode != DriveMode::kFull || ctx.spins() < 2) return;
  const double sep = ctx.min_separation();
  if (sep < 10.0 * std::abs(rabi))
    warn("smallest resonance separation " + std::to_string(sep) +
         " rad/s is not large against the Rabi frequency " + std::to_string(rabi) + " rad/s");
}

inline Trajectory<PureState> adiabatic_run(const DriveContext& ctx, const Schedule& schedule,
                                           std::optional<PureState> initial = std::nullopt,
                                           int stride = 1) {
  ctx.validate();
  schedule.validate();
  check_separation(ctx, schedule.rabi());
  PureState psi = initial ? *initial : initial_ground_state(ctx.couplings, schedule);
  validate_state(psi);
  require(psi.size() == static_cast<Eigen::Index>(hilbert_dimension(ctx.spins())),
          ErrorCode::kDimension, "initial state dimension does not match the spin count");
  DriveClock clock;
  return stroboscopic_run(schedule, ctx.spins(), std::move(psi), stride,
                          [&](PureState& state, const PulseSequence& seq, double start) {
                            clock.time = start;
                            apply_sequence(state, seq, ctx, clock);
                          });
}

struct IntegratorOptions {
  double relative_tolerance = 1e-9;
  double absolute_tolerance = 1e-12;
  int stride = 1;
};

namespace detail {
using OdeState = std::vector<Complex>;

/// Integrates `rhs` with adaptive Dormand-Prince and calls
/// `observe(state, index)` at every requested time.
template <class Rhs, class Observe>
void integrate_at(Rhs&& rhs, OdeState& x, const std::vector<double>& times, double scale,
                  const IntegratorOptions& opt, Observe&& observe) {
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_controlled(opt.absolute_tolerance, opt.relative_tolerance,
                                         odeint::runge_kutta_dopri5<OdeState>());
  const double span = times.back() - times.front();
  double dt = 1e-3 / std::max(scale, 1e-300);
  if (span > 0.0) dt = std::min(dt, span);
  if (dt <= 0.0) dt = 1.0;
  std::size_t index = 0;
  try {
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), dt,
                            [&](const OdeState& s, double) { observe(s, index++); });
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kIntegrator, e.what());
  }
  require(index == times.size(), ErrorCode::kIntegrator, "integrator skipped output times");
}
}  // namespace detail

/// Integrates i psi' = H_eff(t) psi with continuous alpha(t), b(t), beta(t),
/// sampled at the cycle boundaries of the pulse route.
inline Trajectory<PureState> effective_run(const RealMatrix& couplings, const Schedule& schedule,
                                           std::optional<PureState> initial = std::nullopt,
                                           const IntegratorOptions& opt = {}) {
  require(opt.stride >= 1, ErrorCode::kInvalidArgument, "sample stride must be at least one");
  const EffectiveHamiltonian h(couplings, schedule);
  const int n = h.spins();
  PureState psi0 = initial ? *initial : ground_state(h.at(0.0)).state;
  validate_state(psi0);
  require(psi0.size() == static_cast<Eigen::Index>(hilbert_dimension(n)), ErrorCode::kDimension,
          "initial state dimension does not match the spin count");

  const auto times = cycle_boundaries(schedule, n);
  const auto dim = psi0.size();
  detail::OdeState x(psi0.data(), psi0.data() + dim);
  auto rhs = [&](const detail::OdeState& in, detail::OdeState& out, double t) {
    out.resize(in.size());
    Eigen::Map<const ComplexVector> xi(in.data(), dim);
    ComplexVector y(dim);
    h.apply_generator(t, xi, y);
    std::copy(y.data(), y.data() + dim, out.begin());
  };
  const double scale = h.at(0.0).cwiseAbs().rowwise().sum().maxCoeff();

  Trajectory<PureState> traj;
  const auto last = times.size() - 1;
  detail::integrate_at(rhs, x, times, scale, opt, [&](const detail::OdeState& s, std::size_t k) {
    if (k % static_cast<std::size_t>(opt.stride) != 0 && k != last) return;
    const double t = times[k];
    traj.samples.push_back({t, schedule.alpha_at(t), schedule.field_at(t), schedule.beta_at(t, n),
                            Eigen::Map<const ComplexVector>(s.data(), dim)});
  });
  return traj;
}

/// Phase pi |Omega / (8 Delta)| picked up by a spin detuned by Delta during
/// a pi/2 pulse of Rabi frequency Omega.
inline double zeeman_phase(double rabi, double detuning) {
  require(detuning != 0.0, ErrorCode::kResonantSpin,
          "zero detuning: the spin is driven, not shifted");
  return constants::kPi * std::abs(rabi / (8.0 * detuning));
}

/// sum_{k != 0} |<k| dH/dt |0> / (E_k - E_0)^2|^2 for H_eff at time t.
inline double adiabaticity_estimate(const Schedule& schedule, const RealMatrix& couplings,
                                    double t) {
  const EffectiveHamiltonian h(couplings, schedule);
  if (schedule.rate == 0.0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h.at(t));
  require(eig.info() == Eigen::Success, ErrorCode::kEigenSolver, "eigendecomposition failed");
  const RealVector& e = eig.eigenvalues();
  const double range = e(e.size() - 1) - e(0);
  require(e.size() > 1 && e(1) - e(0) > 1e-9 * range, ErrorCode::kDegenerate,
          "instantaneous ground state is degenerate");
  const ComplexVector column = eig.eigenvectors().adjoint() * (h.derivative(t) * eig.eigenvectors().col(0));
  double sum = 0.0;
  for (Eigen::Index k = 1; k < e.size(); ++k) {
    const double de = e(k) - e(0);
    sum += std::norm(column(k)) / (de * de * de * de);
  }
  return sum;
}

}  // namespace ionsim
