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

// Acceptance checks. Each criterion prints one line
//   criterion N: PASS|FAIL <measured values> (<tolerance>)
// and the program exits 0 once every requested criterion was evaluated,
// 2 if an evaluation threw. With --strict a FAIL verdict exits 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ionsim/io/coupling_table.hpp"
#include "ionsim/observables.hpp"
#include "ionsim/open_system.hpp"
#include "ionsim/pulse_engine.hpp"
#include "ionsim/trap_model.hpp"
#include "oracles.hpp"

using namespace ionsim;

namespace {

constexpr double kTwoPi = constants::kTwoPi;
const std::string kSource = IONSIM_SOURCE_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

io::CouplingTable table(const char* name) { return io::ingest_table(kSource + "/data/" + name); }

double max_deviation(const std::vector<ObservableRow>& a, const std::vector<ObservableRow>& b) {
  double w = 0.0;
  for (std::size_t k = 0; k < a.size() && k < b.size(); ++k)
    w = std::max(w, std::abs(a[k].concurrence - b[k].concurrence));
  return w;
}

double peak_concurrence(const std::vector<ObservableRow>& rows) {
  double p = 0.0;
  for (const auto& r : rows) p = std::max(p, r.concurrence);
  return p;
}

Schedule ramp(double b0, double rate, double dt1, double dt, int spins) {
  Schedule s{b0, rate, dt1, dt, 1};
  s.cycles = cycles_for_duration(s, spins, 10.0 / rate);
  return s;
}

// ---- 1: harmonic modes ------------------------------------------------------

Verdict criterion1() {
  Stopwatch clock;
  const auto species = IonSpecies::ytterbium171();
  const auto cal = calibrate(AxialPotential::harmonic(kTwoPi * 50e3), species, 4,
                             {kTwoPi * 50e3, 0.1});
  const double seconds = clock.seconds();
  const double expect[] = {86.6, 120.5, 152.6};
  bool ok = seconds < 1.0;
  double worst = 0.0;
  std::string values;
  for (int k = 0; k < 3; ++k) {
    const double nu = cal.solution.mode_frequencies(k + 1) / (kTwoPi * 1e3);
    worst = std::max(worst, std::abs(nu / expect[k] - 1.0));
    values += fmt(" %.3f", nu);
  }
  ok = ok && worst <= 0.005;
  return {ok, "modes" + values + fmt(" kHz, worst rel. error %.2e (tol 5e-3), %.3f s (limit 1 s)",
                                     worst, seconds)};
}

// ---- 2: qubit splittings ----------------------------------------------------

Verdict criterion2() {
  Stopwatch clock;
  const auto species = IonSpecies::ytterbium171();
  bool ok = true;
  std::string detail;
  int misses = 0, rounding_misses = 0;
  for (const char* name : {"table1_harmonic.txt", "table4_lde.txt"}) {
    const auto t = table(name);
    const auto calc = qubit_splittings(t.positions, *t.gradient, species);
    for (int i = 0; i < t.ions; ++i) {
      const double c = calc[i] / (kTwoPi * 1e6), p = t.splittings[i] / (kTwoPi * 1e6);
      const double err = std::abs(c - p);
      if (err > 0.01 * std::abs(p)) {
        ok = false;
        ++misses;
        detail += fmt(" [%s ion %d: %.3f vs %.1f MHz]", name, i + 1, c, p);
      }
      // Printed to 0.1 MHz: a half unit of rounding is 0.05 MHz.
      if (err > std::max(0.01 * std::abs(p), 0.05)) ++rounding_misses;
    }
  }
  // Worked examples: single positions with the reference gradients.
  const double ex1 = qubit_splittings(std::vector<double>{-28.7e-6}, 29.38, species)[0] / (kTwoPi * 1e6);
  const double ex2 = qubit_splittings(std::vector<double>{-76.9e-6}, 19.27, species)[0] / (kTwoPi * 1e6);
  const bool examples = std::abs(ex1 / -11.8 - 1.0) <= 0.01 && std::abs(ex2 / -20.7 - 1.0) <= 0.01;
  ok = ok && examples;
  detail += fmt(", examples %.2f MHz (-11.8) and %.2f MHz (-20.7) %s", ex1, ex2,
                examples ? "within 1%" : "outside 1%");
  const double seconds = clock.seconds();
  ok = ok && seconds < 1.0;
  return {ok, fmt("%d of 8 entries outside 1%%, %d outside max(1%%, 0.05 MHz)", misses,
                  rounding_misses) + detail + fmt(", %.3f s", seconds)};
}

// ---- 3: Lamb-Dicke calibration --------------------------------------------

Verdict criterion3() {
  Stopwatch clock;
  const auto cal = calibrate(AxialPotential::harmonic(kTwoPi * 50e3), IonSpecies::ytterbium171(), 4,
                             {kTwoPi * 50e3, 0.1});
  const double seconds = clock.seconds();
  const bool ok = std::abs(cal.gradient - 29.4) <= 0.6 && seconds < 1.0;
  return {ok, fmt("gradient %.3f T/m (target 29.4 +- 0.6), eta_max %.4f, %.3f s", cal.gradient,
                  cal.solution.max_lamb_dicke(), seconds)};
}

// ---- 4: Zeeman phase ------------------------------------------------------

Verdict criterion4() {
  const auto t = table("table4_lde.txt");
  const double phi = zeeman_phase(pulse_rabi(1e-6), t.splittings[1] - t.splittings[2]);
  const bool ok = std::abs(phi / 7.6e-3 - 1.0) <= 0.03;
  return {ok, fmt("Phi_23 = %.4e (target 7.6e-3 +- 3%%)", phi)};
}

// ---- 5: XX gap ------------------------------------------------------------

Verdict criterion5() {
  const auto t = table("table4_lde.txt");
  const double beta = 100.0 / 208.0;
  auto gap_of = [&](const RealMatrix& j, double b) { return ground_state(build_effective({j, 0.0, 1.0, b})).gap; };
  const double g = gap_of(t.couplings, beta);
  const double reference = 21.0;
  // Reading A: reference value is a cyclic frequency, gap / 2pi in Hz.
  const double a = g / kTwoPi;
  // Reading B: reference value is an angular frequency in rad/s.
  const double b = g;
  const bool match_a = std::abs(a / reference - 1.0) <= 0.05;
  const bool match_b = std::abs(b / reference - 1.0) <= 0.05;
  const bool ok = match_a != match_b;
  // Diagnostics: other conventions that could underlie the reference value.
  const double doubled = gap_of(2.0 * t.couplings, beta) / kTwoPi;
  const double unit_beta = gap_of(t.couplings, 1.0) / kTwoPi;
  return {ok, fmt("gap/2pi = %.3f Hz, gap = %.2f rad/s, reference 21 (tol 5%%): Hz reading %s, "
                  "rad/s reading %s; diagnostics: ordered-pair sum %.3f Hz, beta = 1 %.3f Hz",
                  a, b, match_a ? "match" : "no match", match_b ? "match" : "no match", doubled,
                  unit_beta)};
}

// ---- 6: adiabatic preparation ---------------------------------------------

Verdict criterion6() {
  Stopwatch clock;
  const auto j = table("table3_lde_wide.txt").couplings;
  const auto ctx = DriveContext::resonant(j);
  const double rates[] = {3.2, 10.6, 15.9};
  std::vector<double> fidelity, deviation;
  double peak = 0.0;
  for (double r : rates) {
    const auto s = ramp(kTwoPi * 100.0, kTwoPi * r, 100e-6, 1e-6, 4);
    const auto pulse = trajectory_observables(adiabatic_run(ctx, s), j);
    const auto eff = trajectory_observables(effective_run(j, s), j);
    fidelity.push_back(pulse.back().fidelity);
    deviation.push_back(max_deviation(pulse, eff));
    if (r == rates[0]) peak = peak_concurrence(pulse);
  }
  const bool a = fidelity[0] >= 0.95 && peak >= 0.8;
  const bool b = fidelity[0] > fidelity[1] && fidelity[1] > fidelity[2];
  const bool c = deviation[0] <= 0.05 && deviation[1] <= 0.05 && deviation[2] <= 0.05;
  return {a && b && c,
          fmt("(a) %s F = %.4f (>= 0.95), peak C = %.4f (>= 0.8); (b) %s F = %.4f, %.4f, %.4f; "
              "(c) %s max |dC| = %.4f, %.4f, %.4f (<= 0.05); %.1f s",
              a ? "ok" : "miss", fidelity[0], peak, b ? "ok" : "miss", fidelity[0], fidelity[1],
              fidelity[2], c ? "ok" : "miss", deviation[0], deviation[1], deviation[2],
              clock.seconds())};
}

// ---- 7: slow pulses -------------------------------------------------------

Verdict criterion7() {
  Stopwatch clock;
  const auto j = table("table3_lde_wide.txt").couplings;
  const auto ctx = DriveContext::resonant(j);
  bool ok = true;
  std::string detail;
  for (double r : {3.2, 10.6, 15.9}) {
    double d[2];
    int k = 0;
    for (double dt : {1e-6, 5e-6}) {
      const auto s = ramp(kTwoPi * 100.0, kTwoPi * r, 100e-6, dt, 4);
      d[k++] = max_deviation(trajectory_observables(adiabatic_run(ctx, s), j),
                             trajectory_observables(effective_run(j, s), j));
    }
    ok = ok && d[1] > d[0];
    detail += fmt(" r/2pi = %.1f Hz: %.4f (1 us) vs %.4f (5 us);", r, d[0], d[1]);
  }
  return {ok, "max |dC|" + detail + fmt(" %.1f s", clock.seconds())};
}

// ---- 8: six ions ----------------------------------------------------------

Verdict criterion8() {
  Stopwatch clock;
  const auto j = table("table5_lde_six.txt").couplings;
  const auto ctx = DriveContext::resonant(j);
  double f[2];
  int k = 0;
  for (double dt : {0.5e-6, 1e-6}) {
    const auto s = ramp(kTwoPi * 200.0, kTwoPi * 8.0, 40e-6, dt, 6);
    f[k++] = trajectory_observables(adiabatic_run(ctx, s), j).back().fidelity;
  }
  return {f[0] > f[1], fmt("final F = %.4f (0.5 us) vs %.4f (1 us); %.1f s", f[0], f[1], clock.seconds())};
}

// ---- 9: dephasing ---------------------------------------------------------

Verdict criterion9() {
  Stopwatch clock;
  const auto j = table("table4_lde.txt").couplings;
  const auto ctx = DriveContext::resonant(j);
  const auto s = ramp(kTwoPi * 100.0, kTwoPi * 10.0, 100e-6, 1e-6, 4);
  const double clean = end_to_end_concurrence(adiabatic_run(ctx, s).back().state);
  const auto mixed = master_adiabatic_run(ctx, s, DephasingConfig::from_time(0.8));
  double drift = 0.0;
  for (const auto& x : mixed.samples) drift = std::max(drift, std::abs(x.state.trace().real() - 1.0));
  const double c = end_to_end_concurrence(mixed.back().state);
  const bool ok = c < clean && c > 0.5 && drift <= 1e-8;
  // Diagnostic only: the same master equation under the effective Hamiltonian.
  const double effective =
      end_to_end_concurrence(master_effective_run(j, s, DephasingConfig::from_time(0.8)).back().state);
  return {ok, fmt("final C = %.4f (gamma = 0: %.4f, floor 0.5), max |tr - 1| = %.1e over %zu samples "
                  "(tol 1e-8); effective-route final C %.4f; %.1f s",
                  c, clean, drift, mixed.size(), effective, clock.seconds())};
}

// ---- 10: property suite ---------------------------------------------------

RealMatrix random_couplings(int n, std::mt19937& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  RealMatrix j = RealMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) j(a, b) = j(b, a) = u(rng);
  return j;
}

PureState random_state(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  PureState psi(static_cast<Eigen::Index>(hilbert_dimension(n)));
  for (Eigen::Index k = 0; k < psi.size(); ++k) psi(k) = Complex(g(rng), g(rng));
  return psi.normalized();
}

Verdict criterion10() {
  Stopwatch clock;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::string> misses;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) misses.push_back(what);
  };

  // Unitarity of pulse cycles, trace and Hermiticity of master runs.
  double unitarity = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const auto j = random_couplings(n, rng, kTwoPi * 400.0);
    const auto seq = build_sequence(n, kTwoPi * 150.0, u(rng), 100e-6, 1e-6);
    const auto m = sequence_unitary(seq, DriveContext::resonant(j));
    unitarity = std::max(unitarity, operator_distance(m.adjoint() * m, ComplexMatrix::Identity(m.rows(), m.cols())));
  }
  check(unitarity < 1e-10, fmt("unitarity %.1e", unitarity));
  {
    const auto j = table("table4_lde.txt").couplings;
    Schedule s{kTwoPi * 100.0, kTwoPi * 10.0, 100e-6, 1e-6, 200};
    const auto traj = master_adiabatic_run(DriveContext::resonant(j), s, {5.0});
    double tr = 0.0, herm = 0.0;
    for (const auto& x : traj.samples) {
      tr = std::max(tr, std::abs(x.state.trace().real() - 1.0));
      herm = std::max(herm, hermiticity_defect(x.state));
    }
    check(tr < 1e-10 && herm < 1e-12, fmt("trace %.1e hermiticity %.1e", tr, herm));
  }

  // First-order Trotter convergence.
  double slope = 0.0;
  {
    const int n = 3;
    const auto j = random_couplings(n, rng, kTwoPi * 200.0);
    const double b = kTwoPi * 150.0, alpha = 0.7, total = 1e-3;
    auto ctx = DriveContext::resonant(j);
    ctx.ideal_pulses = true;
    const auto psi0 = random_state(n, rng);
    const PureState exact =
        oracle::expm(oracle::ising('z', b, j) + alpha * oracle::ising('x', b, j), total) * psi0;
    std::vector<double> steps, errors;
    for (int cycles : {16, 32, 64, 128}) {
      const auto seq = build_sequence(n, b, alpha, total / cycles, 1e-7);
      PureState psi = psi0;
      DriveClock dc;
      for (int c = 0; c < cycles; ++c) apply_sequence(psi, seq, ctx, dc);
      steps.push_back(total / cycles);
      errors.push_back((psi - exact).norm());
    }
    slope = oracle::log_log_slope(steps, errors);
  }
  check(std::abs(slope - 1.0) <= 0.1, fmt("Trotter slope %.3f", slope));

  // One-cycle factorisation against the explicit exponential product.
  double factor = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const auto j = random_couplings(n, rng, kTwoPi * 500.0);
    const double b = kTwoPi * 400.0 * (u(rng) - 0.5), dt1 = 50e-6 + 200e-6 * u(rng), alpha = u(rng);
    auto ctx = DriveContext::resonant(j);
    ctx.ideal_pulses = true;
    const ComplexMatrix expect =
        oracle::expm(oracle::ising('x', b, j), alpha * dt1) * oracle::expm(oracle::ising('z', b, j), dt1);
    factor = std::max(factor, operator_distance(sequence_unitary(build_sequence(n, b, alpha, dt1, 1e-6), ctx), expect));
  }
  check(factor < 1e-8, fmt("factorisation %.1e", factor));

  // Concurrence oracle triple.
  {
    PureState bell = PureState::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    double err = std::abs(concurrence(to_density(bell)) - 1.0);
    err = std::max(err, concurrence(to_density(basis_state(2, 2))));
    for (double p : {0.2, 0.5, 1.0}) {
      const ComplexMatrix w = p * to_density(bell) + (1.0 - p) * ComplexMatrix::Identity(4, 4) / 4.0;
      err = std::max(err, std::abs(concurrence(w) - oracle::werner_concurrence(p)));
    }
    check(err < 1e-9, fmt("concurrence %.1e", err));
  }

  // Analytic Hessian against central differences.
  {
    const auto species = IonSpecies::ytterbium171();
    const double omega = kTwoPi * 50e3;
    const double l = std::cbrt(species.coulomb_strength() / (species.mass * omega * omega));
    double worst = 0.0;
    for (const auto& pot : {AxialPotential::harmonic(omega), AxialPotential::triple_well(60e-6, omega, 0.8 * omega)}) {
      const auto x = find_equilibrium(pot, species, 4);
      const auto c = pot.coefficients(species.mass);
      const oracle::ChainEnergy f{c.c2, c.c4, c.c6, species.coulomb_strength()};
      const auto h = hessian(x, pot, species).matrix;
      const auto fd = oracle::fd_hessian(std::cref(f), x, 1e-3 * l);
      worst = std::max(worst, (h - fd).cwiseAbs().maxCoeff() / h.cwiseAbs().maxCoeff());
    }
    check(worst < 1e-5, fmt("Hessian %.1e", worst));
  }

  // Eigensolver against the general complex solver on Kronecker-built operators.
  {
    double worst = 0.0;
    for (int n = 1; n <= 3; ++n) {
      const auto j = random_couplings(n, rng, kTwoPi * 300.0);
      const double b = kTwoPi * 200.0 * u(rng), alpha = u(rng), beta = 0.3 + 0.7 * u(rng);
      const auto g = ground_state(build_effective({j, b, alpha, beta}));
      const auto e = oracle::eigenvalues(beta * (oracle::ising('z', b, j) + alpha * oracle::ising('x', b, j)));
      const double scale = std::max(1.0, std::abs(e.back()));
      for (std::size_t k = 0; k < e.size(); ++k)
        worst = std::max(worst, std::abs(g.spectrum(static_cast<Eigen::Index>(k)) - e[k]) / scale);
    }
    check(worst < 1e-10, fmt("eigensolve %.1e", worst));
  }

  const double seconds = clock.seconds();
  check(seconds < 60.0, fmt("runtime %.1f s", seconds));
  std::string detail = fmt("unitarity %.1e, Trotter slope %.3f (1.0 +- 0.1), factorisation %.1e (1e-8); ",
                           unitarity, slope, factor);
  detail += misses.empty() ? "all properties hold" : "misses:";
  for (const auto& m : misses) detail += " " + m + ";";
  return {misses.empty(), detail + fmt(" %.1f s (limit 60 s)", seconds)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> which;
  bool strict = false;
  app.add_option("--criterion", which, "criteria to evaluate (default: all)")->check(CLI::Range(1, 10));
  app.add_flag("--strict", strict, "exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);
  if (which.empty())
    for (int k = 1; k <= 10; ++k) which.push_back(k);

  const std::function<Verdict()> criteria[] = {criterion1, criterion2, criterion3, criterion4,
                                               criterion5, criterion6, criterion7, criterion8,
                                               criterion9, criterion10};
  bool all = true;
  for (int k : which) {
    try {
      const auto v = criteria[k - 1]();
      std::printf("criterion %d: %s %s\n", k, v.pass ? "PASS" : "FAIL", v.detail.c_str());
      all = all && v.pass;
    } catch (const std::exception& e) {
      std::printf("criterion %d: ERROR %s\n", k, e.what());
      return 2;
    }
    std::fflush(stdout);
  }
  return strict && !all ? 1 : 0;
}
