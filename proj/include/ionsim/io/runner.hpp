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

// Subcommand execution. Outputs are plain text tables headed by comment
// lines carrying the FNV-1a hash of the config text; identical configs
// give byte-identical files.

#pragma once

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ionsim/constants.hpp"
#include "ionsim/error.hpp"
#include "ionsim/io/config.hpp"
#include "ionsim/io/coupling_table.hpp"
#include "ionsim/observables.hpp"
#include "ionsim/open_system.hpp"
#include "ionsim/pulse_engine.hpp"
#include "ionsim/trap_model.hpp"

namespace ionsim::io {

inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string output_header(Command c, const RunConfig& cfg) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# ionsim %s\n# config fnv1a64:%016" PRIx64 "\n",
                std::string(to_string(c)).c_str(), fnv1a(cfg.text));
  return buf;
}

namespace detail {
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}
}  // namespace detail

struct TrapResult {
  ChainSolution chain;
  double potential_scale = 1.0;
};

inline TrapResult solve_trap(const RunConfig& cfg) {
  require(cfg.trap.has_value(), ErrorCode::kValidation, "'trap' section is required");
  const auto& t = *cfg.trap;
  cfg.species.validate();
  if (t.calibrate) {
    auto cal = calibrate(t.potential, cfg.species, t.ions, *t.calibrate);
    return {std::move(cal.solution), cal.scale};
  }
  return {solve_chain(t.potential, cfg.species, t.ions, *t.gradient), 1.0};
}

struct SpinInputs {
  RealMatrix couplings;             // rad/s
  std::vector<double> resonances;   // rad/s, may be empty
};

inline SpinInputs resolve_couplings(const RunConfig& cfg) {
  if (cfg.source == CouplingSource::kTable) {
    auto t = ingest_table(cfg.table);
    return {std::move(t.couplings), std::move(t.splittings)};
  }
  require(cfg.source == CouplingSource::kComputed, ErrorCode::kValidation,
          "no coupling source configured");
  auto r = solve_trap(cfg);
  return {std::move(r.chain.couplings), std::move(r.chain.splittings)};
}

inline DriveContext drive_context(const RunConfig& cfg, const SpinInputs& in) {
  DriveContext ctx;
  ctx.couplings = in.couplings;
  ctx.mode = cfg.drive.mode;
  ctx.phase_correction = cfg.drive.phase_correction;
  ctx.ideal_pulses = cfg.drive.ideal_pulses;
  ctx.slices_per_detuning = cfg.drive.slices_per_detuning;
  if (ctx.mode == DriveMode::kFull) {
    require(static_cast<Eigen::Index>(in.resonances.size()) == in.couplings.rows(),
            ErrorCode::kValidation, "full drive mode needs qubit splittings for every spin");
    ctx.resonances = in.resonances;
  }
  ctx.validate();
  return ctx;
}

/// Chain report; the body is itself a valid table file.
inline std::string chain_report(Command c, const RunConfig& cfg, const TrapResult& r) {
  std::ostringstream out;
  out << output_header(c, cfg);
  out << "# potential_scale " << detail::num(r.potential_scale) << '\n';
  out << "# max_lamb_dicke " << detail::num(r.chain.max_lamb_dicke()) << '\n';
  const auto side = sideband_negligibility(r.chain.lamb_dicke,
                                           std::vector<double>(r.chain.ions(), 0.0));
  out << "# sidebands_negligible " << (side.all_negligible() ? "yes" : "no") << '\n';
  out << export_table(table_from_chain(r.chain));
  return out.str();
}

inline std::string trajectory_table(Command c, const RunConfig& cfg,
                                    const std::vector<ObservableRow>& rows, std::string_view route) {
  std::ostringstream out;
  out << output_header(c, cfg);
  out << "# route " << route << '\n';
  out << "t_s\talpha\tb_over_2pi_Hz\tbeta\tfidelity\tconcurrence_1N\tgap_over_2pi_Hz\tgamma_per_s\n";
  for (const auto& r : rows) {
    out << detail::num(r.time) << '\t' << detail::num(r.alpha) << '\t'
        << detail::num(r.field / constants::kTwoPi) << '\t' << detail::num(r.beta) << '\t'
        << detail::num(r.fidelity) << '\t' << detail::num(r.concurrence) << '\t'
        << detail::num(r.gap / constants::kTwoPi) << '\t' << detail::num(r.dephasing_rate) << '\n';
  }
  return out.str();
}

struct SimulationResult {
  Schedule schedule;
  std::vector<ObservableRow> pulse;
  std::vector<ObservableRow> effective;  // empty unless compared
};

/// Pulse route (and optionally the effective route) for one parameter set.
inline SimulationResult simulate(const DriveContext& ctx, const Schedule& schedule, double gamma,
                                 bool compare_effective, int stride) {
  SimulationResult out{schedule, {}, {}};
  IntegratorOptions iopt;
  iopt.stride = stride;
  if (gamma == 0.0) {
    out.pulse = trajectory_observables(adiabatic_run(ctx, schedule, std::nullopt, stride), ctx.couplings);
    if (compare_effective)
      out.effective = trajectory_observables(effective_run(ctx.couplings, schedule, std::nullopt, iopt),
                                             ctx.couplings);
  } else {
    MasterOptions mopt;
    mopt.stride = stride;
    const DephasingConfig d{gamma};
    out.pulse = trajectory_observables(
        master_adiabatic_run(ctx, schedule, d, std::nullopt, mopt), ctx.couplings);
    if (compare_effective)
      out.effective = trajectory_observables(
          master_effective_run(ctx.couplings, schedule, d, std::nullopt, iopt, mopt), ctx.couplings);
  }
  return out;
}

struct SweepRow {
  double rate = 0.0, pulse = 0.0, gamma = 0.0;
  int cycles = 0;
  double final_fidelity = 0.0, final_concurrence = 0.0, peak_concurrence = 0.0;
  double effective_final_fidelity = 0.0, effective_final_concurrence = 0.0;
  double max_concurrence_deviation = 0.0;
  bool compared = false;
};

inline SweepRow summarize(const SimulationResult& r, double gamma) {
  SweepRow row;
  row.rate = r.schedule.rate;
  row.pulse = r.schedule.pulse_time;
  row.gamma = gamma;
  row.cycles = r.schedule.cycles;
  row.final_fidelity = r.pulse.back().fidelity;
  row.final_concurrence = r.pulse.back().concurrence;
  for (const auto& p : r.pulse) row.peak_concurrence = std::max(row.peak_concurrence, p.concurrence);
  if (!r.effective.empty()) {
    row.compared = true;
    row.effective_final_fidelity = r.effective.back().fidelity;
    row.effective_final_concurrence = r.effective.back().concurrence;
    for (std::size_t k = 0; k < r.pulse.size() && k < r.effective.size(); ++k)
      row.max_concurrence_deviation = std::max(
          row.max_concurrence_deviation, std::abs(r.pulse[k].concurrence - r.effective[k].concurrence));
  }
  return row;
}

/// Runs `task(i)` for i in [0, count) on up to `threads` workers.
template <class Task>
void parallel_for(std::size_t count, int threads, Task&& task) {
  const auto workers = static_cast<std::size_t>(std::clamp<long>(threads, 1, static_cast<long>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::string sweep_table(const RunConfig& cfg, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << output_header(Command::kSweep, cfg);
  out << "rate_over_2pi_Hz\tpulse_s\tgamma_per_s\tcycles\tfinal_fidelity\tfinal_concurrence_1N\t"
         "peak_concurrence_1N\teffective_final_fidelity\teffective_final_concurrence_1N\t"
         "max_concurrence_deviation\n";
  for (const auto& r : rows) {
    out << detail::num(r.rate / constants::kTwoPi) << '\t' << detail::num(r.pulse) << '\t'
        << detail::num(r.gamma) << '\t' << r.cycles << '\t' << detail::num(r.final_fidelity) << '\t'
        << detail::num(r.final_concurrence) << '\t' << detail::num(r.peak_concurrence) << '\t';
    if (r.compared)
      out << detail::num(r.effective_final_fidelity) << '\t'
          << detail::num(r.effective_final_concurrence) << '\t'
          << detail::num(r.max_concurrence_deviation) << '\n';
    else
      out << "nan\tnan\tnan\n";
  }
  return out.str();
}

struct RunnerOptions {
  std::filesystem::path out_dir = ".";
  int threads = 1;
};

inline std::vector<SweepRow> run_sweep(const RunConfig& cfg, const DriveContext& ctx, int threads) {
  const auto& w = *cfg.sweep;
  const auto& s = *cfg.schedule;
  const auto rates = w.rates.empty() ? std::vector<double>{s.rate} : w.rates;
  const auto pulses = w.pulses.empty() ? std::vector<double>{s.pulse_time} : w.pulses;
  const auto gammas = w.gammas.empty() ? std::vector<double>{cfg.dephasing.rate} : w.gammas;
  struct Point { double rate, pulse, gamma; };
  std::vector<Point> points;
  for (double r : rates)
    for (double p : pulses)
      for (double g : gammas) points.push_back({r, p, g});
  std::vector<SweepRow> rows(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    ScheduleSpec spec = s;
    spec.rate = points[i].rate;
    spec.pulse_time = points[i].pulse;
    const auto schedule = spec.make(ctx.spins());
    rows[i] = summarize(simulate(ctx, schedule, points[i].gamma, cfg.drive.compare_effective, cfg.stride),
                        points[i].gamma);
  });
  return rows;
}

/// Executes one subcommand and writes its artifacts into `opt.out_dir`.
inline int run(Command c, const RunConfig& cfg, const RunnerOptions& opt, std::ostream& log) {
  cfg.validate_for(c);
  std::filesystem::create_directories(opt.out_dir);
  switch (c) {
    case Command::kTrapSolve:
    case Command::kCouplings: {
      const auto r = solve_trap(cfg);
      const auto report = chain_report(c, cfg, r);
      const auto name = c == Command::kTrapSolve ? "chain.txt" : "couplings.txt";
      detail::write_file(opt.out_dir / name, report);
      log << report;
      return 0;
    }
    case Command::kSimulate: {
      const auto in = resolve_couplings(cfg);
      const auto ctx = drive_context(cfg, in);
      const auto schedule = cfg.schedule->make(ctx.spins());
      const auto r = simulate(ctx, schedule, cfg.dephasing.rate, cfg.drive.compare_effective, cfg.stride);
      detail::write_file(opt.out_dir / "trajectory.tsv", trajectory_table(c, cfg, r.pulse, "pulses"));
      if (!r.effective.empty())
        detail::write_file(opt.out_dir / "trajectory_effective.tsv",
                           trajectory_table(c, cfg, r.effective, "effective"));
      const auto row = summarize(r, cfg.dephasing.rate);
      log << "cycles " << row.cycles << "\nfinal_fidelity " << detail::num(row.final_fidelity)
          << "\nfinal_concurrence_1N " << detail::num(row.final_concurrence)
          << "\npeak_concurrence_1N " << detail::num(row.peak_concurrence) << '\n';
      if (row.compared)
        log << "effective_final_fidelity " << detail::num(row.effective_final_fidelity)
            << "\nmax_concurrence_deviation " << detail::num(row.max_concurrence_deviation) << '\n';
      return 0;
    }
    case Command::kSweep: {
      const auto in = resolve_couplings(cfg);
      const auto ctx = drive_context(cfg, in);
      const auto rows = run_sweep(cfg, ctx, opt.threads);
      const auto table = sweep_table(cfg, rows);
      detail::write_file(opt.out_dir / "sweep.tsv", table);
      log << table;
      return 0;
    }
  }
  return 0;
}

}  // namespace ionsim::io
