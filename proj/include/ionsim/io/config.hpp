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

// YAML run configuration. Every physical value carries a unit (see
// units.hpp) and unknown keys are errors.

#pragma once

#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "ionsim/error.hpp"
#include "ionsim/io/coupling_table.hpp"
#include "ionsim/io/units.hpp"
#include "ionsim/open_system.hpp"
#include "ionsim/pulse_engine.hpp"
#include "ionsim/schedule.hpp"
#include "ionsim/trap_model.hpp"

namespace ionsim::io {

enum class Command { kTrapSolve, kCouplings, kSimulate, kSweep };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::kTrapSolve: return "trap-solve";
    case Command::kCouplings: return "couplings";
    case Command::kSimulate: return "simulate";
    case Command::kSweep: return "sweep";
  }
  return "?";
}

inline std::optional<Command> command_from_string(std::string_view s) {
  for (auto c : {Command::kTrapSolve, Command::kCouplings, Command::kSimulate, Command::kSweep})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

struct TrapSpec {
  int ions = 0;
  AxialPotential potential = AxialPotential::harmonic(1.0);
  std::optional<double> gradient;  // T/m
  std::optional<CalibrationTargets> calibrate;
};

struct ScheduleSpec {
  double initial_field = 0.0;  // rad/s
  double rate = 0.0;           // rad/s
  double free_time = 0.0;      // s
  double pulse_time = 0.0;     // s
  std::optional<double> duration;
  std::optional<int> cycles;
  double ramp_lengths = 10.0;  // duration = ramp_lengths / rate by default

  Schedule make(int spins) const {
    Schedule s{initial_field, rate, free_time, pulse_time, 1};
    if (cycles) {
      s.cycles = *cycles;
    } else {
      double d = duration ? *duration : 0.0;
      if (!duration) {
        require(rate > 0.0, ErrorCode::kValidation,
                "schedule with zero rate needs an explicit duration or cycle count");
        d = ramp_lengths / rate;
      }
      s.cycles = cycles_for_duration(s, spins, d);
    }
    s.validate();
    return s;
  }
};

struct DriveSpec {
  DriveMode mode = DriveMode::kResonant;
  bool compare_effective = true;
  bool phase_correction = true;
  bool ideal_pulses = false;
  double slices_per_detuning = 50.0;
};

struct SweepSpec {
  std::vector<double> rates;   // rad/s
  std::vector<double> pulses;  // s
  std::vector<double> gammas;  // 1/s
};

enum class CouplingSource { kNone, kComputed, kTable };

struct RunConfig {
  std::optional<Command> mode;
  IonSpecies species = IonSpecies::ytterbium171();
  std::optional<TrapSpec> trap;
  CouplingSource source = CouplingSource::kNone;
  std::filesystem::path table;
  std::optional<ScheduleSpec> schedule;
  DephasingConfig dephasing;
  DriveSpec drive;
  int stride = 1;
  std::optional<SweepSpec> sweep;
  std::string text;  // source text, hashed into outputs

  /// Cross-section checks for the given subcommand.
  void validate_for(Command c) const {
    if (mode && *mode != c)
      throw Error(ErrorCode::kValidation, "config is for '" + std::string(to_string(*mode)) +
                                              "', not '" + std::string(to_string(c)) + "'");
    if (c == Command::kTrapSolve || c == Command::kCouplings) {
      require(trap.has_value(), ErrorCode::kValidation, "'trap' section is required");
      require(source != CouplingSource::kTable, ErrorCode::kValidation,
              "trap commands compute couplings; remove the coupling table");
      return;
    }
    require(source != CouplingSource::kNone, ErrorCode::kValidation,
            "'couplings' must name exactly one source: table or computed");
    require(source != CouplingSource::kComputed || trap.has_value(), ErrorCode::kValidation,
            "computed couplings need a 'trap' section");
    require(schedule.has_value(), ErrorCode::kValidation, "'schedule' section is required");
    if (c == Command::kSweep)
      require(sweep.has_value(), ErrorCode::kValidation, "'sweep' section is required");
  }
};

namespace detail {

inline std::string at(const YAML::Node& n) {
  const auto m = n.Mark();
  return m.is_null() ? std::string("config: ") : "config:" + std::to_string(m.line + 1) + ": ";
}

[[noreturn]] inline void fail(const YAML::Node& n, const std::string& msg,
                              ErrorCode code = ErrorCode::kValidation) {
  throw Error(code, at(n) + msg);
}

inline void only_keys(const YAML::Node& map, std::string_view section,
                      std::initializer_list<std::string_view> allowed) {
  if (!map.IsMap()) fail(map, "'" + std::string(section) + "' must be a mapping", ErrorCode::kParse);
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail(kv.first, "unknown key '" + key + "' in '" + std::string(section) + "'");
  }
}

inline double quantity(const YAML::Node& n, Dimension d) {
  if (!n.IsScalar()) fail(n, "expected a " + std::string(to_string(d)), ErrorCode::kParse);
  try {
    return parse_quantity(n.Scalar(), d);
  } catch (const Error& e) {
    fail(n, e.what(), ErrorCode::kParse);
  }
}

inline double positive(const YAML::Node& n, Dimension d) {
  const double v = quantity(n, d);
  if (!(v > 0.0)) fail(n, "value must be positive");
  return v;
}

inline double non_negative(const YAML::Node& n, Dimension d) {
  const double v = quantity(n, d);
  if (!(v >= 0.0)) fail(n, "value must be non-negative");
  return v;
}

inline int count(const YAML::Node& n, int min) {
  if (!n.IsScalar()) fail(n, "expected an integer", ErrorCode::kParse);
  const double v = quantity(n, Dimension::kDimensionless);
  if (v != std::floor(v) || v < min || v > 1e9)
    fail(n, "expected an integer of at least " + std::to_string(min));
  return static_cast<int>(v);
}

inline bool flag(const YAML::Node& n) {
  if (n.IsScalar()) {
    const auto& s = n.Scalar();
    if (s == "true") return true;
    if (s == "false") return false;
  }
  fail(n, "expected true or false", ErrorCode::kParse);
}

inline std::string word(const YAML::Node& n) {
  if (!n.IsScalar()) fail(n, "expected a word", ErrorCode::kParse);
  return n.Scalar();
}

inline std::vector<double> list(const YAML::Node& n, Dimension d) {
  if (!n.IsSequence() || n.size() == 0) fail(n, "expected a non-empty list", ErrorCode::kParse);
  std::vector<double> out;
  for (const auto& e : n) out.push_back(non_negative(e, d));
  return out;
}

inline AxialPotential potential(const YAML::Node& n) {
  if (!n.IsMap() || !n["kind"]) fail(n, "'potential' needs a 'kind'");
  const auto kind = word(n["kind"]);
  if (kind == "harmonic") {
    only_keys(n, "potential", {"kind", "omega"});
    if (!n["omega"]) fail(n, "harmonic potential needs 'omega'");
    return AxialPotential::harmonic(positive(n["omega"], Dimension::kAngularFrequency));
  }
  if (kind == "triple_well") {
    only_keys(n, "potential", {"kind", "separation", "center_omega", "outer_omega"});
    for (const char* k : {"separation", "center_omega", "outer_omega"})
      if (!n[k]) fail(n, std::string("triple-well potential needs '") + k + "'");
    return AxialPotential::triple_well(positive(n["separation"], Dimension::kLength),
                                       positive(n["center_omega"], Dimension::kAngularFrequency),
                                       positive(n["outer_omega"], Dimension::kAngularFrequency));
  }
  fail(n["kind"], "unknown potential kind '" + kind + "'");
}

inline TrapSpec trap(const YAML::Node& n) {
  only_keys(n, "trap", {"ions", "potential", "gradient", "calibrate"});
  TrapSpec t;
  if (!n["ions"] || !n["potential"]) fail(n, "'trap' needs 'ions' and 'potential'");
  t.ions = count(n["ions"], 1);
  if (t.ions > kDefaultMaxSpins) fail(n["ions"], "at most " + std::to_string(kDefaultMaxSpins) + " ions");
  t.potential = potential(n["potential"]);
  if (static_cast<bool>(n["gradient"]) == static_cast<bool>(n["calibrate"]))
    fail(n, "'trap' needs exactly one of 'gradient' and 'calibrate'");
  if (n["gradient"]) t.gradient = positive(n["gradient"], Dimension::kGradient);
  if (const auto c = n["calibrate"]) {
    only_keys(c, "calibrate", {"lowest_mode", "eta_max"});
    if (!c["lowest_mode"] || !c["eta_max"]) fail(c, "'calibrate' needs 'lowest_mode' and 'eta_max'");
    t.calibrate = CalibrationTargets{positive(c["lowest_mode"], Dimension::kAngularFrequency),
                                     positive(c["eta_max"], Dimension::kDimensionless)};
  }
  return t;
}

inline ScheduleSpec schedule(const YAML::Node& n) {
  only_keys(n, "schedule", {"b0", "rate", "dt1", "pulse", "duration", "cycles", "ramp_lengths"});
  for (const char* k : {"b0", "rate", "dt1", "pulse"})
    if (!n[k]) fail(n, std::string("'schedule' needs '") + k + "'");
  ScheduleSpec s;
  s.initial_field = non_negative(n["b0"], Dimension::kAngularFrequency);
  s.rate = non_negative(n["rate"], Dimension::kAngularFrequency);
  s.free_time = positive(n["dt1"], Dimension::kTime);
  s.pulse_time = positive(n["pulse"], Dimension::kTime);
  const int given = static_cast<int>(static_cast<bool>(n["duration"])) +
                    static_cast<int>(static_cast<bool>(n["cycles"])) +
                    static_cast<int>(static_cast<bool>(n["ramp_lengths"]));
  if (given > 1) fail(n, "give at most one of 'duration', 'cycles' and 'ramp_lengths'");
  if (n["duration"]) s.duration = positive(n["duration"], Dimension::kTime);
  if (n["cycles"]) s.cycles = count(n["cycles"], 1);
  if (n["ramp_lengths"]) s.ramp_lengths = positive(n["ramp_lengths"], Dimension::kDimensionless);
  if (s.rate == 0.0 && !s.duration && !s.cycles)
    fail(n, "zero ramp rate needs 'duration' or 'cycles'");
  return s;
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".") {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParse, "config:" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw Error(ErrorCode::kParse, "config: top level must be a mapping");
  using detail::fail;
  try {
    detail::only_keys(root, "config", {"mode", "species", "trap", "couplings", "schedule",
                                       "dephasing", "drive", "output", "sweep"});
    RunConfig c;
    c.text = std::string(text);
    if (const auto m = root["mode"]) {
      c.mode = command_from_string(detail::word(m));
      if (!c.mode) fail(m, "unknown mode '" + m.Scalar() + "'");
    }
    if (const auto s = root["species"]) {
      detail::only_keys(s, "species", {"mass", "charge"});
      if (s["mass"]) c.species.mass = detail::positive(s["mass"], Dimension::kMass);
      if (s["charge"]) c.species.charge = detail::positive(s["charge"], Dimension::kCharge);
    }
    if (const auto t = root["trap"]) c.trap = detail::trap(t);
    if (const auto k = root["couplings"]) {
      detail::only_keys(k, "couplings", {"table", "computed"});
      const bool table = static_cast<bool>(k["table"]);
      const bool computed = k["computed"] && detail::flag(k["computed"]);
      if (table == computed) fail(k, "'couplings' needs exactly one source: table or computed");
      if (table) {
        c.source = CouplingSource::kTable;
        c.table = base_dir / detail::word(k["table"]);
      } else {
        c.source = CouplingSource::kComputed;
      }
    }
    if (const auto s = root["schedule"]) c.schedule = detail::schedule(s);
    if (const auto d = root["dephasing"]) {
      detail::only_keys(d, "dephasing", {"gamma", "t_deph"});
      if (d["gamma"] && d["t_deph"]) fail(d, "give 'gamma' or 't_deph', not both");
      if (d["gamma"]) c.dephasing.rate = detail::non_negative(d["gamma"], Dimension::kRate);
      if (d["t_deph"]) c.dephasing = DephasingConfig::from_time(detail::positive(d["t_deph"], Dimension::kTime));
    }
    if (const auto d = root["drive"]) {
      detail::only_keys(d, "drive", {"mode", "compare_effective", "phase_correction",
                                     "ideal_pulses", "slices_per_detuning"});
      if (d["mode"]) {
        const auto m = detail::word(d["mode"]);
        if (m == "resonant") c.drive.mode = DriveMode::kResonant;
        else if (m == "full") c.drive.mode = DriveMode::kFull;
        else fail(d["mode"], "drive mode must be 'resonant' or 'full'");
      }
      if (d["compare_effective"]) c.drive.compare_effective = detail::flag(d["compare_effective"]);
      if (d["phase_correction"]) c.drive.phase_correction = detail::flag(d["phase_correction"]);
      if (d["ideal_pulses"]) c.drive.ideal_pulses = detail::flag(d["ideal_pulses"]);
      if (d["slices_per_detuning"])
        c.drive.slices_per_detuning = detail::positive(d["slices_per_detuning"], Dimension::kDimensionless);
    }
    if (const auto o = root["output"]) {
      detail::only_keys(o, "output", {"stride"});
      if (o["stride"]) c.stride = detail::count(o["stride"], 1);
    }
    if (const auto s = root["sweep"]) {
      detail::only_keys(s, "sweep", {"rates", "pulses", "gammas"});
      SweepSpec w;
      if (s["rates"]) w.rates = detail::list(s["rates"], Dimension::kAngularFrequency);
      if (s["pulses"]) w.pulses = detail::list(s["pulses"], Dimension::kTime);
      if (s["gammas"]) w.gammas = detail::list(s["gammas"], Dimension::kRate);
      for (double p : w.pulses)
        if (p <= 0.0) fail(s["pulses"], "pulse times must be positive");
      if (w.rates.empty() && w.pulses.empty() && w.gammas.empty())
        fail(s, "'sweep' needs at least one of 'rates', 'pulses', 'gammas'");
      c.sweep = w;
    }
    if (c.mode) c.validate_for(*c.mode);
    return c;
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kParse, "config:" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace ionsim::io
