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

// Line-oriented chain tables. See docs/table_format.md.

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ionsim/constants.hpp"
#include "ionsim/error.hpp"
#include "ionsim/linalg.hpp"
#include "ionsim/trap_model.hpp"

namespace ionsim::io {

struct CouplingTable {
  int ions = 0;
  std::optional<double> gradient;  // T/m
  std::vector<double> positions;   // m
  std::vector<double> splittings;  // rad/s
  std::vector<double> modes;       // rad/s
  RealMatrix couplings;            // rad/s, symmetric, zero diagonal
};

/// Largest relative mismatch tolerated between J_ij and J_ji.
inline constexpr double kMaxTableAsymmetry = 0.10;

namespace detail {

inline std::string where(std::string_view origin, int line) {
  return std::string(origin) + ":" + std::to_string(line) + ": ";
}

inline std::vector<double> numbers(std::istringstream& in, std::string_view origin, int line) {
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, where(origin, line) + "bad number '" + tok + "'");
    }
  }
  return out;
}

inline std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace detail

inline CouplingTable parse_table(std::string_view text, std::string_view origin = "<table>") {
  CouplingTable t;
  bool mirror = false;
  // entries[i][j] holds every listed value for the ordered pair.
  std::vector<std::vector<std::vector<double>>> entries;
  std::vector<std::pair<int, std::string>> pending_pairs;
  std::vector<std::vector<double>> matrix_rows;
  int matrix_line = 0;
  bool in_matrix = false;
  bool any = false;

  std::istringstream stream{std::string(text)};
  std::string raw;
  int line = 0;
  auto ensure_ions = [&](int l) {
    if (t.ions <= 0) throw Error(ErrorCode::kParse, detail::where(origin, l) + "'ions' must come first");
  };
  while (std::getline(stream, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream in(raw);
    std::string key;
    if (!(in >> key)) continue;
    any = true;
    if (in_matrix) {
      if (key == "end") {
        in_matrix = false;
        continue;
      }
      std::istringstream row(raw);
      matrix_rows.push_back(detail::numbers(row, origin, line));
      continue;
    }
    if (key == "ions") {
      const auto v = detail::numbers(in, origin, line);
      if (v.size() != 1 || v[0] < 1 || v[0] != std::floor(v[0]) || t.ions != 0)
        throw Error(ErrorCode::kParse, detail::where(origin, line) + "bad 'ions' line");
      t.ions = static_cast<int>(v[0]);
      entries.assign(t.ions, std::vector<std::vector<double>>(t.ions));
    } else if (key == "gradient_T_per_m") {
      const auto v = detail::numbers(in, origin, line);
      if (v.size() != 1) throw Error(ErrorCode::kParse, detail::where(origin, line) + "expected one value");
      t.gradient = v[0];
    } else if (key == "positions_um" || key == "splittings_over_2pi_MHz" ||
               key == "modes_over_2pi_kHz") {
      ensure_ions(line);
      const auto v = detail::numbers(in, origin, line);
      if (static_cast<int>(v.size()) != t.ions)
        throw Error(ErrorCode::kParse, detail::where(origin, line) + "expected " +
                                           std::to_string(t.ions) + " values for '" + key + "'");
      std::vector<double>* dst = &t.positions;
      double factor = 1e-6;
      if (key == "splittings_over_2pi_MHz") dst = &t.splittings, factor = constants::kTwoPi * 1e6;
      if (key == "modes_over_2pi_kHz") dst = &t.modes, factor = constants::kTwoPi * 1e3;
      dst->clear();
      for (double x : v) dst->push_back(x * factor);
    } else if (key == "symmetry") {
      std::string kind;
      in >> kind;
      if (kind != "mirror") throw Error(ErrorCode::kParse, detail::where(origin, line) + "unknown symmetry '" + kind + "'");
      mirror = true;
    } else if (key == "coupling_over_2pi_Hz") {
      ensure_ions(line);
      const auto v = detail::numbers(in, origin, line);
      if (v.size() != 3) throw Error(ErrorCode::kParse, detail::where(origin, line) + "expected 'i j value'");
      const int i = static_cast<int>(v[0]) - 1, j = static_cast<int>(v[1]) - 1;
      if (v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) || i < 0 || j < 0 ||
          i >= t.ions || j >= t.ions || i == j)
        throw Error(ErrorCode::kParse, detail::where(origin, line) + "bad spin indices");
      entries[i][j].push_back(v[2]);
    } else if (key == "coupling_matrix_over_2pi_Hz") {
      ensure_ions(line);
      in_matrix = true;
      matrix_line = line;
    } else {
      throw Error(ErrorCode::kParse, detail::where(origin, line) + "unknown key '" + key + "'");
    }
  }
  if (!any) throw Error(ErrorCode::kParse, std::string(origin) + ": empty table");
  if (in_matrix) throw Error(ErrorCode::kParse, detail::where(origin, matrix_line) + "matrix block lacks 'end'");
  ensure_ions(line);
  const int n = t.ions;

  if (!matrix_rows.empty()) {
    if (static_cast<int>(matrix_rows.size()) != n)
      throw Error(ErrorCode::kParse, detail::where(origin, matrix_line) + "matrix needs " + std::to_string(n) + " rows");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(matrix_rows[i].size()) != n)
        throw Error(ErrorCode::kParse, detail::where(origin, matrix_line + 1 + i) + "matrix row needs " + std::to_string(n) + " values");
      if (matrix_rows[i][i] != 0.0)
        throw Error(ErrorCode::kValidation, detail::where(origin, matrix_line + 1 + i) + "matrix diagonal must be zero");
      for (int j = 0; j < n; ++j)
        if (i != j) entries[i][j].push_back(matrix_rows[i][j]);
    }
  }

  // Collapse each unordered pair: explicit values first, then the mirror image.
  t.couplings = RealMatrix::Zero(n, n);
  auto pair_values = [&](int i, int j) {
    std::vector<double> v = entries[i][j];
    v.insert(v.end(), entries[j][i].begin(), entries[j][i].end());
    return v;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      auto v = pair_values(i, j);
      if (v.empty() && mirror) v = pair_values(n - 1 - j, n - 1 - i);
      if (v.empty())
        throw Error(ErrorCode::kValidation, std::string(origin) + ": missing coupling for pair " +
                                                std::to_string(i + 1) + "," + std::to_string(j + 1));
      double lo = v[0], hi = v[0], sum = 0.0;
      for (double x : v) lo = std::min(lo, x), hi = std::max(hi, x), sum += x;
      const double scale = std::max(std::abs(lo), std::abs(hi));
      if (scale > 0.0 && (hi - lo) / scale > kMaxTableAsymmetry)
        throw Error(ErrorCode::kValidation,
                    std::string(origin) + ": couplings for pair " + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + " differ by more than 10%");
      t.couplings(i, j) = t.couplings(j, i) = constants::kTwoPi * sum / static_cast<double>(v.size());
    }
  }
  return t;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline CouplingTable ingest_table(const std::filesystem::path& path) {
  return parse_table(read_text(path), path.string());
}

/// Full-matrix form with 10 significant digits.
inline std::string export_table(const CouplingTable& t) {
  std::ostringstream out;
  auto list = [&](const char* key, const std::vector<double>& v, double factor) {
    if (v.empty()) return;
    out << key;
    for (double x : v) out << ' ' << detail::format(x / factor);
    out << '\n';
  };
  out << "ions " << t.ions << '\n';
  if (t.gradient) out << "gradient_T_per_m " << detail::format(*t.gradient) << '\n';
  list("positions_um", t.positions, 1e-6);
  list("splittings_over_2pi_MHz", t.splittings, constants::kTwoPi * 1e6);
  list("modes_over_2pi_kHz", t.modes, constants::kTwoPi * 1e3);
  out << "coupling_matrix_over_2pi_Hz\n";
  for (int i = 0; i < t.ions; ++i) {
    for (int j = 0; j < t.ions; ++j)
      out << (j ? " " : "") << detail::format(i == j ? 0.0 : t.couplings(i, j) / constants::kTwoPi);
    out << '\n';
  }
  out << "end\n";
  return out.str();
}

inline CouplingTable table_from_chain(const ChainSolution& s) {
  CouplingTable t;
  t.ions = s.ions();
  t.gradient = s.gradient;
  t.positions = s.positions;
  t.splittings = s.splittings;
  t.modes.assign(s.mode_frequencies.data(), s.mode_frequencies.data() + s.mode_frequencies.size());
  t.couplings = s.couplings;
  return t;
}

}  // namespace ionsim::io
