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

// Quantities with explicit units, e.g. "2pi*0.1 kHz", "628.3 rad/s",
// "100 us", "29.38 T/m". Angular frequencies must be written either in
// rad/s or as 2pi times a frequency in Hz; a bare "50 kHz" is rejected so
// that cycles and radians cannot be confused.

#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "ionsim/constants.hpp"
#include "ionsim/error.hpp"

namespace ionsim::io {

enum class Dimension {
  kAngularFrequency,  // rad/s
  kRate,              // 1/s
  kTime,              // s
  kLength,            // m
  kGradient,          // T/m
  kMass,              // kg
  kCharge,            // C
  kDimensionless,
};

inline std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::kAngularFrequency: return "angular frequency";
    case Dimension::kRate: return "rate";
    case Dimension::kTime: return "time";
    case Dimension::kLength: return "length";
    case Dimension::kGradient: return "field gradient";
    case Dimension::kMass: return "mass";
    case Dimension::kCharge: return "charge";
    case Dimension::kDimensionless: return "dimensionless number";
  }
  return "quantity";
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

/// Leading floating-point number; returns the value and the rest.
inline std::pair<double, std::string_view> leading_number(std::string_view s,
                                                          std::string_view whole) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || !std::isfinite(v))
    throw Error(ErrorCode::kParse, "expected a number in '" + std::string(whole) + "'");
  return {v, s.substr(static_cast<std::size_t>(ptr - s.data()))};
}

struct UnitEntry {
  std::string_view name;
  Dimension dim;
  double factor;
};

inline constexpr UnitEntry kUnits[] = {
    {"rad/s", Dimension::kAngularFrequency, 1.0},
    {"krad/s", Dimension::kAngularFrequency, 1e3},
    {"Mrad/s", Dimension::kAngularFrequency, 1e6},
    {"1/s", Dimension::kRate, 1.0},
    {"/s", Dimension::kRate, 1.0},
    {"s", Dimension::kTime, 1.0},
    {"ms", Dimension::kTime, 1e-3},
    {"us", Dimension::kTime, 1e-6},
    {"\xC2\xB5s", Dimension::kTime, 1e-6},
    {"ns", Dimension::kTime, 1e-9},
    {"m", Dimension::kLength, 1.0},
    {"mm", Dimension::kLength, 1e-3},
    {"um", Dimension::kLength, 1e-6},
    {"\xC2\xB5m", Dimension::kLength, 1e-6},
    {"nm", Dimension::kLength, 1e-9},
    {"T/m", Dimension::kGradient, 1.0},
    {"kg", Dimension::kMass, 1.0},
    {"u", Dimension::kMass, constants::kAtomicMassUnit},
    {"C", Dimension::kCharge, 1.0},
    {"e", Dimension::kCharge, constants::kElementaryCharge},
};

inline constexpr std::pair<std::string_view, double> kHertz[] = {
    {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};

inline bool strip_two_pi(std::string_view& s) {
  for (std::string_view p : {"2pi*", "2pi *", "2*pi*", "2 pi *", "2pi"}) {
    if (s.substr(0, p.size()) == p) {
      s = trim(s.substr(p.size()));
      if (!s.empty() && s.front() == '*') s = trim(s.substr(1));
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Parses `text` as a quantity of dimension `want`, returned in SI units
/// (angular frequencies in rad/s).
inline double parse_quantity(std::string_view text, Dimension want) {
  std::string_view s = detail::trim(text);
  const std::string whole(s);
  if (s.empty()) throw Error(ErrorCode::kParse, "empty quantity");
  const bool two_pi = detail::strip_two_pi(s);
  auto [value, rest] = detail::leading_number(s, whole);
  std::string_view unit = detail::trim(rest);
  if (!unit.empty() && unit.front() == '*') unit = detail::trim(unit.substr(1));

  if (unit.empty()) {
    if (want == Dimension::kDimensionless && !two_pi) return value;
    if (want == Dimension::kDimensionless) return constants::kTwoPi * value;
    throw Error(ErrorCode::kParse,
                "'" + whole + "' needs a unit for a " + std::string(to_string(want)));
  }
  for (const auto& [name, factor] : detail::kHertz) {
    if (unit != name) continue;
    if (want == Dimension::kAngularFrequency) {
      if (!two_pi)
        throw Error(ErrorCode::kParse, "'" + whole +
                                           "' is a cyclic frequency; write 2pi*<value> " +
                                           std::string(name) + " or use rad/s");
      return constants::kTwoPi * value * factor;
    }
    if (want == Dimension::kRate && !two_pi) return value * factor;
    throw Error(ErrorCode::kParse, "'" + whole + "' is not a " + std::string(to_string(want)));
  }
  for (const auto& u : detail::kUnits) {
    if (unit != u.name) continue;
    if (u.dim != want || two_pi)
      throw Error(ErrorCode::kParse, "'" + whole + "' is not a " + std::string(to_string(want)));
    return value * u.factor;
  }
  throw Error(ErrorCode::kParse, "unknown unit '" + std::string(unit) + "' in '" + whole + "'");
}

}  // namespace ionsim::io
