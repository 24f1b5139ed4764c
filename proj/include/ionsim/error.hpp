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

#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ionsim {

enum class ErrorCode {
  // Caller mistakes.
  kInvalidArgument,
  kDimension,
  kParse,
  kValidation,
  kIo,
  // Numerical failures.
  kDivergentEnergy,
  kNonConfining,
  kNonConvergence,
  kUnstable,
  kSingular,
  kDegenerate,
  kEigenSolver,
  kIntegrator,
  kPositivity,
  kResonantSpin,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimension: return "dimension error";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kDivergentEnergy: return "divergent energy";
    case ErrorCode::kNonConfining: return "non-confining potential";
    case ErrorCode::kNonConvergence: return "non-convergence";
    case ErrorCode::kUnstable: return "unstable configuration";
    case ErrorCode::kSingular: return "singular matrix";
    case ErrorCode::kDegenerate: return "degenerate spectrum";
    case ErrorCode::kEigenSolver: return "eigensolver failure";
    case ErrorCode::kIntegrator: return "integrator failure";
    case ErrorCode::kPositivity: return "positivity violation";
    case ErrorCode::kResonantSpin: return "resonant spin";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures of the numerics rather than of the input.
  bool numerical() const noexcept {
    switch (code_) {
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kDimension:
      case ErrorCode::kParse:
      case ErrorCode::kValidation:
      case ErrorCode::kIo:
        return false;
      default:
        return true;
    }
  }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

// Warnings are non-fatal diagnostics (clipped eigenvalues, violated
// frequency separation). The sink is process-wide and swappable so tests
// and the CLI can capture them.
namespace detail {
struct WarningSink {
  std::mutex mutex;
  std::ostream* stream = &std::clog;
  std::size_t count = 0;
};
inline WarningSink& warning_sink() {
  static WarningSink sink;
  return sink;
}
}  // namespace detail

inline void warn(std::string_view message) {
  auto& sink = detail::warning_sink();
  std::lock_guard lock(sink.mutex);
  ++sink.count;
  if (sink.stream) *sink.stream << "warning: " << message << '\n';
}

/// Redirects warnings; nullptr silences them. Returns the previous stream.
inline std::ostream* set_warning_stream(std::ostream* stream) {
  auto& sink = detail::warning_sink();
  std::lock_guard lock(sink.mutex);
  auto* previous = sink.stream;
  sink.stream = stream;
  return previous;
}

inline std::size_t warning_count() {
  auto& sink = detail::warning_sink();
  std::lock_guard lock(sink.mutex);
  return sink.count;
}

}  // namespace ionsim
