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

// Command-line front end: ionsim <trap-solve|couplings|simulate|sweep>
// --config <file> [--out <dir>] [--threads <n>] [--seed <n>].
// Exit status 0 on success, 1 for bad input, 2 for numerical failure.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ionsim/error.hpp"
#include "ionsim/io/config.hpp"
#include "ionsim/io/runner.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out = ".";
  int threads = 1;
  long seed = 0;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--threads", f.threads, "worker threads for sweeps")->check(CLI::Range(1, 256));
  sub->add_option("--seed", f.seed, "reserved; runs are deterministic");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trapped-ion spin-chain simulator"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"trap-solve", "equilibrium, normal modes, splittings and couplings of an ion chain"},
      {"couplings", "export the computed chain as a coupling table"},
      {"simulate", "adiabatic preparation run"},
      {"sweep", "grid of runs over ramp rate, pulse length and dephasing"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto* sub = app.get_subcommands().front();
  const auto command = *ionsim::io::command_from_string(sub->get_name());
  try {
    const auto cfg = ionsim::io::load_config(flags.config);
    return ionsim::io::run(command, cfg, {flags.out, flags.threads}, std::cout);
  } catch (const ionsim::Error& e) {
    std::cerr << "ionsim: " << e.what() << '\n';
    return e.numerical() ? 2 : 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "ionsim: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ionsim: " << e.what() << '\n';
    return 2;
  }
}
