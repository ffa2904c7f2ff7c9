// Copyright 2026 The combmem Authors
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

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "combmem/errors.hpp"
#include "combmem/experiment.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string format;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help,
                      Flags& flags) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", flags.config, "Config file or manifest.json")->required();
  sub->add_option("--out", flags.out, "Output directory");
  sub->add_option("--seed", flags.seed, "RNG seed for randomized pump bases");
  sub->add_option("--workers", flags.workers, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--format", flags.format, "csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-comb Raman memory simulator"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"kernel", "Memory kernel K_w over a frequency band, with flatness"},
      {"fig3", "Per-supermode squeezing, purity and fidelity after the memory"},
      {"channel", "Stored/retrieved covariance through a cascade of ensembles"},
      {"dynamics", "PDE vs analytic write/read and transfer-function validation"},
      {"sweep", "Efficiency, fidelity and purity over a grid of optical depths"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) subs.push_back(add_command(app, name, help, flags));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    combmem::RunOverrides overrides;
    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--out")) overrides.out_dir = flags.out;
    if (chosen->count("--seed")) overrides.seed = flags.seed;
    if (chosen->count("--workers")) overrides.workers = flags.workers;
    if (chosen->count("--format")) overrides.format = combmem::parse_format(flags.format);
    const auto cfg = combmem::load_experiment(flags.config, overrides);
    const auto result = combmem::run_command(chosen->get_name(), cfg);
    std::cout << result.summary.dump(2) << '\n';
    std::cout << "wrote " << result.files.size() << " file(s) to " << cfg.out_dir.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return combmem::exit_code_for(e);
  }
}
