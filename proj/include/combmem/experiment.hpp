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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "combmem/config.hpp"
#include "combmem/gaussian.hpp"
#include "combmem/memory_channel.hpp"
#include "combmem/metrics.hpp"
#include "combmem/raman_dynamics.hpp"
#include "combmem/serialization.hpp"

namespace combmem {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "COMBMEM_OUT_DIR";

enum class OutputFormat { Csv, Json, Both };
OutputFormat parse_format(const std::string& name);
std::string format_name(OutputFormat f);

enum class StateKind { None, Spectrum, Preset, CovarianceFile };

/// Validated view of a config file. Sections:
///   [memory]    d, gamma_s, T, rep_rate      (gamma_s may come from [physical])
///   [physical]  Delta, gamma, Omega_p
///   [state]     exactly one of spectrum_db (+ angles), preset, covariance_file
///   [pump]      basis = supermodes | dft | random-unitary[(seed)] | file:PATH; teeth
///   [kernel]    band (rad/s), points
///   [dynamics]  n_z, n_t, path = analytic | pde, frequencies, taper,
///               snapshot_stride_t, snapshot_stride_z
///   [sweep]     d (list, ranges allowed)
///   [output]    dir, format
///   [run]       seed, workers
/// Expressions outside [memory]/[physical] may use d, gamma_s, T, alpha and
/// rep_rate.
struct ExperimentConfig {
  ConfigFile file;

  MemoryParams memory{0.0, 1.0, 1.0};
  std::optional<PhysicalParams> physical;

  StateKind state_kind = StateKind::None;
  std::vector<double> spectrum_db;
  std::vector<double> angles;
  std::string preset;
  std::filesystem::path covariance_file;

  std::string pump_basis = "supermodes";
  int teeth = kDefaultToothCount;

  double kernel_band = 0.0;
  int kernel_points = 201;

  int dyn_n_z = 2000;
  int dyn_n_t = 2000;
  DynamicsPath dyn_path = DynamicsPath::Analytic;
  std::vector<double> dyn_frequencies;
  double dyn_taper = 0.1;
  int snapshot_stride_t = 0;
  int snapshot_stride_z = 0;

  std::vector<double> sweep_d;

  std::uint64_t seed = 0;
  int workers = 1;
  OutputFormat format = OutputFormat::Csv;
  std::filesystem::path out_dir;

  /// Throws ConfigError for malformed or contradictory settings.
  static ExperimentConfig from(const ConfigFile& file);

  /// Input covariance for the configured state source. Throws ConfigError
  /// when no state is configured.
  CovarianceMatrix input_state() const;
};

/// CLI-level overrides; unset fields fall back to the config, then to the
/// environment (output directory only), then to defaults.
struct RunOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<OutputFormat> format;
};

/// Reads a config file, or a manifest.json written by a previous run (its
/// config echo, seed and format are reused).
ExperimentConfig load_experiment(const std::filesystem::path& path,
                                 const RunOverrides& overrides = {});

struct CommandResult {
  std::vector<std::filesystem::path> files;  // relative to out_dir
  Json summary = Json::object();
  bool passed = true;
  std::string failure;  // set when !passed
};

/// Per-supermode reports at optical depth d for the configured state:
/// fig3_table for a dB spectrum, supermode extraction otherwise.
std::vector<SupermodeReport> state_reports(const ExperimentConfig& cfg, double d);

CommandResult cmd_kernel(const ExperimentConfig& cfg);
CommandResult cmd_fig3(const ExperimentConfig& cfg);
CommandResult cmd_channel(const ExperimentConfig& cfg);
CommandResult cmd_dynamics(const ExperimentConfig& cfg);
CommandResult cmd_sweep(const ExperimentConfig& cfg);

/// Runs a command by name, writes manifest.json and returns the result.
/// Throws ResolutionError after writing the manifest when a validation
/// check fails.
CommandResult run_command(const std::string& name, const ExperimentConfig& cfg);

/// Process exit code for an exception escaping run_command.
int exit_code_for(const std::exception& e);

}  // namespace combmem
