// Copyright 2026 The maglev-nmpc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maglev/analysis.hpp"
#include "maglev_app/config.hpp"

namespace maglev::app {

enum ExitCode : int { kSuccess = 0, kConfigError = 1, kRuntimeError = 2, kIoError = 3 };

struct CliOptions {
  std::filesystem::path config;  // empty: built-in defaults
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> controllers;
  std::vector<std::string> overrides;  // section.key=value
  std::filesystem::path log;           // input of `spectrum`
  bool json = false;
};

/// Worker cap from MAGLEV_NMPC_THREADS (unset: hardware concurrency).
unsigned worker_count();

AppConfig resolve_config(const CliOptions& options);

int cmd_equilibrium(const CliOptions& options, std::ostream& out);
int cmd_simulate(const CliOptions& options, std::ostream& out);
int cmd_compare(const CliOptions& options, std::ostream& out);
int cmd_spectrum(const CliOptions& options, std::ostream& out);

/// Dispatches a verb and maps exceptions onto the exit-code contract.
int run_verb(const std::string& verb, const CliOptions& options, std::ostream& out, std::ostream& err);

/// Deterministic per-controller metrics columns (no wall-clock values).
const std::vector<std::string>& metrics_columns();
std::vector<std::string> metrics_row(const RunMetrics& m);

}  // namespace maglev::app
