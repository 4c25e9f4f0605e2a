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

// Sectioned key = value scenario configuration.
//
//   [plant]            mechanical parameters and plant mismatch factors
//   [magnet]           electromagnet and input bound
//   [guideway]         girder sag and stochastic irregularity
//   [controller.NAME]  one controller; NAME may be a preset (C1M, C2M, C2ML)
//   [scenario]         speed, duration, plant step, seed, controller lists
//   [analysis]         spectrum, band, and histogram settings
//
// '#' and ';' start comments. Unknown sections and keys are rejected.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "maglev/analysis.hpp"
#include "maglev/controller.hpp"
#include "maglev/guideway.hpp"
#include "maglev/model.hpp"
#include "maglev/simulation.hpp"

namespace maglev::app {

struct AppConfig {
  ModelParams params;
  PlantMismatch mismatch;
  GuidewayParams guideway;
  std::filesystem::path magnetTable;       // empty unless magnet.backend = table
  std::filesystem::path irregularityFile;  // optional imported irregularity
  std::map<std::string, ControllerConfig> controllers;
  double speedKmh = 600.0;
  double duration = 30.0;
  double plantStep = 1e-4;
  std::uint64_t seed = 1;
  std::string simulateController = "C2M";
  std::vector<std::string> compareControllers{"C1M", "C2M", "C2ML"};
  AnalysisOptions analysis;
  double spectrumMaxHz = 50.0;

  /// Preset or configured controller; throws ConfigError listing valid names.
  [[nodiscard]] ControllerConfig controller(const std::string& name) const;
  [[nodiscard]] std::vector<std::string> controller_names() const;
};

/// Parses a document; relative file paths resolve against `baseDir`.
AppConfig parse_config(std::string_view text, const std::filesystem::path& baseDir = {});
AppConfig load_config(const std::filesystem::path& path);

/// Applies one `section.key=value` override.
void apply_override(AppConfig& cfg, std::string_view assignment,
                    const std::filesystem::path& baseDir = {});

/// Table of every key with its default value and meaning.
std::string defaults_table();

/// Loads tables/profiles referenced by the config and builds the scenario.
Scenario make_scenario(const AppConfig& cfg, const std::string& controllerName);

std::vector<std::string> split_list(std::string_view text);

}  // namespace maglev::app
