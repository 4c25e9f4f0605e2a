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

// Minimal deterministic SVG charts: line charts and grouped bar charts.

#include <filesystem>
#include <string>
#include <vector>

namespace maglev::app {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string xLabel;
  std::string yLabel;
  bool logY = false;
  int width = 760;
  int height = 440;
  std::size_t maxPoints = 4000;  // longer series are reduced to per-bucket min/max
};

std::string line_chart(const std::vector<Series>& series, const ChartOptions& options);

struct BarGroup {
  std::string label;
  std::vector<double> values;  // one per bin
};

/// Bars per bin, one colour per group, bins given by their edges.
std::string bar_chart(const std::vector<double>& edges, const std::vector<BarGroup>& groups,
                      const ChartOptions& options);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace maglev::app
