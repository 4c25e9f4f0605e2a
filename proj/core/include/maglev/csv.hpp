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

// Plain CSV with shortest round-trip formatting of doubles.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "maglev/simulation.hpp"

namespace maglev {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  [[nodiscard]] std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  [[nodiscard]] const std::vector<double>& column(std::string_view name) const;
  [[nodiscard]] bool has(std::string_view name) const;
};

void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

void write_csv_file(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv_file(const std::filesystem::path& path);

/// Canonical ride-log columns: t,s,ds,z2,a1,a2,I,U,dgw,sqp_iters,kkt,solve_ms.
const std::vector<std::string>& ride_log_columns();
CsvTable ride_log_table(const RideLog& log);
void write_ride_log(const RideLog& log, const std::filesystem::path& path);

/// Restores the logged series; plantStep is taken from the time column.
RideLog read_ride_log(const std::filesystem::path& path);

}  // namespace maglev
