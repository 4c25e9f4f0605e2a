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

#include "maglev/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "maglev/errors.hpp"

namespace maglev {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return {buf.data(), res.ptr};
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

const std::vector<double>& CsvTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) {
      return columns[c];
    }
  }
  throw std::out_of_range("CSV column '" + std::string(name) + "' not found");
}

bool CsvTable::has(std::string_view name) const {
  for (const auto& h : header) {
    if (h == name) {
      return true;
    }
  }
  return false;
}

void write_csv(std::ostream& os, const CsvTable& table) {
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    os << (c ? "," : "") << table.header[c];
  }
  os << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      os << (c ? "," : "") << format_double(table.columns[c][r]);
    }
    os << '\n';
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) {
    throw std::invalid_argument("CSV: missing header");
  }
  std::stringstream head(line);
  std::string cell;
  while (std::getline(head, cell, ',')) {
    table.header.push_back(cell);
  }
  table.columns.resize(table.header.size());
  std::size_t lineNo = 1;
  while (std::getline(is, line)) {
    ++lineNo;
    if (line.empty()) {
      continue;
    }
    std::size_t c = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t end = line.find(',', pos);
      if (c >= table.columns.size()) {
        throw std::invalid_argument("CSV line " + std::to_string(lineNo) + ": too many fields");
      }
      table.columns[c++].push_back(parse_double(std::string_view(line).substr(pos, end - pos)));
      if (end == std::string::npos) {
        break;
      }
      pos = end + 1;
    }
    if (c != table.columns.size()) {
      throw std::invalid_argument("CSV line " + std::to_string(lineNo) + ": too few fields");
    }
  }
  return table;
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write '" + path.string() + "'");
  }
  write_csv(out, table);
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  try {
    return read_csv(in);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

const std::vector<std::string>& ride_log_columns() {
  static const std::vector<std::string> cols{"t", "s",  "ds",  "z2",        "a1",  "a2",
                                             "I", "U",  "dgw", "sqp_iters", "kkt", "solve_ms"};
  return cols;
}

CsvTable ride_log_table(const RideLog& log) {
  CsvTable t;
  t.header = ride_log_columns();
  std::vector<double> iters(log.sqpIterations.begin(), log.sqpIterations.end());
  t.columns = {log.t, log.s, log.ds, log.z2, log.a1, log.a2, log.current, log.voltage, log.dgw,
               std::move(iters), log.kkt, log.solveMs};
  return t;
}

void write_ride_log(const RideLog& log, const std::filesystem::path& path) {
  write_csv_file(path, ride_log_table(log));
}

RideLog read_ride_log(const std::filesystem::path& path) {
  const CsvTable t = read_csv_file(path);
  for (const auto& name : ride_log_columns()) {
    if (!t.has(name)) {
      throw ConfigError(path.string() + ": missing ride-log column '" + name + "'");
    }
  }
  RideLog log;
  log.name = path.stem().string();
  log.t = t.column("t");
  log.s = t.column("s");
  log.ds = t.column("ds");
  log.z2 = t.column("z2");
  log.a1 = t.column("a1");
  log.a2 = t.column("a2");
  log.current = t.column("I");
  log.voltage = t.column("U");
  log.dgw = t.column("dgw");
  const auto& iters = t.column("sqp_iters");
  log.sqpIterations.assign(iters.begin(), iters.end());
  log.kkt = t.column("kkt");
  log.solveMs = t.column("solve_ms");
  if (log.t.size() < 2) {
    throw ConfigError(path.string() + ": ride log needs at least two rows");
  }
  log.plantStep = log.t[1] - log.t[0];
  log.sampleTime = log.plantStep;
  if (!log.s.empty()) {
    log.sNom = log.s.front() - log.ds.front();
  }
  return log;
}

}  // namespace maglev
