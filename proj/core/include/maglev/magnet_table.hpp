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

// Tabulated electromagnet characteristics on a rectangular (s, I) grid.
//
// Text file layout (whitespace separated, '#' starts a comment that runs to
// the end of the line):
//
//   s_count i_count
//   s_0 ... s_{s_count-1}                  strictly increasing air gaps [m]
//   I_0 ... I_{i_count-1}                  strictly increasing currents [A]
//   F[s_count x i_count]                   magnet force [N], row-major in s
//   alpha0[s_count x i_count]              alpha at sDot = 0 [A/s]
//   alpha_sdot[s_count x i_count]          d alpha / d sDot [A/m]
//   beta[s_count x i_count]                [A/(V s)]
//
// so that alpha(s, sDot, I) = alpha0(s, I) + alpha_sdot(s, I) * sDot. All
// quantities are bilinearly interpolated; lookups outside the grid throw.

#include <filesystem>
#include <span>
#include <vector>

namespace maglev {

struct MagnetParams;

class MagnetTable {
 public:
  MagnetTable(std::vector<double> sGrid, std::vector<double> iGrid, std::vector<double> force,
              std::vector<double> alpha0, std::vector<double> alphaSdot, std::vector<double> beta);

  static MagnetTable load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Samples the analytic single-coil model on the given grid.
  static MagnetTable from_analytic(const MagnetParams& p, std::vector<double> sGrid,
                                   std::vector<double> iGrid);

  [[nodiscard]] double force(double s, double i) const;
  [[nodiscard]] double alpha(double s, double sDot, double i) const;
  [[nodiscard]] double beta(double s, double i) const;

  /// Piecewise partial derivatives of the interpolated force.
  [[nodiscard]] double force_ds(double s, double i) const;
  [[nodiscard]] double force_di(double s, double i) const;

  [[nodiscard]] std::span<const double> s_grid() const { return sGrid_; }
  [[nodiscard]] std::span<const double> i_grid() const { return iGrid_; }

 private:
  struct Cell {
    std::size_t is;
    std::size_t ii;
    double ts;
    double ti;
  };
  [[nodiscard]] Cell locate(double s, double i) const;
  [[nodiscard]] double interpolate(const std::vector<double>& values, const Cell& c) const;
  [[nodiscard]] double at(const std::vector<double>& values, std::size_t is, std::size_t ii) const {
    return values[is * iGrid_.size() + ii];
  }

  std::vector<double> sGrid_;
  std::vector<double> iGrid_;
  std::vector<double> force_;
  std::vector<double> alpha0_;
  std::vector<double> alphaSdot_;
  std::vector<double> beta_;
};

}  // namespace maglev
