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

#include "maglev/magnet_table.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "maglev/errors.hpp"
#include "maglev/model.hpp"

namespace maglev {
namespace {

void check_grid(const std::vector<double>& grid, const char* name) {
  if (grid.size() < 2) {
    throw ConfigError(std::string("magnet table: ") + name + " grid needs at least 2 points");
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) {
      throw ConfigError(std::string("magnet table: ") + name + " grid must be strictly increasing");
    }
  }
}

std::size_t segment(const std::vector<double>& grid, double v) {
  const auto it = std::upper_bound(grid.begin(), grid.end(), v);
  const auto idx = static_cast<std::size_t>(std::distance(grid.begin(), it));
  return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, grid.size() - 2);
}

void write_block(std::ostream& os, const std::vector<double>& v, std::size_t cols) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    os << v[k] << ((k + 1) % cols == 0 ? '\n' : ' ');
  }
}

}  // namespace

MagnetTable::MagnetTable(std::vector<double> sGrid, std::vector<double> iGrid,
                         std::vector<double> force, std::vector<double> alpha0,
                         std::vector<double> alphaSdot, std::vector<double> beta)
    : sGrid_(std::move(sGrid)),
      iGrid_(std::move(iGrid)),
      force_(std::move(force)),
      alpha0_(std::move(alpha0)),
      alphaSdot_(std::move(alphaSdot)),
      beta_(std::move(beta)) {
  check_grid(sGrid_, "s");
  check_grid(iGrid_, "current");
  const std::size_t cells = sGrid_.size() * iGrid_.size();
  for (const auto* v : {&force_, &alpha0_, &alphaSdot_, &beta_}) {
    if (v->size() != cells) {
      throw ConfigError("magnet table: value block size does not match grid");
    }
  }
  if (sGrid_.front() <= 0.0) {
    throw ConfigError("magnet table: air gaps must be positive");
  }
}

MagnetTable MagnetTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open magnet table '" + path.string() + "'");
  }
  std::stringstream body;
  std::string line;
  while (std::getline(in, line)) {
    body << line.substr(0, line.find('#')) << '\n';
  }
  std::size_t ns = 0;
  std::size_t ni = 0;
  if (!(body >> ns >> ni)) {
    throw ConfigError("magnet table '" + path.string() + "': missing header");
  }
  auto block = [&](std::size_t count, const char* what) {
    std::vector<double> v(count);
    for (auto& x : v) {
      if (!(body >> x)) {
        throw ConfigError("magnet table '" + path.string() + "': truncated " + what + " block");
      }
    }
    return v;
  };
  auto s = block(ns, "s grid");
  auto i = block(ni, "current grid");
  auto f = block(ns * ni, "force");
  auto a0 = block(ns * ni, "alpha0");
  auto a1 = block(ns * ni, "alpha_sdot");
  auto b = block(ns * ni, "beta");
  return {std::move(s), std::move(i), std::move(f), std::move(a0), std::move(a1), std::move(b)};
}

void MagnetTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write magnet table '" + path.string() + "'");
  }
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "# s_count i_count\n" << sGrid_.size() << ' ' << iGrid_.size() << '\n';
  out << "# s grid [m]\n";
  write_block(out, sGrid_, sGrid_.size());
  out << "# current grid [A]\n";
  write_block(out, iGrid_, iGrid_.size());
  out << "# force [N]\n";
  write_block(out, force_, iGrid_.size());
  out << "# alpha0 [A/s]\n";
  write_block(out, alpha0_, iGrid_.size());
  out << "# alpha_sdot [A/m]\n";
  write_block(out, alphaSdot_, iGrid_.size());
  out << "# beta [A/(V s)]\n";
  write_block(out, beta_, iGrid_.size());
  if (!out) {
    throw IoError("failed writing magnet table '" + path.string() + "'");
  }
}

MagnetTable MagnetTable::from_analytic(const MagnetParams& p, std::vector<double> sGrid,
                                       std::vector<double> iGrid) {
  MagnetParams analytic = p;
  analytic.backend = MagnetBackend::analytic;
  analytic.table.reset();
  const std::size_t cells = sGrid.size() * iGrid.size();
  std::vector<double> f(cells), a0(cells), a1(cells), b(cells);
  for (std::size_t is = 0; is < sGrid.size(); ++is) {
    for (std::size_t ii = 0; ii < iGrid.size(); ++ii) {
      const double s = sGrid[is];
      const double i = iGrid[ii];
      const std::size_t k = is * iGrid.size() + ii;
      f[k] = magnet_force(s, i, analytic);
      a0[k] = current_derivative(s, 0.0, i, 0.0, analytic);
      a1[k] = current_derivative(s, 1.0, i, 0.0, analytic) - a0[k];
      b[k] = s / (2.0 * analytic.km);
    }
  }
  return {std::move(sGrid), std::move(iGrid), std::move(f), std::move(a0), std::move(a1),
          std::move(b)};
}

MagnetTable::Cell MagnetTable::locate(double s, double i) const {
  if (s < sGrid_.front() || s > sGrid_.back() || i < iGrid_.front() || i > iGrid_.back()) {
    std::ostringstream msg;
    msg << "magnet table lookup (s = " << s << ", I = " << i << ") outside grid";
    throw ExtrapolationError(msg.str());
  }
  Cell c{};
  c.is = segment(sGrid_, s);
  c.ii = segment(iGrid_, i);
  c.ts = (s - sGrid_[c.is]) / (sGrid_[c.is + 1] - sGrid_[c.is]);
  c.ti = (i - iGrid_[c.ii]) / (iGrid_[c.ii + 1] - iGrid_[c.ii]);
  return c;
}

double MagnetTable::interpolate(const std::vector<double>& values, const Cell& c) const {
  const double v00 = at(values, c.is, c.ii);
  const double v01 = at(values, c.is, c.ii + 1);
  const double v10 = at(values, c.is + 1, c.ii);
  const double v11 = at(values, c.is + 1, c.ii + 1);
  return (1.0 - c.ts) * ((1.0 - c.ti) * v00 + c.ti * v01) + c.ts * ((1.0 - c.ti) * v10 + c.ti * v11);
}

double MagnetTable::force(double s, double i) const {
  return std::max(0.0, interpolate(force_, locate(s, i)));
}

double MagnetTable::alpha(double s, double sDot, double i) const {
  const Cell c = locate(s, i);
  return interpolate(alpha0_, c) + interpolate(alphaSdot_, c) * sDot;
}

double MagnetTable::beta(double s, double i) const {
  return interpolate(beta_, locate(s, i));
}

double MagnetTable::force_ds(double s, double i) const {
  const Cell c = locate(s, i);
  const double lo = (1.0 - c.ti) * at(force_, c.is, c.ii) + c.ti * at(force_, c.is, c.ii + 1);
  const double hi = (1.0 - c.ti) * at(force_, c.is + 1, c.ii) + c.ti * at(force_, c.is + 1, c.ii + 1);
  return (hi - lo) / (sGrid_[c.is + 1] - sGrid_[c.is]);
}

double MagnetTable::force_di(double s, double i) const {
  const Cell c = locate(s, i);
  const double lo = (1.0 - c.ts) * at(force_, c.is, c.ii) + c.ts * at(force_, c.is + 1, c.ii);
  const double hi = (1.0 - c.ts) * at(force_, c.is, c.ii + 1) + c.ts * at(force_, c.is + 1, c.ii + 1);
  return (hi - lo) / (iGrid_[c.ii + 1] - iGrid_[c.ii]);
}

}  // namespace maglev
