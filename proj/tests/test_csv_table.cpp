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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "maglev/csv.hpp"
#include "maglev/errors.hpp"
#include "maglev/magnet_table.hpp"
#include "maglev/model.hpp"

namespace maglev {
namespace {

namespace fs = std::filesystem;

TEST(FormatDouble, RoundTripsRandomBitPatterns) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20000; ++k) {
    double v = 0.0;
    const std::uint64_t bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) {
      continue;
    }
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "-0");
}

TEST(ParseDouble, RejectsGarbage) {
  EXPECT_THROW(parse_double("1.5x"), std::invalid_argument);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
  EXPECT_TRUE(std::isnan(parse_double("nan")));
}

TEST(Csv, StreamRoundTrip) {
  CsvTable t;
  t.header = {"a", "b"};
  t.columns = {{1.0, 1.0 / 3.0, -2e-300}, {std::nextafter(1.0, 2.0), 0.0, 5e300}};
  std::stringstream ss;
  write_csv(ss, t);
  const CsvTable back = read_csv(ss);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_TRUE(back.has("b"));
  EXPECT_THROW((void)back.column("c"), std::out_of_range);
}

TEST(Csv, RaggedRowsAreRejected) {
  std::stringstream ss("a,b\n1,2\n3\n");
  EXPECT_THROW(read_csv(ss), std::invalid_argument);
}

TEST(Csv, MissingFileIsAnIoError) {
  EXPECT_THROW(read_csv_file("/nonexistent/log.csv"), IoError);
  EXPECT_THROW(write_csv_file("/nonexistent/dir/log.csv", CsvTable{}), IoError);
}

TEST(RideLogCsv, RoundTripIsExact) {
  RideLog log;
  log.name = "roundtrip";
  log.plantStep = 1e-4;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int j = 0; j < 50; ++j) {
    log.t.push_back(j * 1e-4);
    log.s.push_back(0.01 + 1e-4 * n01(rng));
    log.ds.push_back(log.s.back() - 0.01);
    log.z2.push_back(n01(rng));
    log.a1.push_back(n01(rng));
    log.a2.push_back(n01(rng));
    log.current.push_back(25.0 + n01(rng));
    log.voltage.push_back(25.0 + 10.0 * n01(rng));
    log.dgw.push_back(1e-3 * n01(rng));
    log.sqpIterations.push_back(j % 5);
    log.kkt.push_back(std::abs(n01(rng)) * 1e-8);
    log.solveMs.push_back(std::abs(n01(rng)));
  }
  const fs::path path = fs::temp_directory_path() / "roundtrip.csv";
  write_ride_log(log, path);
  const RideLog back = read_ride_log(path);
  fs::remove(path);
  EXPECT_EQ(back.name, "roundtrip");
  EXPECT_EQ(back.t, log.t);
  EXPECT_EQ(back.s, log.s);
  EXPECT_EQ(back.ds, log.ds);
  EXPECT_EQ(back.z2, log.z2);
  EXPECT_EQ(back.a1, log.a1);
  EXPECT_EQ(back.a2, log.a2);
  EXPECT_EQ(back.current, log.current);
  EXPECT_EQ(back.voltage, log.voltage);
  EXPECT_EQ(back.dgw, log.dgw);
  EXPECT_EQ(back.sqpIterations, log.sqpIterations);
  EXPECT_EQ(back.kkt, log.kkt);
  EXPECT_EQ(back.solveMs, log.solveMs);
  EXPECT_DOUBLE_EQ(back.plantStep, 1e-4);
  EXPECT_NEAR(back.sNom, 0.01, 1e-15);
}

TEST(RideLogCsv, MissingColumnIsAConfigError) {
  const fs::path path = fs::temp_directory_path() / "partial.csv";
  CsvTable t;
  t.header = {"t", "s"};
  t.columns = {{0.0, 1.0}, {0.01, 0.01}};
  write_csv_file(path, t);
  EXPECT_THROW(read_ride_log(path), ConfigError);
  fs::remove(path);
}

class MagnetTableTest : public ::testing::Test {
 protected:
  MagnetParams p_;
  std::vector<double> s_{0.004, 0.008, 0.012, 0.016, 0.020};
  std::vector<double> i_{0.0, 10.0, 20.0, 30.0, 40.0, 50.0};
};

TEST_F(MagnetTableTest, ReproducesAnalyticValuesAtNodes) {
  const MagnetTable t = MagnetTable::from_analytic(p_, s_, i_);
  for (double s : s_) {
    for (double i : i_) {
      EXPECT_NEAR(t.force(s, i), magnet_force(s, i, p_), 1e-9);
      EXPECT_NEAR(t.alpha(s, 0.3, i) + t.beta(s, i) * 7.0, current_derivative(s, 0.3, i, 7.0, p_),
                  1e-6 * std::max(1.0, std::abs(current_derivative(s, 0.3, i, 7.0, p_))));
    }
  }
}

TEST_F(MagnetTableTest, BilinearBetweenNodes) {
  // F = km (i/s)^2 is not bilinear; check against hand interpolation instead.
  const MagnetTable t = MagnetTable::from_analytic(p_, s_, i_);
  const double s = 0.010;
  const double i = 25.0;
  const double f00 = magnet_force(0.008, 20.0, p_);
  const double f01 = magnet_force(0.008, 30.0, p_);
  const double f10 = magnet_force(0.012, 20.0, p_);
  const double f11 = magnet_force(0.012, 30.0, p_);
  const double ref = 0.25 * (f00 + f01 + f10 + f11);
  EXPECT_NEAR(t.force(s, i), ref, 1e-9);
  EXPECT_NEAR(t.force_di(s, i), 0.5 * ((f01 - f00) + (f11 - f10)) / 10.0, 1e-9);
  EXPECT_NEAR(t.force_ds(s, i), 0.5 * ((f10 - f00) + (f11 - f01)) / 0.004, 1e-6);
}

TEST_F(MagnetTableTest, OutsideTheGridThrows) {
  const MagnetTable t = MagnetTable::from_analytic(p_, s_, i_);
  EXPECT_THROW((void)t.force(0.003, 10.0), ExtrapolationError);
  EXPECT_THROW((void)t.force(0.010, 60.0), ExtrapolationError);
}

TEST_F(MagnetTableTest, SaveLoadRoundTrip) {
  const MagnetTable t = MagnetTable::from_analytic(p_, s_, i_);
  const fs::path path = fs::temp_directory_path() / "magnet_table.txt";
  t.save(path);
  const MagnetTable back = MagnetTable::load(path);
  fs::remove(path);
  EXPECT_EQ(back.force(0.0101, 23.0), t.force(0.0101, 23.0));
  EXPECT_EQ(back.beta(0.0101, 23.0), t.beta(0.0101, 23.0));
  EXPECT_THROW(MagnetTable::load("/nonexistent/table.txt"), IoError);
}

TEST_F(MagnetTableTest, TableBackendGivesTheSameEquilibrium) {
  // Linear interpolation of i^2 over a cell of width d overestimates the
  // force by d^2 / 4, so d = 0.05 A keeps the current within 1e-6.
  std::vector<double> grid;
  for (int k = 0; k <= 1000; ++k) {
    grid.push_back(0.05 * k);
  }
  ModelParams analytic;
  ModelParams tabulated;
  tabulated.magnet.backend = MagnetBackend::table;
  tabulated.magnet.table =
      std::make_shared<MagnetTable>(MagnetTable::from_analytic(p_, {0.005, 0.010, 0.015}, grid));
  const Equilibrium a = solve_equilibrium(analytic);
  const Equilibrium b = solve_equilibrium(tabulated);
  EXPECT_NEAR(b.iNom, a.iNom, 1e-6 * a.iNom);
  EXPECT_NEAR(b.uNom, a.uNom, 1e-5 * a.uNom);
}

TEST(MagnetTableGrid, NonMonotoneGridIsRejected) {
  const MagnetParams p;
  EXPECT_THROW(MagnetTable::from_analytic(p, {0.01, 0.005}, {0.0, 1.0}), ConfigError);
}

}  // namespace
}  // namespace maglev
