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

#include <gtest/gtest.h>

#include "maglev/errors.hpp"
#include "maglev/guideway.hpp"
#include "maglev/simulation.hpp"

namespace maglev {
namespace {

Scenario base_scenario(const char* controller, double duration) {
  Scenario sc;
  sc.name = controller;
  sc.duration = duration;
  sc.controller = preset_controller(controller);
  GuidewayParams gp;
  sc.guideway = make_guideway(gp, 1, sc.speed * duration + 10.0);
  return sc;
}

Scenario flat_scenario(const char* controller, double duration) {
  Scenario sc = base_scenario(controller, duration);
  sc.guideway.sagAmplitude = 0.0;
  sc.guideway.enableStochastic = false;
  sc.guideway.irregularity.samples.clear();
  return sc;
}

TEST(Scenario, PlantStepMustDivideTheSamplingTime) {
  Scenario sc = flat_scenario("C2M", 0.01);
  sc.plantStep = 3e-4;
  EXPECT_THROW(sc.validate(), ConfigError);
  sc.plantStep = 1e-4;
  sc.duration = 1e-4;
  EXPECT_THROW(sc.validate(), ConfigError);
}

TEST(Scenario, MismatchScalesThePlant) {
  Scenario sc = flat_scenario("C2M", 0.01);
  sc.mismatch.m2 = 1.1;
  sc.mismatch.km = 0.9;
  const ModelParams p = sc.plant_params();
  EXPECT_DOUBLE_EQ(p.mech.m2, 3300.0);
  EXPECT_DOUBLE_EQ(p.magnet.km, 0.9 * sc.params.magnet.km);
  EXPECT_DOUBLE_EQ(p.mech.m1, sc.params.mech.m1);
}

TEST(ClosedLoop, FlatGuidewayStaysAtRest) {
  const RideLog log = run_closed_loop(flat_scenario("C2M", 0.2));
  ASSERT_TRUE(log.ok()) << log.message;
  ASSERT_EQ(log.size(), 2000u);
  for (std::size_t j = 0; j < log.size(); ++j) {
    EXPECT_LT(std::abs(log.ds[j]), 1e-9);
    EXPECT_LT(std::abs(log.u[j]), 1e-9);
  }
}

TEST(ClosedLoop, LogIsUniformlySampled) {
  const RideLog log = run_closed_loop(base_scenario("C1M", 0.01));
  ASSERT_EQ(log.size(), 100u);
  for (std::size_t j = 0; j < log.size(); ++j) {
    EXPECT_DOUBLE_EQ(log.t[j], static_cast<double>(j) * 1e-4);
  }
  EXPECT_DOUBLE_EQ(log.s[0], log.sNom);
  // The input changes only at controller samples.
  for (std::size_t j = 1; j < log.size(); ++j) {
    if (j % 10 != 0) {
      EXPECT_EQ(log.u[j], log.u[j - 1]);
    }
  }
}

TEST(ClosedLoop, RunsAreDeterministic) {
  const Scenario sc = base_scenario("C2M", 0.1);
  const RideLog a = run_closed_loop(sc);
  const RideLog b = run_closed_loop(sc);
  EXPECT_EQ(a.s, b.s);
  EXPECT_EQ(a.a2, b.a2);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.sqpIterations, b.sqpIterations);
}

TEST(ClosedLoop, ParallelComparisonMatchesSerialRuns) {
  const std::vector<Scenario> scs{base_scenario("C1M", 0.05), base_scenario("C2M", 0.05)};
  const auto parallel = run_comparison(scs, 2);
  ASSERT_EQ(parallel.size(), 2u);
  for (std::size_t k = 0; k < scs.size(); ++k) {
    const RideLog serial = run_closed_loop(scs[k]);
    EXPECT_EQ(parallel[k].name, scs[k].name);
    EXPECT_EQ(parallel[k].ds, serial.ds);
  }
}

TEST(ClosedLoop, SaturatedInputStaysWithinTheBound) {
  Scenario sc = base_scenario("C2M", 0.3);
  sc.params.magnet.uMax = 40.0;
  const RideLog log = run_closed_loop(sc);
  ASSERT_TRUE(log.ok()) << log.message;
  std::size_t saturated = 0;
  for (double u : log.u) {
    EXPECT_LE(std::abs(u), 40.0);
    saturated += std::abs(u) == 40.0 ? 1 : 0;
  }
  EXPECT_GT(saturated, 0u);
}

TEST(ClosedLoop, FallingMagnetIsALevitationFailure) {
  Scenario sc = flat_scenario("C2M", 0.5);
  sc.params.magnet.uMax = 0.5;
  const Equilibrium eq = solve_equilibrium(sc.params);
  PlantState st = equilibrium_plant_state(eq, sc.params, 0.0);
  st.z1 += 0.008;
  st.z2 += 0.008;
  sc.initialState = st;
  const RideLog log = run_closed_loop(sc);
  EXPECT_EQ(log.status, RunStatus::levitationFailure);
  EXPECT_FALSE(log.message.empty());
  EXPECT_GT(log.size(), 0u);
  EXPECT_LT(log.size(), 5000u);
}

TEST(ClosedLoop, SagExcitesTheCarBody) {
  Scenario sc = base_scenario("C2M", 0.3);
  sc.guideway.enableStochastic = false;
  const RideLog log = run_closed_loop(sc);
  ASSERT_TRUE(log.ok());
  double peak = 0.0;
  for (double a : log.a2) {
    peak = std::max(peak, std::abs(a));
  }
  EXPECT_GT(peak, 1e-3);
}

}  // namespace
}  // namespace maglev
