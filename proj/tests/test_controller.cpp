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
#include <random>

#include <gtest/gtest.h>

#include "maglev/controller.hpp"
#include "maglev/errors.hpp"
#include "support/lqr.hpp"

namespace maglev {
namespace {

TEST(Presets, MatchTheControllerTable) {
  const ControllerConfig c1 = preset_controller("C1M");
  EXPECT_EQ(c1.model, ModelKind::singleMass);
  EXPECT_EQ(c1.nIntervals, 50);
  EXPECT_DOUBLE_EQ(c1.horizon, 0.05);
  EXPECT_EQ(c1.qWeights, (std::vector<double>{1e2, 1.0, 1e5}));
  const ControllerConfig c2 = preset_controller("C2M");
  EXPECT_EQ(c2.model, ModelKind::twoMass);
  EXPECT_EQ(c2.qWeights, (std::vector<double>{1e2, 1.0, 1.0, 1.0, 1e5}));
  const ControllerConfig c3 = preset_controller("C2ML");
  EXPECT_EQ(c3.nIntervals, 500);
  EXPECT_DOUBLE_EQ(c3.horizon, 0.5);
  for (const auto& name : preset_names()) {
    EXPECT_NO_THROW(preset_controller(name).validate());
  }
}

TEST(Presets, UnknownNameListsValidOnes) {
  try {
    (void)preset_controller("C3M");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("C1M"), std::string::npos);
    EXPECT_NE(msg.find("C2ML"), std::string::npos);
  }
}

TEST(ControllerConfig, HorizonMustMatchSamplingTime) {
  ControllerConfig c = preset_controller("C2M");
  c.nIntervals = 40;
  EXPECT_THROW(c.validate(), ConfigError);
  c = preset_controller("C2M");
  c.qWeights = {1.0, 1.0, 1.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = preset_controller("C2M");
  c.rWeight = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(WarmStart, ShiftDropsFirstAndRepeatsLast) {
  ShootingTrajectory t;
  for (int k = 0; k < 4; ++k) {
    t.states.push_back(Vector::Constant(2, k));
  }
  for (int k = 0; k < 3; ++k) {
    t.inputs.push_back(Vector::Constant(1, 10 + k));
  }
  const ShootingTrajectory s = shift_warm_start(t);
  ASSERT_EQ(s.states.size(), 4u);
  ASSERT_EQ(s.inputs.size(), 3u);
  EXPECT_EQ(s.states[0](0), 1.0);
  EXPECT_EQ(s.states[2](0), 3.0);
  EXPECT_EQ(s.states[3](0), 3.0);
  EXPECT_EQ(s.inputs[0](0), 11.0);
  EXPECT_EQ(s.inputs[2](0), 12.0);
}

class ControllerTest : public ::testing::TestWithParam<const char*> {
 protected:
  ModelParams params_;
  Equilibrium eq_ = solve_equilibrium(params_);
};

TEST_P(ControllerTest, HoldsTheEquilibrium) {
  Controller c(preset_controller(GetParam()), params_, eq_);
  for (int k = 0; k < 3; ++k) {
    const ControlOutput out = c.step({});
    EXPECT_LT(std::abs(out.u), 1e-9);
    EXPECT_NEAR(out.voltage, eq_.uNom, 1e-9);
    EXPECT_TRUE(out.stats.converged);
  }
}

TEST_P(ControllerTest, OutputRespectsTheInputBound) {
  Controller c(preset_controller(GetParam()), params_, eq_);
  ControllerState x;
  x.ds = 2e-3;
  x.v1 = 0.2;
  const ControlOutput out = c.step(x);
  EXPECT_LE(std::abs(out.u), params_.magnet.uMax);
  EXPECT_GT(out.u, 0.0) << "an opened gap needs more current";
}

INSTANTIATE_TEST_SUITE_P(Short, ControllerTest, ::testing::Values("C1M", "C2M"));

TEST(Controller, SingleMassUsesItsOwnEquilibrium) {
  ModelParams p;
  p.mech.fL = 20000.0;
  const Equilibrium eq = solve_equilibrium(p);
  Controller c(preset_controller("C1M"), p, eq);
  EXPECT_NE(c.model().equilibrium().iNom, eq.iNom);
  ControllerState x;
  x.di = 1.0;
  const Vector m = c.measurement(x);
  EXPECT_NEAR(m(2), eq.iNom + 1.0 - c.model().equilibrium().iNom, 1e-12);
}

TEST(Controller, RealTimeIterationSolvesOneQpPerStep) {
  const ModelParams p;
  ControllerConfig cfg = preset_controller("C2M");
  cfg.mode = IterationMode::realTimeIteration;
  Controller c(cfg, p, solve_equilibrium(p));
  ControllerState x;
  x.ds = 5e-4;
  const ControlOutput out = c.step(x);
  EXPECT_EQ(out.stats.sqpIterations, 1);
}

TEST(Controller, LinearizedPredictionEqualsLqr) {
  ModelParams p;
  p.magnet.uMax = 1e9;
  const Equilibrium eq = solve_equilibrium(p);
  ControllerConfig cfg = preset_controller("C2M");
  cfg.prediction = PredictionModel::linearized;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Controller c(cfg, p, eq);
    const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(cfg.qWeights.data(), 5);
    const Eigen::MatrixXd K = testing::lqr_gain_at_equilibrium(c.model(), q, cfg.rWeight,
                                                              c.problem().stepLen, cfg.nIntervals);
    ControllerState x;
    x.ds = 1e-3 * unit(rng);
    x.dz2 = 1e-3 * unit(rng);
    x.v1 = 0.05 * unit(rng);
    x.v2 = 0.05 * unit(rng);
    x.di = 2.0 * unit(rng);
    const double ref = -(K * Eigen::VectorXd(x.to_vector()))(0);
    const ControlOutput out = c.step(x);
    EXPECT_NEAR(out.u, ref, 1e-6 * std::abs(ref));
  }
}

}  // namespace
}  // namespace maglev
