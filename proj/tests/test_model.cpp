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

#include "maglev/errors.hpp"
#include "maglev/magnet_table.hpp"
#include "maglev/model.hpp"
#include "maglev/odeint.hpp"

namespace maglev {
namespace {

ModelParams defaults() { return {}; }

TEST(Magnet, ForceFollowsInverseSquareLaw) {
  const MagnetParams p;
  EXPECT_NEAR(magnet_force(0.01, 25.0, p), p.km * 2500.0 * 2500.0, 1e-9);
  EXPECT_NEAR(magnet_force(0.02, 25.0, p) * 4.0, magnet_force(0.01, 25.0, p), 1e-9);
}

TEST(Magnet, ForceIsEvenInTheCurrent) {
  const MagnetParams p;
  EXPECT_EQ(magnet_force(0.012, 17.0, p), magnet_force(0.012, -17.0, p));
}

TEST(Magnet, ClosedGapIsADomainError) {
  const MagnetParams p;
  EXPECT_THROW(magnet_force(0.0, 25.0, p), DomainError);
  EXPECT_THROW(magnet_force(-1e-3, 25.0, p), DomainError);
}

TEST(Magnet, ForceGradientMatchesCentralDifferences) {
  const MagnetParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> s(0.004, 0.018);
  std::uniform_real_distribution<double> i(5.0, 60.0);
  for (int k = 0; k < 50; ++k) {
    const double s0 = s(rng);
    const double i0 = i(rng);
    const ForceGradient g = magnet_force_gradient(s0, i0, p);
    const double hs = 1e-7;
    const double hi = 1e-5;
    const double fds = (magnet_force(s0 + hs, i0, p) - magnet_force(s0 - hs, i0, p)) / (2 * hs);
    const double fdi = (magnet_force(s0, i0 + hi, p) - magnet_force(s0, i0 - hi, p)) / (2 * hi);
    EXPECT_NEAR(g.ds, fds, 1e-6 * std::abs(fds));
    EXPECT_NEAR(g.di, fdi, 1e-6 * std::abs(fdi));
  }
}

TEST(Equilibrium, MatchesClosedFormCurrent) {
  const ModelParams p = defaults();
  const Equilibrium eq = solve_equilibrium(p);
  const double weight = (p.mech.m1 + p.mech.m2) * p.mech.g;
  const double iRef = p.magnet.sNom * std::sqrt(weight / p.magnet.km);
  EXPECT_NEAR(eq.iNom, iRef, 1e-9 * iRef);
  EXPECT_NEAR(eq.uNom, p.magnet.rc * iRef, 1e-9 * iRef);
  EXPECT_NEAR(eq.dz2Nom, -p.mech.m2 * p.mech.g / p.mech.ck, 1e-12);
  EXPECT_LT(std::abs(magnet_force(p.magnet.sNom, eq.iNom, p.magnet) - weight), 1e-9 * weight);
}

TEST(Equilibrium, QuadrupledForceConstantHalvesTheCurrent) {
  ModelParams p = defaults();
  const double i1 = solve_equilibrium(p).iNom;
  p.magnet.km *= 4.0;
  EXPECT_NEAR(solve_equilibrium(p).iNom, 0.5 * i1, 1e-12 * i1);
}

TEST(Equilibrium, SingleMassCarriesTheStaticLoad) {
  ModelParams p = defaults();
  p.mech.fL = 12000.0;
  const Equilibrium eq = solve_equilibrium(p, ModelKind::singleMass);
  const double weight = p.mech.m1 * p.mech.g + p.mech.fL;
  EXPECT_NEAR(magnet_force(p.magnet.sNom, eq.iNom, p.magnet), weight, 1e-9 * weight);
}

TEST(Equilibrium, DerivativeVanishesAtRest) {
  const ModelParams p = defaults();
  const Equilibrium eq = solve_equilibrium(p);
  const ControllerState dx = state_derivative({}, 0.0, eq, p);
  EXPECT_NEAR(dx.ds, 0.0, 1e-15);
  EXPECT_NEAR(dx.dz2, 0.0, 1e-15);
  EXPECT_NEAR(dx.v1, 0.0, 1e-9);
  EXPECT_NEAR(dx.v2, 0.0, 1e-9);
  EXPECT_NEAR(dx.di, 0.0, 1e-9);
}

TEST(Equilibrium, ZeroForceConstantIsRejected) {
  ModelParams p = defaults();
  p.magnet.km = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  EXPECT_THROW(solve_equilibrium(p), ConfigError);
}

TEST(Equilibrium, TableThatCannotCarryTheLoadIsInfeasible) {
  ModelParams p = defaults();
  p.magnet.backend = MagnetBackend::table;
  p.magnet.table = std::make_shared<MagnetTable>(
      MagnetTable::from_analytic(p.magnet, {0.005, 0.010, 0.015}, {0.0, 10.0, 20.0}));
  EXPECT_THROW(solve_equilibrium(p), InfeasibleParameters);
}

TEST(Equilibrium, RestStateMapsToZeroDeviation) {
  const ModelParams p = defaults();
  const Equilibrium eq = solve_equilibrium(p);
  const PlantState st = equilibrium_plant_state(eq, p, 1.3e-3);
  const ControllerState x = to_controller_state(st, 1.3e-3, eq, p);
  EXPECT_NEAR(x.ds, 0.0, 1e-15);
  EXPECT_NEAR(x.dz2, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(x.di, 0.0);
}

class JacobianTest : public ::testing::TestWithParam<ModelKind> {};

TEST_P(JacobianTest, AnalyticJacobiansMatchCentralDifferences) {
  const ModelParams p = defaults();
  const Equilibrium eq = solve_equilibrium(p, GetParam());
  const ControlModel model(GetParam(), p, eq);
  const int n = model.state_dim();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double scale[] = {2e-3, 2e-3, 0.05, 0.05, 5.0};
  for (int trial = 0; trial < 100; ++trial) {
    Vector x(n);
    for (int j = 0; j < n; ++j) {
      const int slot = (n == 5) ? j : (j == 0 ? 0 : (j == 1 ? 2 : 4));
      x(j) = scale[slot] * unit(rng);
    }
    Vector u(1);
    u(0) = 100.0 * unit(rng);
    const Matrix a = model.state_jacobian(x, u);
    const Matrix b = model.input_jacobian(x, u);
    const Matrix c = model.output_jacobian(x);
    for (int j = 0; j < n; ++j) {
      const double h = 1e-6 * std::max(1e-3, std::abs(x(j)));
      Vector xp = x;
      Vector xm = x;
      xp(j) += h;
      xm(j) -= h;
      const Vector fd = (model.derivative(xp, u) - model.derivative(xm, u)) / (2 * h);
      const Vector gd = (model.output(xp) - model.output(xm)) / (2 * h);
      for (int i = 0; i < n; ++i) {
        EXPECT_NEAR(a(i, j), fd(i), 1e-5 * std::max(1.0, std::abs(fd(i)))) << "A(" << i << "," << j << ")";
        EXPECT_NEAR(c(i, j), gd(i), 1e-5 * std::max(1.0, std::abs(gd(i)))) << "C(" << i << "," << j << ")";
      }
    }
    Vector up = u;
    Vector um = u;
    up(0) += 1e-3;
    um(0) -= 1e-3;
    const Vector fu = (model.derivative(x, up) - model.derivative(x, um)) / 2e-3;
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(b(i, 0), fu(i), 1e-5 * std::max(1.0, std::abs(fu(i))));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Models, JacobianTest, ::testing::Values(ModelKind::twoMass, ModelKind::singleMass));

TEST(ControlModel, ReduceKeepsSingleMassCoordinates) {
  const ModelParams p = defaults();
  const ControlModel single(ModelKind::singleMass, p, solve_equilibrium(p, ModelKind::singleMass));
  ControllerState x;
  x.ds = 1e-3;
  x.dz2 = 2e-3;
  x.v1 = 0.1;
  x.v2 = 0.2;
  x.di = 3.0;
  const Vector r = single.reduce(x);
  ASSERT_EQ(r.size(), 3);
  EXPECT_DOUBLE_EQ(r(0), 1e-3);
  EXPECT_DOUBLE_EQ(r(1), 0.1);
  EXPECT_DOUBLE_EQ(r(2), 3.0);
}

TEST(TwoMass, InternalForcesCancel) {
  const MechanicalParams m;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    PlantState st{unit(rng), unit(rng), unit(rng), unit(rng), 25.0};
    const Accelerations a = two_mass_accelerations(st, 0.0, m);
    EXPECT_NEAR(m.m1 * a.a1 + m.m2 * a.a2, (m.m1 + m.m2) * m.g, 1e-9);
  }
}

// Free oscillation of the suspension with a constant magnet force.
struct Oscillator {
  MechanicalParams mech;
  double force;

  Vector operator()(double /*t*/, const Vector& z) const {
    PlantState st;
    st.z1 = z(0);
    st.z2 = z(1);
    st.v1 = z(2);
    st.v2 = z(3);
    const Accelerations a = two_mass_accelerations(st, force, mech);
    Vector d(4);
    d << z(2), z(3), a.a1, a.a2;
    return d;
  }

  [[nodiscard]] double energy(const Vector& z) const {
    const double stretch = z(0) - z(1);
    return 0.5 * mech.m1 * z(2) * z(2) + 0.5 * mech.m2 * z(3) * z(3) + 0.5 * mech.ck * stretch * stretch -
           (mech.m1 * mech.g - force) * z(0) - mech.m2 * mech.g * z(1);
  }
};

TEST(TwoMass, UndampedSuspensionConservesEnergy) {
  Oscillator osc{MechanicalParams{}, 29430.0};
  osc.mech.cd = 0.0;
  Vector z(4);
  z << 0.0, 0.25, 0.0, 0.3;
  const double e0 = osc.energy(z);
  const double h = 1e-4;
  for (int k = 0; k < 20000; ++k) {
    z = rk4_step_timed(osc, k * h, z, h);
  }
  EXPECT_NEAR(osc.energy(z), e0, 1e-6 * std::abs(osc.mech.m2 * 0.09));
}

TEST(TwoMass, DamperDissipatesEnergy) {
  Oscillator osc{MechanicalParams{}, 29430.0};
  Vector z(4);
  z << 0.0, 0.25, 0.0, 0.3;
  double e = osc.energy(z);
  const double h = 1e-4;
  for (int k = 0; k < 5000; ++k) {
    z = rk4_step_timed(osc, k * h, z, h);
    const double next = osc.energy(z);
    EXPECT_LE(next, e + 1e-9);
    e = next;
  }
}

}  // namespace
}  // namespace maglev
