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

#include "maglev/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "maglev/errors.hpp"
#include "maglev/odeint.hpp"

namespace maglev {
namespace {

long long steps_per_sample(const Scenario& sc) {
  const double ratio = sc.controller.samplingTime / sc.plantStep;
  const long long sub = std::llround(ratio);
  if (sub < 1 || std::abs(ratio - static_cast<double>(sub)) > 1e-9 * ratio) {
    throw ConfigError("scenario.plant_step must divide the controller sampling time");
  }
  return sub;
}

}  // namespace

void Scenario::validate() const {
  if (!(speed > 0.0)) {
    throw ConfigError("scenario.speed must be > 0");
  }
  if (!(duration > 0.0)) {
    throw ConfigError("scenario.duration must be > 0");
  }
  if (!(plantStep > 0.0)) {
    throw ConfigError("scenario.plant_step must be > 0");
  }
  for (double f : {mismatch.m1, mismatch.m2, mismatch.ck, mismatch.cd, mismatch.km}) {
    if (!(f > 0.0)) {
      throw ConfigError("scenario mismatch factors must be > 0");
    }
  }
  if (!(guideway.girderLength > 0.0) || !(guideway.sagAmplitude >= 0.0)) {
    throw ConfigError("guideway parameters out of range");
  }
  params.validate();
  plant_params().validate();
  controller.validate();
  steps_per_sample(*this);
  if (std::llround(duration / controller.samplingTime) < 1) {
    throw ConfigError("scenario.duration is shorter than one sampling period");
  }
}

ModelParams Scenario::plant_params() const {
  ModelParams p = params;
  p.mech.m1 *= mismatch.m1;
  p.mech.m2 *= mismatch.m2;
  p.mech.ck *= mismatch.ck;
  p.mech.cd *= mismatch.cd;
  p.magnet.km *= mismatch.km;
  return p;
}

void RideLog::reserve(std::size_t n) {
  for (auto* v : {&t, &s, &ds, &z1, &z2, &v1, &v2, &a1, &a2, &current, &voltage, &u, &dgw, &kkt,
                  &solveMs}) {
    v->reserve(n);
  }
  sqpIterations.reserve(n);
}

Vector plant_derivative(double t, const Vector& state, double voltage, const Scenario& scenario,
                        const ModelParams& plant) {
  const double pos = scenario.speed * t;
  const double d = deflection_at(scenario.guideway, pos);
  const double dDot = scenario.speed * deflection_slope_at(scenario.guideway, pos);
  const PlantState st{state(0), state(1), state(2), state(3), state(4)};
  const double s = st.z1 - d;
  const double sDot = st.v1 - dDot;
  const double force = magnet_force(s, st.current, plant.magnet);
  const auto acc = two_mass_accelerations(st, force, plant.mech);
  Vector dx(5);
  dx << st.v1, st.v2, acc.a1, acc.a2, current_derivative(s, sDot, st.current, voltage, plant.magnet);
  return dx;
}

RideLog run_closed_loop(const Scenario& sc) {
  sc.validate();
  const ModelParams plant = sc.plant_params();
  const Equilibrium ctrlEq = solve_equilibrium(sc.params, ModelKind::twoMass);
  const Equilibrium plantEq = solve_equilibrium(plant, ModelKind::twoMass);
  Controller ctrl(sc.controller, sc.params, ctrlEq);

  const long long sub = steps_per_sample(sc);
  const long long samples = std::llround(sc.duration / sc.controller.samplingTime);
  const double h = sc.plantStep;
  const double sNom = plant.magnet.sNom;

  RideLog log;
  log.name = sc.name.empty() ? sc.controller.name : sc.name;
  log.plantStep = h;
  log.sampleTime = sc.controller.samplingTime;
  log.sNom = sNom;
  log.uMax = sc.params.magnet.uMax;
  log.reserve(static_cast<std::size_t>(samples * sub));

  Vector y(5);
  if (sc.initialState) {
    const auto& p = *sc.initialState;
    y << p.z1, p.z2, p.v1, p.v2, p.current;
  } else {
    const auto p = equilibrium_plant_state(plantEq, plant, deflection_at(sc.guideway, 0.0));
    y << p.z1, p.z2, p.v1, p.v2, p.current;
  }

  auto fail = [&](RunStatus status, const std::string& what) {
    log.status = status;
    log.message = what;
    return log;
  };

  for (long long k = 0; k < samples; ++k) {
    const long long j0 = k * sub;
    const double tk = static_cast<double>(j0) * h;
    const double dk = deflection_at(sc.guideway, sc.speed * tk);
    const PlantState st{y(0), y(1), y(2), y(3), y(4)};

    ControlOutput out;
    try {
      out = ctrl.step(to_controller_state(st, dk, ctrlEq, sc.params));
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "controller failed at t = " << tk << " s: " << e.what();
      return fail(RunStatus::error, msg.str());
    }
    if (!out.stats.converged) {
      ++log.nonConverged;
    }
    const double solveMs = out.stats.solveTime * 1e3;

    for (long long i = 0; i < sub; ++i) {
      const double t = static_cast<double>(j0 + i) * h;
      const double d = deflection_at(sc.guideway, sc.speed * t);
      const PlantState now{y(0), y(1), y(2), y(3), y(4)};
      const double s = now.z1 - d;
      const auto acc = two_mass_accelerations(now, magnet_force(s, now.current, plant.magnet), plant.mech);
      log.t.push_back(t);
      log.s.push_back(s);
      log.ds.push_back(s - sNom);
      log.z1.push_back(now.z1);
      log.z2.push_back(now.z2);
      log.v1.push_back(now.v1);
      log.v2.push_back(now.v2);
      log.a1.push_back(acc.a1);
      log.a2.push_back(acc.a2);
      log.current.push_back(now.current);
      log.voltage.push_back(out.voltage);
      log.u.push_back(out.u);
      log.dgw.push_back(d);
      log.sqpIterations.push_back(out.stats.sqpIterations);
      log.kkt.push_back(out.stats.kktResidual);
      log.solveMs.push_back(solveMs);

      try {
        y = rk4_step_timed(
            [&](double tt, const Vector& yy) { return plant_derivative(tt, yy, out.voltage, sc, plant); },
            t, y, h);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "levitation failure at t = " << t << " s: " << e.what();
        return fail(RunStatus::levitationFailure, msg.str());
      }
      const double tNext = static_cast<double>(j0 + i + 1) * h;
      const double sNext = y(0) - deflection_at(sc.guideway, sc.speed * tNext);
      if (!std::isfinite(sNext) || sNext <= 0.0 || sNext >= 2.0 * sNom) {
        std::ostringstream msg;
        msg << "levitation failure at t = " << tNext << " s: air gap " << sNext << " m left (0, "
            << 2.0 * sNom << ")";
        return fail(RunStatus::levitationFailure, msg.str());
      }
    }
  }
  return log;
}

std::vector<RideLog> run_comparison(const std::vector<Scenario>& scenarios, unsigned workers) {
  std::vector<RideLog> logs(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        logs[i] = run_closed_loop(scenarios[i]);
      } catch (const std::exception& e) {
        logs[i] = RideLog{};
        logs[i].name = scenarios[i].name.empty() ? scenarios[i].controller.name : scenarios[i].name;
        logs[i].status = RunStatus::error;
        logs[i].message = e.what();
      }
    }
  };
  const auto count = std::max<std::size_t>(1, std::min<std::size_t>(workers, scenarios.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < count; ++w) {
    pool.emplace_back(work);
  }
  work();
  for (auto& th : pool) {
    th.join();
  }
  return logs;
}

}  // namespace maglev
