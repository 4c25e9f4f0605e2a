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

// Closed-loop simulation: plant integrated at a fine step under a
// zero-order hold of the controller output, guideway evaluated from the
// vehicle position.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "maglev/controller.hpp"
#include "maglev/guideway.hpp"
#include "maglev/model.hpp"

namespace maglev {

/// Multiplicative plant-model mismatch; all ones means the plant equals the
/// controller model.
struct PlantMismatch {
  double m1 = 1.0;
  double m2 = 1.0;
  double ck = 1.0;
  double cd = 1.0;
  double km = 1.0;
};

struct Scenario {
  std::string name;
  double speed = 600.0 / 3.6;  // [m/s]
  double duration = 30.0;      // [s]
  double plantStep = 1e-4;     // [s]
  ModelParams params;          // nominal parameters, used by the controller
  PlantMismatch mismatch;
  GuidewayProfile guideway;
  ControllerConfig controller;
  std::optional<PlantState> initialState;  // empty: equilibrium at t = 0

  void validate() const;
  [[nodiscard]] ModelParams plant_params() const;
};

enum class RunStatus { ok, levitationFailure, error };

/// Uniformly sampled record at 1 / plantStep. Row j holds the plant state at
/// t_j = j * plantStep and the voltage applied over [t_j, t_j + plantStep).
struct RideLog {
  std::string name;
  double plantStep = 0.0;
  double sampleTime = 0.0;  // controller period
  double sNom = 0.0;
  double uMax = 0.0;
  std::vector<double> t;
  std::vector<double> s;
  std::vector<double> ds;
  std::vector<double> z1;
  std::vector<double> z2;
  std::vector<double> v1;
  std::vector<double> v2;
  std::vector<double> a1;
  std::vector<double> a2;
  std::vector<double> current;
  std::vector<double> voltage;
  std::vector<double> u;  // voltage deviation from the controller's nominal voltage
  std::vector<double> dgw;
  std::vector<int> sqpIterations;
  std::vector<double> kkt;
  std::vector<double> solveMs;
  RunStatus status = RunStatus::ok;
  std::string message;
  std::size_t nonConverged = 0;  // control steps that hit the iteration limit

  [[nodiscard]] std::size_t size() const { return t.size(); }
  [[nodiscard]] bool ok() const { return status == RunStatus::ok; }
  void reserve(std::size_t n);
};

/// Plant right-hand side in absolute coordinates, state [z1 z2 v1 v2 I].
Vector plant_derivative(double t, const Vector& state, double voltage, const Scenario& scenario,
                        const ModelParams& plant);

RideLog run_closed_loop(const Scenario& scenario);

/// Runs independent scenarios on up to `workers` threads; results keep the
/// input order. Failures are reported in the per-run status.
std::vector<RideLog> run_comparison(const std::vector<Scenario>& scenarios, unsigned workers = 1);

}  // namespace maglev
