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

// Receding-horizon NMPC policies built on the multiple-shooting OCP.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "maglev/model.hpp"
#include "maglev/ocp.hpp"
#include "maglev/sqp.hpp"

namespace maglev {

enum class IterationMode { converge, realTimeIteration };

/// `linearized` predicts with the Jacobian model at the equilibrium.
enum class PredictionModel { nonlinear, linearized };

struct ControllerConfig {
  std::string name = "C2M";
  ModelKind model = ModelKind::twoMass;
  double horizon = 0.050;       // T [s]
  int nIntervals = 50;          // N
  double samplingTime = 1e-3;   // delta [s]
  std::vector<double> qWeights{1e2, 1.0, 1.0, 1.0, 1e5};
  double rWeight = 1.0;
  IterationMode mode = IterationMode::converge;
  PredictionModel prediction = PredictionModel::nonlinear;
  int maxIterations = 30;
  double kktTolerance = 1e-6;
  double defectTolerance = 1e-8;

  void validate() const;
};

/// Table 1 presets: C1M (single mass, 50 ms, N = 50), C2M (two-mass, 50 ms,
/// N = 50), C2ML (two-mass, 500 ms, N = 500). Weights default to the
/// comparison-scenario values.
ControllerConfig preset_controller(std::string_view name);
const std::vector<std::string>& preset_names();

struct ControlOutput {
  double u = 0.0;        // voltage deviation from the controller's nominal voltage [V]
  double voltage = 0.0;  // absolute coil voltage [V]
  SolveStats stats;
};

class Controller {
 public:
  /// `plantEq` is the two-mass equilibrium that measured states refer to.
  Controller(ControllerConfig cfg, const ModelParams& params, const Equilibrium& plantEq);

  /// One receding-horizon step from the measured deviation state.
  ControlOutput step(const ControllerState& x);

  [[nodiscard]] const ControllerConfig& config() const { return cfg_; }
  [[nodiscard]] const OcpProblem& problem() const { return problem_; }
  [[nodiscard]] const ShootingTrajectory& warm_start() const { return warm_; }
  [[nodiscard]] const ControlModel& model() const { return *model_; }
  [[nodiscard]] const SolveStats& last_stats() const { return lastStats_; }
  [[nodiscard]] double u_max() const { return problem_.uUpper(0); }

  /// Initial condition as the OCP sees it for a measured state.
  [[nodiscard]] Vector measurement(const ControllerState& x) const;

  void set_trace(std::ostream* trace) { trace_ = trace; }

 private:
  ControllerConfig cfg_;
  std::shared_ptr<const ControlModel> model_;
  Equilibrium plantEq_;
  OcpProblem problem_;
  ShootingTrajectory warm_;
  ActiveSet active_;
  SolveStats lastStats_;
  std::ostream* trace_ = nullptr;
};

Controller build_controller(const ControllerConfig& cfg, const Equilibrium& plantEq,
                            const ModelParams& params);

/// Drops the first interval and duplicates the last state and input.
ShootingTrajectory shift_warm_start(const ShootingTrajectory& traj);

}  // namespace maglev
