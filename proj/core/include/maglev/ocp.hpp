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

// Direct multiple-shooting transcription of the tracking OCP
//
//   min  sum_{k<N} h [ (y_k - yRef)' Q (y_k - yRef) + (u_k - uRef)' R (u_k - uRef) ]
//   s.t. x_0 = initialState,  x_{k+1} = F(x_k, u_k),  uLower <= u_k <= uUpper
//
// with y_k = g(x_k), F the RK4 map over one interval, and no terminal term.

#include <vector>

#include "maglev/odeint.hpp"
#include "maglev/riccati.hpp"
#include "maglev/types.hpp"

namespace maglev {

using OutputMap = std::function<Vector(const Vector& x)>;
using OutputJacobian = std::function<Matrix(const Vector& x)>;

struct OcpProblem {
  int n = 0;
  int m = 0;
  int nIntervals = 0;
  double stepLen = 0.0;
  int substeps = 1;
  Vector qWeights;  // diagonal of Q
  Vector rWeights;  // diagonal of R
  Vector yRef;
  Vector uRef;
  Vector uLower;
  Vector uUpper;
  Vector initialState;
  Dynamics dynamics;
  DynamicsJacobian dynamicsJacobian;  // optional; finite differences when empty
  OutputMap output;
  OutputJacobian outputJacobian;

  void validate() const;
};

struct ShootingTrajectory {
  std::vector<Vector> states;  // N + 1
  std::vector<Vector> inputs;  // N

  static ShootingTrajectory constant(const Vector& x, const Vector& u, int nIntervals);
};

struct SolveStats {
  int sqpIterations = 0;
  int qpIterations = 0;
  double kktResidual = 0.0;
  double maxDefect = 0.0;
  double solveTime = 0.0;  // wall time [s]
  bool converged = false;
  bool regularized = false;
};

/// Costates for the continuity constraints and signed input-bound multipliers.
struct Multipliers {
  std::vector<Vector> lambda;  // N + 1
  std::vector<Vector> mu;      // N
};

struct Linearization {
  LqData lq;                      // Gauss-Newton model in the step variables
  std::vector<Vector> nextStates; // F(x_k, u_k)
  std::vector<Vector> residuals;  // y_k - yRef
  double cost = 0.0;
  double maxDefect = 0.0;         // infinity norm over all continuity defects
  double defectL1 = 0.0;          // sum of one-norms of the defects
};

double evaluate_cost(const OcpProblem& problem, const ShootingTrajectory& traj);

Linearization linearize(const OcpProblem& problem, const ShootingTrajectory& traj);

/// Multipliers that satisfy state stationarity exactly for the given
/// linearization; input-bound multipliers absorb the input gradient on
/// inputs sitting at a bound.
Multipliers estimate_multipliers(const OcpProblem& problem, const ShootingTrajectory& traj,
                                 const Linearization& lin);

/// Infinity norm of stationarity, continuity, and complementarity residuals.
double kkt_residual(const OcpProblem& problem, const ShootingTrajectory& traj,
                    const Multipliers& multipliers);
double kkt_residual(const OcpProblem& problem, const ShootingTrajectory& traj,
                    const Multipliers& multipliers, const Linearization& lin);

void check_dimensions(const OcpProblem& problem, const ShootingTrajectory& traj);

}  // namespace maglev
