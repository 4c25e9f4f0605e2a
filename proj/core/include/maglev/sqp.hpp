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

#include <iosfwd>

#include "maglev/ocp.hpp"

namespace maglev {

struct SqpOptions {
  int maxIterations = 30;
  double kktTolerance = 1e-6;
  double defectTolerance = 1e-8;
  bool realTimeIteration = false;  // one SQP iteration per call
  std::ostream* trace = nullptr;   // CSV rows: iteration,kkt,defect,step_norm,alpha,active_bounds
};

struct SqpResult {
  ShootingTrajectory trajectory;
  SolveStats stats;
  Multipliers multipliers;
  ActiveSet active;
};

/// Gauss-Newton SQP with a Riccati/active-set QP and an l1-merit backtracking
/// line search. The returned inputs satisfy the input box exactly.
SqpResult solve_sqp(const OcpProblem& problem, const ShootingTrajectory& warmStart,
                    const SqpOptions& options = {}, const ActiveSet& activeHint = {});

/// Header line matching the rows written to SqpOptions::trace.
void write_trace_header(std::ostream& os);

}  // namespace maglev
