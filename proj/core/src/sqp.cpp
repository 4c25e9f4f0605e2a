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

#include "maglev/sqp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>

namespace maglev {
namespace {

void clamp_inputs(const OcpProblem& problem, ShootingTrajectory& traj) {
  for (auto& u : traj.inputs) {
    u = u.cwiseMax(problem.uLower).cwiseMin(problem.uUpper);
  }
}

int count_active(const ActiveSet& set) {
  int count = 0;
  for (const auto& stage : set) {
    count += static_cast<int>(std::count_if(stage.begin(), stage.end(),
                                            [](BoundStatus b) { return b != BoundStatus::inactive; }));
  }
  return count;
}

}  // namespace

void write_trace_header(std::ostream& os) {
  os << "iteration,kkt,defect,step_norm,alpha,active_bounds\n";
}

SqpResult solve_sqp(const OcpProblem& problem, const ShootingTrajectory& warmStart,
                    const SqpOptions& options, const ActiveSet& activeHint) {
  const auto start = std::chrono::steady_clock::now();
  problem.validate();
  check_dimensions(problem, warmStart);
  const int N = problem.nIntervals;

  SqpResult result;
  result.trajectory = warmStart;
  ShootingTrajectory& traj = result.trajectory;
  clamp_inputs(problem, traj);
  traj.states[0] = problem.initialState;
  result.active = activeHint;

  Linearization lin = linearize(problem, traj);
  result.multipliers = estimate_multipliers(problem, traj, lin);
  SolveStats& stats = result.stats;
  stats.kktResidual = kkt_residual(problem, traj, result.multipliers, lin);
  stats.maxDefect = lin.maxDefect;
  auto done = [&] {
    return stats.kktResidual <= options.kktTolerance && stats.maxDefect <= options.defectTolerance;
  };
  stats.converged = done();
  if (options.trace) {
    *options.trace << 0 << ',' << stats.kktResidual << ',' << stats.maxDefect << ",0,0,"
                   << count_active(result.active) << '\n';
  }

  double nu = 0.0;
  BoxBounds bounds;
  bounds.lower.resize(N);
  bounds.upper.resize(N);
  while (!stats.converged && stats.sqpIterations < options.maxIterations) {
    for (int k = 0; k < N; ++k) {
      bounds.lower[k] = problem.uLower - traj.inputs[k];
      bounds.upper[k] = problem.uUpper - traj.inputs[k];
    }
    const QpSolution qp = solve_box_qp(lin.lq, bounds, result.active);
    ++stats.sqpIterations;
    stats.qpIterations += qp.activeSetIterations;
    stats.regularized = stats.regularized || qp.regularized;
    result.active = qp.active;

    double lamMax = 0.0;
    double slope = 0.0;
    double stepNorm = 0.0;
    for (int k = 0; k <= N; ++k) {
      lamMax = std::max(lamMax, qp.lambda[k].cwiseAbs().maxCoeff());
      stepNorm = std::max(stepNorm, qp.dx[k].cwiseAbs().maxCoeff());
    }
    for (int k = 0; k < N; ++k) {
      const LqStage& st = lin.lq.stages[k];
      slope += st.q.dot(qp.dx[k]) + st.r.dot(qp.du[k]);
      stepNorm = std::max(stepNorm, qp.du[k].cwiseAbs().maxCoeff());
    }
    nu = std::max(nu, 1.1 * lamMax);
    slope -= nu * lin.defectL1;

    auto trial_at = [&](double alpha) {
      ShootingTrajectory trial = traj;
      for (int k = 0; k <= N; ++k) {
        trial.states[k] += alpha * qp.dx[k];
      }
      for (int k = 0; k < N; ++k) {
        trial.inputs[k] += alpha * qp.du[k];
      }
      clamp_inputs(problem, trial);
      return trial;
    };

    // The trial linearization doubles as the merit evaluation and is kept
    // when the step is accepted.
    double alpha = 1.0;
    ShootingTrajectory trial = trial_at(alpha);
    trial.states[0] = problem.initialState;
    std::optional<Linearization> trialLin;
    auto try_linearize = [&] {
      try {
        trialLin = linearize(problem, trial);
      } catch (const std::exception&) {
        trialLin.reset();  // trial left the model's domain
      }
    };
    try_linearize();
    if (slope < 0.0) {
      const double phi0 = lin.cost + nu * lin.defectL1;
      while (alpha > 1e-6) {
        if (trialLin && trialLin->cost + nu * trialLin->defectL1 <= phi0 + 1e-4 * alpha * slope) {
          break;
        }
        alpha *= 0.5;
        trial = trial_at(alpha);
        trial.states[0] = problem.initialState;
        try_linearize();
      }
    }
    if (!trialLin) {
      break;  // keep the last iterate that could be evaluated
    }
    traj = std::move(trial);
    lin = std::move(*trialLin);
    result.multipliers = estimate_multipliers(problem, traj, lin);
    stats.kktResidual = kkt_residual(problem, traj, result.multipliers, lin);
    stats.maxDefect = lin.maxDefect;
    stats.converged = done();
    if (options.trace) {
      *options.trace << stats.sqpIterations << ',' << stats.kktResidual << ',' << stats.maxDefect
                     << ',' << stepNorm << ',' << alpha << ',' << count_active(result.active) << '\n';
    }
    if (options.realTimeIteration) {
      break;
    }
  }
  stats.solveTime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace maglev
