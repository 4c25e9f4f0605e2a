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

#include "maglev/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "maglev/errors.hpp"

namespace maglev {

void OcpProblem::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("OCP: " + what); };
  if (n < 1 || n > kMaxDim || m < 1 || m > kMaxDim) {
    fail("state and input dimensions must lie in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (nIntervals < 1) {
    fail("nIntervals must be >= 1");
  }
  if (!(stepLen > 0.0) || substeps < 1) {
    fail("stepLen must be positive and substeps >= 1");
  }
  if (rWeights.size() != m || uRef.size() != m || uLower.size() != m || uUpper.size() != m) {
    fail("input-sized vectors do not match m");
  }
  if (initialState.size() != n) {
    fail("initial state does not match n");
  }
  if (qWeights.size() == 0 || qWeights.size() != yRef.size()) {
    fail("qWeights and yRef must have the output dimension");
  }
  if ((qWeights.array() < 0.0).any() || !(qWeights.array() > 0.0).any()) {
    fail("qWeights must be non-negative with at least one positive entry");
  }
  if (!(rWeights.array() > 0.0).all()) {
    fail("rWeights must be positive");
  }
  if ((uLower.array() > uUpper.array()).any()) {
    fail("uLower must not exceed uUpper");
  }
  if (!dynamics || !output || !outputJacobian) {
    fail("dynamics and output callbacks are required");
  }
}

ShootingTrajectory ShootingTrajectory::constant(const Vector& x, const Vector& u, int nIntervals) {
  ShootingTrajectory t;
  t.states.assign(static_cast<std::size_t>(nIntervals) + 1, x);
  t.inputs.assign(static_cast<std::size_t>(nIntervals), u);
  return t;
}

void check_dimensions(const OcpProblem& problem, const ShootingTrajectory& traj) {
  const auto N = static_cast<std::size_t>(problem.nIntervals);
  if (traj.states.size() != N + 1 || traj.inputs.size() != N) {
    throw std::invalid_argument("trajectory length does not match the horizon");
  }
  for (const auto& x : traj.states) {
    if (x.size() != problem.n) {
      throw std::invalid_argument("trajectory state dimension mismatch");
    }
  }
  for (const auto& u : traj.inputs) {
    if (u.size() != problem.m) {
      throw std::invalid_argument("trajectory input dimension mismatch");
    }
  }
}

double evaluate_cost(const OcpProblem& problem, const ShootingTrajectory& traj) {
  check_dimensions(problem, traj);
  double cost = 0.0;
  for (int k = 0; k < problem.nIntervals; ++k) {
    const Vector ry = problem.output(traj.states[k]) - problem.yRef;
    const Vector ru = traj.inputs[k] - problem.uRef;
    cost += problem.stepLen * (ry.dot(problem.qWeights.cwiseProduct(ry)) +
                               ru.dot(problem.rWeights.cwiseProduct(ru)));
  }
  return cost;
}

Linearization linearize(const OcpProblem& problem, const ShootingTrajectory& traj) {
  check_dimensions(problem, traj);
  const int N = problem.nIntervals;
  const auto n = problem.n;
  const auto m = problem.m;
  const double h = problem.stepLen;

  Linearization lin;
  lin.lq.stages.resize(N);
  lin.nextStates.resize(N);
  lin.residuals.resize(N);
  lin.lq.QN = Matrix::Zero(n, n);
  lin.lq.qN = Vector::Zero(n);
  lin.lq.x0 = problem.initialState - traj.states[0];
  lin.maxDefect = lin.lq.x0.cwiseAbs().maxCoeff();
  lin.defectL1 = lin.lq.x0.cwiseAbs().sum();

  const Matrix Rw = (2.0 * h) * problem.rWeights.asDiagonal().toDenseMatrix();
  for (int k = 0; k < N; ++k) {
    const Vector& x = traj.states[k];
    const Vector& u = traj.inputs[k];
    DiscreteDynamicsResult dd;
    try {
      dd = problem.dynamicsJacobian
               ? discretize_with_jacobians(problem.dynamics, problem.dynamicsJacobian, x, u, h,
                                           problem.substeps)
               : discretize_with_sensitivities(problem.dynamics, x, u, h, problem.substeps);
    } catch (const IntegrationError& e) {
      throw IntegrationError("shooting interval " + std::to_string(k) + ": " + e.what());
    } catch (const DomainError& e) {
      throw DomainError("shooting interval " + std::to_string(k) + ": " + e.what());
    }
    LqStage& st = lin.lq.stages[k];
    st.A = dd.aMat;
    st.B = dd.bMat;
    st.c = dd.xNext - traj.states[k + 1];
    lin.maxDefect = std::max(lin.maxDefect, st.c.cwiseAbs().maxCoeff());
    lin.defectL1 += st.c.cwiseAbs().sum();
    lin.nextStates[k] = dd.xNext;

    const Matrix J = problem.outputJacobian(x);
    const Vector ry = problem.output(x) - problem.yRef;
    const Vector ru = u - problem.uRef;
    const Matrix QJ = problem.qWeights.asDiagonal() * J;
    st.Q = (2.0 * h) * J.transpose() * QJ;
    st.S = Matrix::Zero(m, n);
    st.R = Rw;
    st.q = (2.0 * h) * QJ.transpose() * ry;
    st.r = Rw * ru;
    lin.residuals[k] = ry;
    lin.cost += h * (ry.dot(problem.qWeights.cwiseProduct(ry)) + ru.dot(problem.rWeights.cwiseProduct(ru)));
  }
  return lin;
}

Multipliers estimate_multipliers(const OcpProblem& problem, const ShootingTrajectory& traj,
                                 const Linearization& lin) {
  const int N = problem.nIntervals;
  Multipliers mult;
  mult.lambda.resize(N + 1);
  mult.mu.resize(N);
  mult.lambda[N] = lin.lq.qN;
  for (int k = N - 1; k >= 0; --k) {
    const LqStage& st = lin.lq.stages[k];
    mult.lambda[k] = st.q + st.A.transpose() * mult.lambda[k + 1];
  }
  for (int k = 0; k < N; ++k) {
    const LqStage& st = lin.lq.stages[k];
    const Vector g = st.r + st.B.transpose() * mult.lambda[k + 1];
    Vector mu = Vector::Zero(problem.m);
    for (int i = 0; i < problem.m; ++i) {
      const double u = traj.inputs[k](i);
      if (u >= problem.uUpper(i) && g(i) <= 0.0) {
        mu(i) = -g(i);
      } else if (u <= problem.uLower(i) && g(i) >= 0.0) {
        mu(i) = -g(i);
      }
    }
    mult.mu[k] = mu;
  }
  return mult;
}

double kkt_residual(const OcpProblem& problem, const ShootingTrajectory& traj,
                    const Multipliers& multipliers, const Linearization& lin) {
  const int N = problem.nIntervals;
  double res = lin.maxDefect;
  res = std::max(res, (lin.lq.qN - multipliers.lambda[N]).cwiseAbs().maxCoeff());
  for (int k = 0; k < N; ++k) {
    const LqStage& st = lin.lq.stages[k];
    if (k > 0) {
      const Vector gx = st.q + st.A.transpose() * multipliers.lambda[k + 1] - multipliers.lambda[k];
      res = std::max(res, gx.cwiseAbs().maxCoeff());
    }
    const Vector gu = st.r + st.B.transpose() * multipliers.lambda[k + 1] + multipliers.mu[k];
    res = std::max(res, gu.cwiseAbs().maxCoeff());
    for (int i = 0; i < problem.m; ++i) {
      const double mu = multipliers.mu[k](i);
      const double u = traj.inputs[k](i);
      const double gap = mu > 0.0 ? problem.uUpper(i) - u : u - problem.uLower(i);
      if (mu != 0.0) {
        res = std::max(res, std::abs(mu) * std::abs(gap));
      }
    }
  }
  return res;
}

double kkt_residual(const OcpProblem& problem, const ShootingTrajectory& traj,
                    const Multipliers& multipliers) {
  return kkt_residual(problem, traj, multipliers, linearize(problem, traj));
}

}  // namespace maglev
