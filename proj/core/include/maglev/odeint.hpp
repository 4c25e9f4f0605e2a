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

// Fixed-step classical Runge-Kutta integration and the discrete
// sensitivities used by the multiple-shooting transcription.

#include <functional>

#include "maglev/types.hpp"

namespace maglev {

/// Autonomous dynamics with an input held constant: xdot = f(x, u).
using Dynamics = std::function<Vector(const Vector& x, const Vector& u)>;

/// Jacobians of Dynamics: writes df/dx (n x n) and df/du (n x m).
using DynamicsJacobian = std::function<void(const Vector& x, const Vector& u, Matrix& fx, Matrix& fu)>;

struct DiscreteDynamicsResult {
  Vector xNext;
  Matrix aMat;  // d xNext / d x
  Matrix bMat;  // d xNext / d u
};

Vector rk4_step(const Dynamics& f, const Vector& x, const Vector& u, double h);

/// `substeps` chained RK4 steps of length h / substeps.
Vector integrate(const Dynamics& f, const Vector& x, const Vector& u, double h, int substeps = 1);

/// Forward-difference sensitivities of the integrator. Perturbation of
/// component j is sqrt(eps) * max(1, |z_j|).
DiscreteDynamicsResult discretize_with_sensitivities(const Dynamics& f, const Vector& x,
                                                     const Vector& u, double h, int substeps = 1);

/// Exact derivative of the RK4 map, propagated through the stages from the
/// supplied continuous-time Jacobians.
DiscreteDynamicsResult discretize_with_jacobians(const Dynamics& f, const DynamicsJacobian& jac,
                                                 const Vector& x, const Vector& u, double h,
                                                 int substeps = 1);

/// Throws IntegrationError naming the first non-finite component of dx.
void check_finite(const Vector& dx, const char* where);

/// Classical RK4 for time-varying right-hand sides on any vector-space type.
template <class State, class F>
State rk4_step_timed(F&& f, double t, const State& x, double h) {
  const State k1 = f(t, x);
  const State k2 = f(t + 0.5 * h, State(x + (0.5 * h) * k1));
  const State k3 = f(t + 0.5 * h, State(x + (0.5 * h) * k2));
  const State k4 = f(t + h, State(x + h * k3));
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace maglev
