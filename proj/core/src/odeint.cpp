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

#include "maglev/odeint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "maglev/errors.hpp"

namespace maglev {

void check_finite(const Vector& dx, const char* where) {
  for (Eigen::Index j = 0; j < dx.size(); ++j) {
    if (!std::isfinite(dx(j))) {
      std::ostringstream msg;
      msg << where << ": non-finite derivative in component " << j << " (" << dx(j) << ")";
      throw IntegrationError(msg.str());
    }
  }
}

namespace {

Vector eval(const Dynamics& f, const Vector& x, const Vector& u) {
  Vector dx = f(x, u);
  check_finite(dx, "rk4_step");
  return dx;
}

}  // namespace

Vector rk4_step(const Dynamics& f, const Vector& x, const Vector& u, double h) {
  if (!(h > 0.0)) {
    throw DomainError("rk4_step: step must be positive");
  }
  const Vector k1 = eval(f, x, u);
  const Vector k2 = eval(f, x + (0.5 * h) * k1, u);
  const Vector k3 = eval(f, x + (0.5 * h) * k2, u);
  const Vector k4 = eval(f, x + h * k3, u);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector integrate(const Dynamics& f, const Vector& x, const Vector& u, double h, int substeps) {
  if (substeps < 1) {
    throw DomainError("integrate: substeps must be >= 1");
  }
  const double dt = h / substeps;
  Vector z = x;
  for (int k = 0; k < substeps; ++k) {
    z = rk4_step(f, z, u, dt);
  }
  return z;
}

DiscreteDynamicsResult discretize_with_sensitivities(const Dynamics& f, const Vector& x,
                                                     const Vector& u, double h, int substeps) {
  const auto n = x.size();
  const auto m = u.size();
  const double root = std::sqrt(std::numeric_limits<double>::epsilon());
  DiscreteDynamicsResult out;
  out.xNext = integrate(f, x, u, h, substeps);
  out.aMat.resize(n, n);
  out.bMat.resize(n, m);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector xp = x;
    const double d = root * std::max(1.0, std::abs(x(j)));
    xp(j) += d;
    out.aMat.col(j) = (integrate(f, xp, u, h, substeps) - out.xNext) / (xp(j) - x(j));
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    Vector up = u;
    const double d = root * std::max(1.0, std::abs(u(j)));
    up(j) += d;
    out.bMat.col(j) = (integrate(f, x, up, h, substeps) - out.xNext) / (up(j) - u(j));
  }
  return out;
}

DiscreteDynamicsResult discretize_with_jacobians(const Dynamics& f, const DynamicsJacobian& jac,
                                                 const Vector& x, const Vector& u, double h,
                                                 int substeps) {
  if (!(h > 0.0) || substeps < 1) {
    throw DomainError("discretize_with_jacobians: invalid step");
  }
  const auto n = x.size();
  const auto m = u.size();
  const double dt = h / substeps;
  DiscreteDynamicsResult out;
  out.xNext = x;
  out.aMat = Matrix::Identity(n, n);
  out.bMat = Matrix::Zero(n, m);

  Matrix fx(n, n);
  Matrix fu(n, m);
  // Stage derivatives with respect to the start of the current substep.
  Matrix kx[4];
  Matrix ku[4];
  Vector k[4];
  const double c[4] = {0.0, 0.5, 0.5, 1.0};
  for (int step = 0; step < substeps; ++step) {
    const Vector z = out.xNext;
    for (int s = 0; s < 4; ++s) {
      Vector zs = z;
      Matrix zsx = Matrix::Identity(n, n);
      Matrix zsu = Matrix::Zero(n, m);
      if (s > 0) {
        zs += (c[s] * dt) * k[s - 1];
        zsx += (c[s] * dt) * kx[s - 1];
        zsu = (c[s] * dt) * ku[s - 1];
      }
      k[s] = eval(f, zs, u);
      jac(zs, u, fx, fu);
      kx[s] = fx * zsx;
      ku[s] = fx * zsu + fu;
    }
    const Matrix stepX =
        Matrix::Identity(n, n) + (dt / 6.0) * (kx[0] + 2.0 * kx[1] + 2.0 * kx[2] + kx[3]);
    const Matrix stepU = (dt / 6.0) * (ku[0] + 2.0 * ku[1] + 2.0 * ku[2] + ku[3]);
    out.xNext = z + (dt / 6.0) * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]);
    out.bMat = stepX * out.bMat + stepU;
    out.aMat = stepX * out.aMat;
  }
  return out;
}

}  // namespace maglev
