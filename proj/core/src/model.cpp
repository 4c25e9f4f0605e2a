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

#include "maglev/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "maglev/errors.hpp"
#include "maglev/magnet_table.hpp"

namespace maglev {
namespace {

void require(bool ok, const char* what) {
  if (!ok) {
    throw ConfigError(what);
  }
}

void require_gap(double s, const char* where) {
  if (!(s > 0.0)) {
    std::ostringstream msg;
    msg << where << ": air gap must be positive, got " << s;
    throw DomainError(msg.str());
  }
}

const MagnetTable& table_of(const MagnetParams& p) {
  if (!p.table) {
    throw ConfigError("magnet backend 'table' selected but no table loaded");
  }
  return *p.table;
}

double load_force(const MechanicalParams& mech, ModelKind kind) {
  return kind == ModelKind::twoMass ? (mech.m1 + mech.m2) * mech.g : mech.m1 * mech.g + mech.fL;
}

}  // namespace

void MechanicalParams::validate() const {
  require(m1 > 0.0, "plant.m1 must be > 0");
  require(m2 > 0.0, "plant.m2 must be > 0");
  require(ck > 0.0, "plant.ck must be > 0");
  require(cd >= 0.0, "plant.cd must be >= 0");
  require(g > 0.0, "plant.g must be > 0");
  require(fL >= 0.0, "plant.fL must be >= 0");
}

void MagnetParams::validate() const {
  require(km > 0.0, "magnet.km must be > 0");
  require(rc > 0.0, "magnet.rc must be > 0");
  require(sNom > 0.0, "magnet.s_nom must be > 0");
  require(uMax > 0.0, "magnet.u_max must be > 0");
  if (backend == MagnetBackend::table) {
    require(table != nullptr, "magnet.backend = table requires magnet.table");
  }
}

Vector ControllerState::to_vector() const {
  Vector v(5);
  v << ds, dz2, v1, v2, di;
  return v;
}

ControllerState ControllerState::from_vector(const Vector& x) {
  return {x(0), x(1), x(2), x(3), x(4)};
}

Vector OutputVector::to_vector() const {
  Vector v(5);
  v << s, dz2, a1, a2, current;
  return v;
}

double magnet_force(double s, double i, const MagnetParams& p) {
  require_gap(s, "magnet_force");
  if (p.backend == MagnetBackend::table) {
    return table_of(p).force(s, i);
  }
  const double ratio = i / s;
  return p.km * ratio * ratio;
}

double current_derivative(double s, double sDot, double i, double u, const MagnetParams& p) {
  require_gap(s, "current_derivative");
  if (p.backend == MagnetBackend::table) {
    const auto& t = table_of(p);
    return t.alpha(s, sDot, i) + t.beta(s, i) * u;
  }
  // Inductance L(s) = 2 km / s; flux balance d(L I)/dt = u - rc I.
  return (s / (2.0 * p.km)) * (u - p.rc * i) + i * sDot / s;
}

ForceGradient magnet_force_gradient(double s, double i, const MagnetParams& p) {
  require_gap(s, "magnet_force_gradient");
  if (p.backend == MagnetBackend::table) {
    const auto& t = table_of(p);
    return {t.force_ds(s, i), t.force_di(s, i)};
  }
  return {-2.0 * p.km * i * i / (s * s * s), 2.0 * p.km * i / (s * s)};
}

Accelerations two_mass_accelerations(const PlantState& st, double fMag, const MechanicalParams& p) {
  const double suspension = p.ck * (st.z1 - st.z2) + p.cd * (st.v1 - st.v2);
  return {p.g - (suspension + fMag) / p.m1, p.g + suspension / p.m2};
}

double single_mass_acceleration(const PlantState& /*st*/, double fMag, const MechanicalParams& p) {
  return p.g + p.fL / p.m1 - fMag / p.m1;
}

ControllerState state_derivative(const ControllerState& x, double u, const Equilibrium& eq,
                                 const ModelParams& params) {
  const auto& mag = params.magnet;
  const double s = mag.sNom + x.ds;
  const double i = eq.iNom + x.di;
  const double fMag = magnet_force(s, i, mag);
  // Any absolute pair with z1 - z2 = ds - dz2 + dz2Nom gives the same forces.
  const PlantState rel{x.ds + eq.dz2Nom, x.dz2, x.v1, x.v2, i};
  const auto acc = two_mass_accelerations(rel, fMag, params.mech);
  // The guideway is frozen over the prediction, so sDot = v1.
  const double iDot = current_derivative(s, x.v1, i, eq.uNom + u, mag);
  return {x.v1, x.v2, acc.a1, acc.a2, iDot};
}

OutputVector output_map(const ControllerState& x, const Equilibrium& eq, const ModelParams& params) {
  const auto dx = state_derivative(x, 0.0, eq, params);
  return {params.magnet.sNom + x.ds, x.dz2, dx.v1, dx.v2, eq.iNom + x.di};
}

Equilibrium solve_equilibrium(const ModelParams& params, ModelKind kind) {
  params.validate();
  const auto& mag = params.magnet;
  const double target = load_force(params.mech, kind);
  const double s = mag.sNom;
  auto residual = [&](double i) { return magnet_force(s, i, mag) - target; };

  double lo = 0.0;
  double hi = 0.0;
  if (mag.backend == MagnetBackend::table) {
    const auto grid = table_of(mag).i_grid();
    lo = std::max(0.0, grid.front());
    hi = grid.back();
  } else {
    hi = 1.0;
    for (int k = 0; k < 200 && residual(hi) < 0.0; ++k) {
      hi *= 2.0;
    }
  }
  if (!(residual(lo) <= 0.0 && residual(hi) >= 0.0)) {
    std::ostringstream msg;
    msg << "no levitation equilibrium: magnet force does not bracket the load of " << target
        << " N on current interval [" << lo << ", " << hi << "] A";
    throw InfeasibleParameters(msg.str());
  }

  for (int k = 0; k < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++k) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  double i = 0.5 * (lo + hi);
  for (int k = 0; k < 8; ++k) {
    const double r = residual(i);
    const double slope = magnet_force_gradient(s, i, mag).di;
    if (r == 0.0 || !(slope > 0.0)) {
      break;
    }
    const double next = i - r / slope;
    if (!(next >= lo && next <= hi)) {
      break;
    }
    i = next;
  }
  if (std::abs(residual(i)) > 1e-9 * target) {
    throw InfeasibleParameters("equilibrium current did not converge");
  }

  Equilibrium eq;
  eq.iNom = i;
  if (mag.backend == MagnetBackend::analytic) {
    eq.uNom = mag.rc * i;
  } else {
    const double alpha = current_derivative(s, 0.0, i, 0.0, mag);
    const double beta = current_derivative(s, 0.0, i, 1.0, mag) - alpha;
    eq.uNom = -alpha / beta;
  }
  eq.dz2Nom = -params.mech.m2 * params.mech.g / params.mech.ck;
  return eq;
}

ControlModel::ControlModel(ModelKind kind, ModelParams params, Equilibrium eq)
    : kind_(kind), params_(std::move(params)), eq_(eq) {
  params_.validate();
}

Vector ControlModel::derivative(const Vector& x, const Vector& u) const {
  if (kind_ == ModelKind::twoMass) {
    return state_derivative(ControllerState::from_vector(x), u(0), eq_, params_).to_vector();
  }
  const auto& mag = params_.magnet;
  const double s = mag.sNom + x(0);
  const double i = eq_.iNom + x(2);
  const double a1 = single_mass_acceleration({}, magnet_force(s, i, mag), params_.mech);
  Vector dx(3);
  dx << x(1), a1, current_derivative(s, x(1), i, eq_.uNom + u(0), mag);
  return dx;
}

Vector ControlModel::output(const Vector& x) const {
  const Vector dx = derivative(x, Vector::Zero(1));
  const double s = params_.magnet.sNom + x(0);
  if (kind_ == ModelKind::twoMass) {
    Vector y(5);
    y << s, x(1), dx(2), dx(3), eq_.iNom + x(4);
    return y;
  }
  Vector y(3);
  y << s, dx(1), eq_.iNom + x(2);
  return y;
}

Vector ControlModel::output_reference() const {
  const double sNom = params_.magnet.sNom;
  if (kind_ == ModelKind::twoMass) {
    Vector y(5);
    y << sNom, 0.0, 0.0, 0.0, eq_.iNom;
    return y;
  }
  Vector y(3);
  y << sNom, 0.0, eq_.iNom;
  return y;
}

Matrix ControlModel::state_jacobian(const Vector& x, const Vector& u) const {
  const int n = state_dim();
  Matrix a = Matrix::Zero(n, n);
  if (params_.magnet.backend == MagnetBackend::table) {
    // Interpolated tables are only piecewise smooth; central differences.
    for (int j = 0; j < n; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x(j)));
      Vector xp = x;
      Vector xm = x;
      xp(j) += h;
      xm(j) -= h;
      a.col(j) = (derivative(xp, u) - derivative(xm, u)) / (2.0 * h);
    }
    return a;
  }
  const auto& mech = params_.mech;
  const auto& mag = params_.magnet;
  const bool two = kind_ == ModelKind::twoMass;
  const int iDs = 0;
  const int iV1 = two ? 2 : 1;
  const int iDi = two ? 4 : 2;
  const double s = mag.sNom + x(iDs);
  const double i = eq_.iNom + x(iDi);
  const double sDot = x(iV1);
  const double volts = eq_.uNom + u(0);
  const auto grad = magnet_force_gradient(s, i, mag);

  // Current equation of the analytic magnet.
  const double dIds = (volts - mag.rc * i) / (2.0 * mag.km) - i * sDot / (s * s);
  const double dIdsDot = i / s;
  const double dIdi = -mag.rc * s / (2.0 * mag.km) + sDot / s;

  if (two) {
    a(0, 2) = 1.0;
    a(1, 3) = 1.0;
    a(2, 0) = -(mech.ck + grad.ds) / mech.m1;
    a(2, 1) = mech.ck / mech.m1;
    a(2, 2) = -mech.cd / mech.m1;
    a(2, 3) = mech.cd / mech.m1;
    a(2, 4) = -grad.di / mech.m1;
    a(3, 0) = mech.ck / mech.m2;
    a(3, 1) = -mech.ck / mech.m2;
    a(3, 2) = mech.cd / mech.m2;
    a(3, 3) = -mech.cd / mech.m2;
    a(4, 0) = dIds;
    a(4, 2) = dIdsDot;
    a(4, 4) = dIdi;
  } else {
    a(0, 1) = 1.0;
    a(1, 0) = -grad.ds / mech.m1;
    a(1, 2) = -grad.di / mech.m1;
    a(2, 0) = dIds;
    a(2, 1) = dIdsDot;
    a(2, 2) = dIdi;
  }
  return a;
}

Matrix ControlModel::input_jacobian(const Vector& x, const Vector& u) const {
  const int n = state_dim();
  const int iDs = 0;
  const int iDi = n - 1;
  const auto& mag = params_.magnet;
  const double s = mag.sNom + x(iDs);
  const double i = eq_.iNom + x(iDi);
  Matrix b = Matrix::Zero(n, 1);
  const double sDot = x(kind_ == ModelKind::twoMass ? 2 : 1);
  // The current equation is affine in u for both backends.
  b(n - 1, 0) = current_derivative(s, sDot, i, eq_.uNom + u(0) + 1.0, mag) -
                current_derivative(s, sDot, i, eq_.uNom + u(0), mag);
  if (mag.backend == MagnetBackend::analytic) {
    b(n - 1, 0) = s / (2.0 * mag.km);
  }
  return b;
}

Matrix ControlModel::output_jacobian(const Vector& x) const {
  const int n = state_dim();
  const Matrix a = state_jacobian(x, Vector::Zero(1));
  Matrix c = Matrix::Zero(n, n);
  c(0, 0) = 1.0;
  c(n - 1, n - 1) = 1.0;
  if (kind_ == ModelKind::twoMass) {
    c(1, 1) = 1.0;
    c.row(2) = a.row(2);
    c.row(3) = a.row(3);
  } else {
    c.row(1) = a.row(1);
  }
  return c;
}

Vector ControlModel::reduce(const ControllerState& x) const {
  if (kind_ == ModelKind::twoMass) {
    return x.to_vector();
  }
  Vector v(3);
  v << x.ds, x.v1, x.di;
  return v;
}

ControllerState to_controller_state(const PlantState& st, double dgw, const Equilibrium& eq,
                                    const ModelParams& params) {
  const double sNom = params.magnet.sNom;
  ControllerState x;
  x.ds = st.z1 - dgw - sNom;
  x.dz2 = (st.z2 - dgw) - (sNom - eq.dz2Nom);
  x.v1 = st.v1;
  x.v2 = st.v2;
  x.di = st.current - eq.iNom;
  return x;
}

PlantState equilibrium_plant_state(const Equilibrium& eq, const ModelParams& params, double dgw) {
  PlantState st;
  st.z1 = params.magnet.sNom + dgw;
  st.z2 = st.z1 - eq.dz2Nom;
  st.current = eq.iNom;
  return st;
}

}  // namespace maglev
