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

// Vertical dynamics of one electromagnetic-suspension levitation unit.
//
// Sign convention (used everywhere in this library): the vertical axis z
// points from the guideway towards the vehicle, i.e. downwards. Gravity is
// therefore +g, the attractive magnet force acts in -z, and the air gap is
// s = z1 - d_gw. A downward pull on the magnet opens the gap.
//
// The two-mass equations of motion are used verbatim in absolute
// coordinates, with the suspension spring acting on z1 - z2:
//
//   m1 a1 = m1 g - ck (z1 - z2) - cd (v1 - v2) - F_mag
//   m2 a2 = m2 g + ck (z1 - z2) + cd (v1 - v2)
//
// At rest the spring carries the car body, so z1 - z2 = -m2 g / ck. That
// static deflection is Equilibrium::dz2Nom. The controller coordinates are
// deviations from the equilibrium: ds = s - sNom, dz2 is the car-body
// displacement from its nominal position relative to the guideway, and
// di = I - iNom. Velocities are absolute.

#include <memory>
#include <optional>

#include "maglev/types.hpp"

namespace maglev {

class MagnetTable;

struct MechanicalParams {
  double m1 = 500.0;            // half magnet + quarter chassis [kg]
  double m2 = 3000.0;           // partial car-body mass [kg]
  double ck = 118435.2528;      // suspension stiffness [N/m]
  double cd = 7539.822369;      // suspension damping [N s/m]
  double g = 9.81;              // [m/s^2]
  double fL = 29430.0;          // static load of the single-mass model [N]

  void validate() const;
};

enum class MagnetBackend { analytic, table };

struct MagnetParams {
  double km = 0.0054936;        // force constant, F = km (i/s)^2 [N m^2/A^2]
  double rc = 1.0;              // coil resistance [Ohm]
  double sNom = 0.010;          // nominal air gap [m]
  double uMax = 300.0;          // symmetric input bound on the voltage deviation [V]
  MagnetBackend backend = MagnetBackend::analytic;
  std::shared_ptr<const MagnetTable> table;  // required when backend == table

  void validate() const;
};

struct ModelParams {
  MechanicalParams mech;
  MagnetParams magnet;

  void validate() const {
    mech.validate();
    magnet.validate();
  }
};

enum class ModelKind { singleMass, twoMass };

/// Absolute plant state.
struct PlantState {
  double z1 = 0.0;       // magnet position [m]
  double z2 = 0.0;       // car-body position [m]
  double v1 = 0.0;       // [m/s]
  double v2 = 0.0;       // [m/s]
  double current = 0.0;  // [A]
};

/// Deviation state fed to the predictive controller.
struct ControllerState {
  double ds = 0.0;
  double dz2 = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  double di = 0.0;

  [[nodiscard]] Vector to_vector() const;
  static ControllerState from_vector(const Vector& x);
};

struct OutputVector {
  double s = 0.0;        // air gap [m]
  double dz2 = 0.0;      // car-body displacement [m]
  double a1 = 0.0;       // magnet acceleration [m/s^2]
  double a2 = 0.0;       // car-body acceleration [m/s^2]
  double current = 0.0;  // [A]

  [[nodiscard]] Vector to_vector() const;
};

struct Equilibrium {
  double iNom = 0.0;    // [A]
  double uNom = 0.0;    // [V]
  double dz2Nom = 0.0;  // static suspension deflection z1 - z2 at rest [m]
};

struct Accelerations {
  double a1 = 0.0;
  double a2 = 0.0;
};

// Electromagnet.

double magnet_force(double s, double i, const MagnetParams& p);

/// dI/dt = alpha(s, sDot, I) + beta(s, I) u.
double current_derivative(double s, double sDot, double i, double u, const MagnetParams& p);

/// Partial derivatives of magnet_force: {dF/ds, dF/di}.
struct ForceGradient {
  double ds = 0.0;
  double di = 0.0;
};
ForceGradient magnet_force_gradient(double s, double i, const MagnetParams& p);

// Mechanics.

Accelerations two_mass_accelerations(const PlantState& st, double fMag, const MechanicalParams& p);
double single_mass_acceleration(const PlantState& st, double fMag, const MechanicalParams& p);

// Controller model, two-mass variant.

ControllerState state_derivative(const ControllerState& x, double u, const Equilibrium& eq,
                                 const ModelParams& params);
OutputVector output_map(const ControllerState& x, const Equilibrium& eq, const ModelParams& params);

/// Levitation equilibrium of the chosen model. Bisection on the current,
/// polished by Newton iterations.
Equilibrium solve_equilibrium(const ModelParams& params, ModelKind kind = ModelKind::twoMass);

/// Vector-valued deviation model used by the NMPC. The two-mass model has
/// x = [ds dz2 v1 v2 di], y = [s dz2 a1 a2 I]; the single-mass model keeps
/// x = [ds v1 di], y = [s a1 I].
class ControlModel {
 public:
  ControlModel(ModelKind kind, ModelParams params, Equilibrium eq);

  [[nodiscard]] ModelKind kind() const { return kind_; }
  [[nodiscard]] int state_dim() const { return kind_ == ModelKind::twoMass ? 5 : 3; }
  [[nodiscard]] int output_dim() const { return state_dim(); }
  [[nodiscard]] const Equilibrium& equilibrium() const { return eq_; }
  [[nodiscard]] const ModelParams& params() const { return params_; }

  [[nodiscard]] Vector derivative(const Vector& x, const Vector& u) const;
  [[nodiscard]] Vector output(const Vector& x) const;
  [[nodiscard]] Vector output_reference() const;

  // Analytic Jacobians.
  [[nodiscard]] Matrix state_jacobian(const Vector& x, const Vector& u) const;
  [[nodiscard]] Matrix input_jacobian(const Vector& x, const Vector& u) const;
  [[nodiscard]] Matrix output_jacobian(const Vector& x) const;

  /// Projects a full deviation state onto this model's coordinates.
  [[nodiscard]] Vector reduce(const ControllerState& x) const;

 private:
  ModelKind kind_;
  ModelParams params_;
  Equilibrium eq_;
};

/// Deviation coordinates of an absolute plant state relative to the guideway.
ControllerState to_controller_state(const PlantState& st, double dgw, const Equilibrium& eq,
                                    const ModelParams& params);

/// Absolute plant state at rest for a given guideway deflection.
PlantState equilibrium_plant_state(const Equilibrium& eq, const ModelParams& params, double dgw);

}  // namespace maglev
