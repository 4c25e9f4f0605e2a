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

#include "maglev/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "maglev/errors.hpp"

namespace maglev {

void ControllerConfig::validate() const {
  auto fail = [&](const std::string& what) {
    throw ConfigError("controller '" + name + "': " + what);
  };
  if (nIntervals < 1) {
    fail("n_intervals must be >= 1");
  }
  if (!(horizon > 0.0) || !(samplingTime > 0.0)) {
    fail("horizon and sampling_time must be positive");
  }
  const double step = horizon / nIntervals;
  if (std::abs(step - samplingTime) > 1e-9 * samplingTime) {
    fail("horizon / n_intervals must equal sampling_time");
  }
  const std::size_t expected = model == ModelKind::twoMass ? 5 : 3;
  if (qWeights.size() != expected) {
    std::ostringstream msg;
    msg << "expected " << expected << " output weights for the "
        << (model == ModelKind::twoMass ? "two-mass" : "single-mass") << " model, got "
        << qWeights.size();
    fail(msg.str());
  }
  bool anyPositive = false;
  for (double q : qWeights) {
    if (!(q >= 0.0)) {
      fail("output weights must be >= 0");
    }
    anyPositive = anyPositive || q > 0.0;
  }
  if (!anyPositive) {
    fail("at least one output weight must be positive");
  }
  if (!(rWeight > 0.0)) {
    fail("r must be > 0");
  }
  if (maxIterations < 1) {
    fail("max_iterations must be >= 1");
  }
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"C1M", "C2M", "C2ML"};
  return names;
}

ControllerConfig preset_controller(std::string_view name) {
  ControllerConfig cfg;
  cfg.name = std::string(name);
  if (name == "C1M") {
    cfg.model = ModelKind::singleMass;
    cfg.qWeights = {1e2, 1.0, 1e5};
  } else if (name == "C2M") {
    cfg.model = ModelKind::twoMass;
  } else if (name == "C2ML") {
    cfg.model = ModelKind::twoMass;
    cfg.horizon = 0.5;
    cfg.nIntervals = 500;
  } else {
    std::string valid;
    for (const auto& n : preset_names()) {
      valid += (valid.empty() ? "" : ", ") + n;
    }
    throw ConfigError("unknown controller '" + std::string(name) + "' (valid: " + valid + ")");
  }
  return cfg;
}

Controller::Controller(ControllerConfig cfg, const ModelParams& params, const Equilibrium& plantEq)
    : cfg_(std::move(cfg)), plantEq_(plantEq) {
  cfg_.validate();
  params.validate();
  const Equilibrium ownEq =
      cfg_.model == ModelKind::twoMass ? plantEq : solve_equilibrium(params, cfg_.model);
  model_ = std::make_shared<const ControlModel>(cfg_.model, params, ownEq);

  const int n = model_->state_dim();
  const double uMax = params.magnet.uMax;
  OcpProblem& p = problem_;
  p.n = n;
  p.m = 1;
  p.nIntervals = cfg_.nIntervals;
  p.stepLen = cfg_.horizon / cfg_.nIntervals;
  p.qWeights = Eigen::Map<const Eigen::VectorXd>(cfg_.qWeights.data(),
                                                 static_cast<Eigen::Index>(cfg_.qWeights.size()));
  p.rWeights = Vector::Constant(1, cfg_.rWeight);
  p.yRef = model_->output_reference();
  p.uRef = Vector::Zero(1);
  p.uLower = Vector::Constant(1, -uMax);
  p.uUpper = Vector::Constant(1, uMax);
  p.initialState = Vector::Zero(n);

  auto model = model_;
  if (cfg_.prediction == PredictionModel::nonlinear) {
    p.dynamics = [model](const Vector& x, const Vector& u) { return model->derivative(x, u); };
    p.dynamicsJacobian = [model](const Vector& x, const Vector& u, Matrix& fx, Matrix& fu) {
      fx = model->state_jacobian(x, u);
      fu = model->input_jacobian(x, u);
    };
    p.output = [model](const Vector& x) { return model->output(x); };
    p.outputJacobian = [model](const Vector& x) { return model->output_jacobian(x); };
  } else {
    const Vector x0 = Vector::Zero(n);
    const Vector u0 = Vector::Zero(1);
    const Matrix A = model->state_jacobian(x0, u0);
    const Matrix B = model->input_jacobian(x0, u0);
    const Matrix C = model->output_jacobian(x0);
    const Vector y0 = model->output(x0);
    p.dynamics = [A, B](const Vector& x, const Vector& u) -> Vector { return A * x + B * u; };
    p.dynamicsJacobian = [A, B](const Vector&, const Vector&, Matrix& fx, Matrix& fu) {
      fx = A;
      fu = B;
    };
    p.output = [C, y0](const Vector& x) -> Vector { return y0 + C * x; };
    p.outputJacobian = [C](const Vector&) { return C; };
  }
  p.validate();
  warm_ = ShootingTrajectory::constant(Vector::Zero(n), p.uRef, p.nIntervals);
}

Vector Controller::measurement(const ControllerState& x) const {
  ControllerState own = x;
  // Re-reference the current when the controller model has its own nominal point.
  own.di += plantEq_.iNom - model_->equilibrium().iNom;
  return model_->reduce(own);
}

ControlOutput Controller::step(const ControllerState& x) {
  const Vector xv = x.to_vector();
  for (Eigen::Index j = 0; j < xv.size(); ++j) {
    if (!std::isfinite(xv(j))) {
      throw DomainError("control_step: non-finite measurement");
    }
  }
  if (!(model_->params().magnet.sNom + x.ds > 0.0)) {
    throw DomainError("control_step: measured air gap is not positive");
  }
  problem_.initialState = measurement(x);

  SqpOptions opts;
  opts.maxIterations = cfg_.maxIterations;
  opts.kktTolerance = cfg_.kktTolerance;
  opts.defectTolerance = cfg_.defectTolerance;
  opts.realTimeIteration = cfg_.mode == IterationMode::realTimeIteration;
  opts.trace = trace_;
  // The shifted tail of the warm start can leave the model domain; such
  // steps restart from the measured state held at rest.
  const auto cold = [&] {
    return solve_sqp(problem_, ShootingTrajectory::constant(problem_.initialState, problem_.uRef, cfg_.nIntervals),
                     opts);
  };
  SqpResult res;
  try {
    res = solve_sqp(problem_, warm_, opts, active_);
  } catch (const DomainError&) {
    res = cold();
  } catch (const IntegrationError&) {
    res = cold();
  }

  ControlOutput out;
  out.u = std::clamp(res.trajectory.inputs[0](0), problem_.uLower(0), problem_.uUpper(0));
  out.voltage = model_->equilibrium().uNom + out.u;
  out.stats = res.stats;
  lastStats_ = res.stats;

  warm_ = shift_warm_start(res.trajectory);
  active_ = std::move(res.active);
  if (active_.size() > 1) {
    std::rotate(active_.begin(), active_.begin() + 1, active_.end());
    active_.back() = active_[active_.size() - 2];
  }
  return out;
}

Controller build_controller(const ControllerConfig& cfg, const Equilibrium& plantEq,
                            const ModelParams& params) {
  return Controller(cfg, params, plantEq);
}

ShootingTrajectory shift_warm_start(const ShootingTrajectory& traj) {
  ShootingTrajectory out = traj;
  if (out.states.size() > 1) {
    std::rotate(out.states.begin(), out.states.begin() + 1, out.states.end());
    out.states.back() = out.states[out.states.size() - 2];
  }
  if (out.inputs.size() > 1) {
    std::rotate(out.inputs.begin(), out.inputs.begin() + 1, out.inputs.end());
    out.inputs.back() = out.inputs[out.inputs.size() - 2];
  }
  return out;
}

}  // namespace maglev
