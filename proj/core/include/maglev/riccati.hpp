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

// Stage-structured linear-quadratic subproblems with input boxes.
//
//   min  sum_k  1/2 x'Q x + u'S x + 1/2 u'R u + q'x + r'u   +  1/2 x_N'Q_N x_N + q_N'x_N
//   s.t. x_0 = x0,  x_{k+1} = A_k x_k + B_k u_k + c_k,  lower_k <= u_k <= upper_k
//
// solve_qp_riccati handles a fixed working set of inputs held at their
// bounds; solve_box_qp wraps it in a primal active-set loop.

#include <vector>

#include "maglev/types.hpp"

namespace maglev {

struct LqStage {
  Matrix A;
  Matrix B;
  Vector c;
  Matrix Q;
  Matrix S;  // m x n
  Matrix R;
  Vector q;
  Vector r;
};

struct LqData {
  std::vector<LqStage> stages;
  Matrix QN;
  Vector qN;
  Vector x0;

  [[nodiscard]] int horizon() const { return static_cast<int>(stages.size()); }
};

struct BoxBounds {
  std::vector<Vector> lower;
  std::vector<Vector> upper;
};

enum class BoundStatus : unsigned char { inactive, lower, upper };

/// Per-stage, per-input bound status.
using ActiveSet = std::vector<std::vector<BoundStatus>>;

struct QpSolution {
  std::vector<Vector> dx;      // N + 1
  std::vector<Vector> du;      // N
  std::vector<Vector> lambda;  // costates of x_0 .. x_N
  /// Bound multipliers, mu = -(R u + S x + r + B' lambda_{k+1}). Positive
  /// entries belong to upper bounds, negative entries to lower bounds.
  std::vector<Vector> mu;
  ActiveSet active;
  bool regularized = false;
  int activeSetIterations = 0;
};

/// Equality-constrained solve with the inputs listed in `active` fixed to the
/// corresponding bound. `bounds` may be empty when nothing is active.
QpSolution solve_qp_riccati(const LqData& data, const BoxBounds& bounds, const ActiveSet& active);

struct BoxQpOptions {
  int maxIterations = 0;     // 0 selects 10 * N * m + 50
  double dualTolerance = 1e-9;  // relative to the largest multiplier
};

/// Primal active-set method starting from u = 0, which must satisfy the
/// bounds. `hint` seeds the working set where 0 sits exactly on a bound.
QpSolution solve_box_qp(const LqData& data, const BoxBounds& bounds, const ActiveSet& hint = {},
                        const BoxQpOptions& options = {});

double qp_objective(const LqData& data, const std::vector<Vector>& dx, const std::vector<Vector>& du);

ActiveSet empty_active_set(const LqData& data);

}  // namespace maglev
