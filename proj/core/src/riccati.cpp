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

#include "maglev/riccati.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "maglev/errors.hpp"

namespace maglev {
namespace {

// Stage with the fixed inputs substituted; `free` lists the remaining inputs.
struct ReducedStage {
  bool reduced = false;  // false: every input is free and the stage is used as is
  std::vector<int> free;
  Vector fixed;  // full-length input vector, zero on free entries
  Matrix B;
  Vector c;
  Matrix R;
  Matrix S;
  Vector q;
  Vector r;
};

ReducedStage reduce(const LqStage& st, const BoxBounds& bounds, const std::vector<BoundStatus>* status,
                    int k) {
  const auto m = st.B.cols();
  ReducedStage out;
  out.fixed = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    const BoundStatus b = status ? (*status)[i] : BoundStatus::inactive;
    if (b == BoundStatus::inactive) {
      out.free.push_back(i);
    } else {
      out.fixed(i) = b == BoundStatus::lower ? bounds.lower[k](i) : bounds.upper[k](i);
    }
  }
  if (static_cast<Eigen::Index>(out.free.size()) == m) {
    return out;
  }
  out.reduced = true;
  const auto nf = static_cast<Eigen::Index>(out.free.size());
  const auto n = st.A.cols();
  out.B.resize(st.A.rows(), nf);
  out.R.resize(nf, nf);
  out.S.resize(nf, n);
  out.r.resize(nf);
  const Vector ruFixed = st.R * out.fixed;
  for (Eigen::Index a = 0; a < nf; ++a) {
    const int ia = out.free[a];
    out.B.col(a) = st.B.col(ia);
    out.S.row(a) = st.S.row(ia);
    out.r(a) = st.r(ia) + ruFixed(ia);
    for (Eigen::Index b = 0; b < nf; ++b) {
      out.R(a, b) = st.R(ia, out.free[b]);
    }
  }
  out.c = st.c + st.B * out.fixed;
  out.q = st.q + st.S.transpose() * out.fixed;
  return out;
}

void symmetrize(Matrix& P) {
  P = (0.5 * (P + P.transpose())).eval();
}

}  // namespace

ActiveSet empty_active_set(const LqData& data) {
  ActiveSet set(data.stages.size());
  for (std::size_t k = 0; k < data.stages.size(); ++k) {
    set[k].assign(static_cast<std::size_t>(data.stages[k].B.cols()), BoundStatus::inactive);
  }
  return set;
}

QpSolution solve_qp_riccati(const LqData& data, const BoxBounds& bounds, const ActiveSet& active) {
  const int N = data.horizon();
  const auto n = data.x0.size();
  std::vector<ReducedStage> red;
  red.reserve(N);
  for (int k = 0; k < N; ++k) {
    const auto* status = active.empty() ? nullptr : &active[k];
    red.push_back(reduce(data.stages[k], bounds, status, k));
  }

  std::vector<Matrix> P(N + 1);
  std::vector<Vector> p(N + 1);
  std::vector<Matrix> K(N);
  std::vector<Vector> kff(N);
  P[N] = data.QN.size() ? data.QN : Matrix::Zero(n, n);
  p[N] = data.qN.size() ? data.qN : Vector::Zero(n);

  QpSolution sol;
  for (int k = N - 1; k >= 0; --k) {
    const LqStage& st = data.stages[k];
    const ReducedStage& rs = red[k];
    const Matrix& B = rs.reduced ? rs.B : st.B;
    const Vector& c = rs.reduced ? rs.c : st.c;
    const Vector pNext = P[k + 1] * c + p[k + 1];
    const Matrix PA = P[k + 1] * st.A;
    P[k] = st.Q + st.A.transpose() * PA;
    p[k] = (rs.reduced ? rs.q : st.q) + st.A.transpose() * pNext;
    if (!rs.free.empty()) {
      const Matrix PB = P[k + 1] * B;
      Matrix Ruu = (rs.reduced ? rs.R : st.R) + B.transpose() * PB;
      const Matrix Rux = (rs.reduced ? rs.S : st.S) + B.transpose() * PA;
      const Vector ru = (rs.reduced ? rs.r : st.r) + B.transpose() * pNext;
      Eigen::LLT<Matrix> llt(Ruu);
      double reg = 1e-8;
      while (llt.info() != Eigen::Success) {
        if (reg > 1e8) {
          throw std::runtime_error("Riccati recursion: stage Hessian is not positive definite");
        }
        Ruu.diagonal().array() += reg;
        llt.compute(Ruu);
        reg *= 10.0;
        sol.regularized = true;
      }
      K[k] = -llt.solve(Rux);
      kff[k] = -llt.solve(ru);
      P[k] += Rux.transpose() * K[k];
      p[k] += Rux.transpose() * kff[k];
    }
    symmetrize(P[k]);
  }

  sol.dx.resize(N + 1);
  sol.du.resize(N);
  sol.lambda.resize(N + 1);
  sol.mu.resize(N);
  sol.dx[0] = data.x0;
  for (int k = 0; k < N; ++k) {
    const LqStage& st = data.stages[k];
    const ReducedStage& rs = red[k];
    Vector du = rs.fixed;
    if (!rs.reduced) {
      du = K[k] * sol.dx[k] + kff[k];
    } else if (!rs.free.empty()) {
      const Vector duFree = K[k] * sol.dx[k] + kff[k];
      for (std::size_t a = 0; a < rs.free.size(); ++a) {
        du(rs.free[a]) = duFree(static_cast<Eigen::Index>(a));
      }
    }
    sol.du[k] = du;
    sol.dx[k + 1] = st.A * sol.dx[k] + st.B * du + st.c;
  }
  for (int k = 0; k <= N; ++k) {
    sol.lambda[k] = P[k] * sol.dx[k] + p[k];
  }
  for (int k = 0; k < N; ++k) {
    const LqStage& st = data.stages[k];
    Vector mu = -(st.R * sol.du[k] + st.S * sol.dx[k] + st.r + st.B.transpose() * sol.lambda[k + 1]);
    for (int i : red[k].free) {
      mu(i) = 0.0;
    }
    sol.mu[k] = mu;
  }
  sol.active = active.empty() ? empty_active_set(data) : active;
  return sol;
}

QpSolution solve_box_qp(const LqData& data, const BoxBounds& bounds, const ActiveSet& hint,
                        const BoxQpOptions& options) {
  const int N = data.horizon();
  if (static_cast<int>(bounds.lower.size()) != N || static_cast<int>(bounds.upper.size()) != N) {
    throw std::invalid_argument("solve_box_qp: bounds must cover every stage");
  }
  ActiveSet work = empty_active_set(data);
  std::vector<std::vector<bool>> pinned(N);
  std::vector<Vector> du(N);
  int totalInputs = 0;
  for (int k = 0; k < N; ++k) {
    const auto m = data.stages[k].B.cols();
    totalInputs += static_cast<int>(m);
    du[k] = Vector::Zero(m);
    pinned[k].assign(static_cast<std::size_t>(m), false);
    for (int i = 0; i < m; ++i) {
      const double lo = bounds.lower[k](i);
      const double hi = bounds.upper[k](i);
      if (lo > 0.0 || hi < 0.0) {
        throw DomainError("solve_box_qp: starting point u = 0 violates the bounds");
      }
      if (lo == hi) {
        work[k][i] = BoundStatus::lower;
        pinned[k][i] = true;
      } else if (!hint.empty() && k < static_cast<int>(hint.size()) && i < static_cast<int>(hint[k].size())) {
        if (hint[k][i] == BoundStatus::lower && lo == 0.0) {
          work[k][i] = BoundStatus::lower;
        } else if (hint[k][i] == BoundStatus::upper && hi == 0.0) {
          work[k][i] = BoundStatus::upper;
        }
      }
    }
  }

  const int maxIter = options.maxIterations > 0 ? options.maxIterations : 10 * totalInputs + 50;
  for (int iter = 1; iter <= maxIter; ++iter) {
    QpSolution sol = solve_qp_riccati(data, bounds, work);

    // Ratio test along the step towards the equality-constrained minimiser.
    double alpha = 1.0;
    int blockK = -1;
    int blockI = -1;
    BoundStatus blockSide = BoundStatus::inactive;
    for (int k = 0; k < N; ++k) {
      for (int i = 0; i < du[k].size(); ++i) {
        if (work[k][i] != BoundStatus::inactive) {
          continue;
        }
        const double step = sol.du[k](i) - du[k](i);
        const double lo = bounds.lower[k](i);
        const double hi = bounds.upper[k](i);
        const double slack = 1e-14 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
        if (step > 0.0 && sol.du[k](i) > hi + slack) {
          const double a = (hi - du[k](i)) / step;
          if (a < alpha) {
            alpha = a;
            blockK = k;
            blockI = i;
            blockSide = BoundStatus::upper;
          }
        } else if (step < 0.0 && sol.du[k](i) < lo - slack) {
          const double a = (lo - du[k](i)) / step;
          if (a < alpha) {
            alpha = a;
            blockK = k;
            blockI = i;
            blockSide = BoundStatus::lower;
          }
        }
      }
    }

    if (blockK >= 0) {
      alpha = std::max(alpha, 0.0);
      for (int k = 0; k < N; ++k) {
        du[k] += alpha * (sol.du[k] - du[k]);
        du[k] = du[k].cwiseMax(bounds.lower[k]).cwiseMin(bounds.upper[k]);
      }
      du[blockK](blockI) =
          blockSide == BoundStatus::upper ? bounds.upper[blockK](blockI) : bounds.lower[blockK](blockI);
      work[blockK][blockI] = blockSide;
      continue;
    }

    for (int k = 0; k < N; ++k) {
      du[k] = sol.du[k];
    }
    double scale = 1.0;
    for (int k = 0; k < N; ++k) {
      scale = std::max(scale, sol.mu[k].cwiseAbs().maxCoeff());
    }
    double worst = options.dualTolerance * scale;
    int dropK = -1;
    int dropI = -1;
    for (int k = 0; k < N; ++k) {
      for (int i = 0; i < du[k].size(); ++i) {
        if (pinned[k][i] || work[k][i] == BoundStatus::inactive) {
          continue;
        }
        const double wrong = work[k][i] == BoundStatus::upper ? -sol.mu[k](i) : sol.mu[k](i);
        if (wrong > worst) {
          worst = wrong;
          dropK = k;
          dropI = i;
        }
      }
    }
    if (dropK >= 0) {
      work[dropK][dropI] = BoundStatus::inactive;
      continue;
    }

    for (int k = 0; k < N; ++k) {
      for (int i = 0; i < du[k].size(); ++i) {
        if (!pinned[k][i] && work[k][i] != BoundStatus::inactive && sol.mu[k](i) == 0.0) {
          work[k][i] = BoundStatus::inactive;
        }
      }
    }
    sol.active = work;
    sol.activeSetIterations = iter;
    return sol;
  }
  throw std::runtime_error("solve_box_qp: active-set iteration limit reached");
}

double qp_objective(const LqData& data, const std::vector<Vector>& dx, const std::vector<Vector>& du) {
  double J = 0.0;
  for (int k = 0; k < data.horizon(); ++k) {
    const LqStage& st = data.stages[k];
    J += 0.5 * dx[k].dot(st.Q * dx[k]) + du[k].dot(st.S * dx[k]) + 0.5 * du[k].dot(st.R * du[k]) +
         st.q.dot(dx[k]) + st.r.dot(du[k]);
  }
  const auto N = static_cast<std::size_t>(data.horizon());
  if (data.QN.size()) {
    J += 0.5 * dx[N].dot(data.QN * dx[N]);
  }
  if (data.qN.size()) {
    J += data.qN.dot(dx[N]);
  }
  return J;
}

}  // namespace maglev
