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

// Independent references for the structured QP: a dense KKT solve of the
// stage-wise problem and a random instance generator.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "maglev/riccati.hpp"

namespace maglev::testing {

struct DenseSolution {
  std::vector<Eigen::VectorXd> dx;
  std::vector<Eigen::VectorXd> du;
  double objective = 0.0;
};

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = n01(rng);
    }
  }
  return m;
}

/// Random instance with positive definite stage Hessians [Q S'; S R].
inline LqData random_lq(std::mt19937_64& rng, int N, int n, int m) {
  LqData d;
  for (int k = 0; k < N; ++k) {
    LqStage st;
    st.A = random_matrix(rng, n, n) * 0.6;
    st.B = random_matrix(rng, n, m);
    st.c = random_matrix(rng, n, 1);
    const Eigen::MatrixXd g = random_matrix(rng, n + m, n + m);
    const Eigen::MatrixXd h = g.transpose() * g + 0.1 * Eigen::MatrixXd::Identity(n + m, n + m);
    st.Q = h.topLeftCorner(n, n);
    st.S = h.bottomLeftCorner(m, n);
    st.R = h.bottomRightCorner(m, m);
    st.q = random_matrix(rng, n, 1);
    st.r = random_matrix(rng, m, 1);
    d.stages.push_back(st);
  }
  const Eigen::MatrixXd g = random_matrix(rng, n, n);
  d.QN = g.transpose() * g;
  d.qN = random_matrix(rng, n, 1);
  d.x0 = random_matrix(rng, n, 1);
  return d;
}

/// Box [-b, b] per input with b drawn from [lo, hi].
inline BoxBounds random_bounds(std::mt19937_64& rng, const LqData& d, double lo, double hi) {
  std::uniform_real_distribution<double> w(lo, hi);
  BoxBounds b;
  for (const auto& st : d.stages) {
    Vector l(st.B.cols());
    Vector u(st.B.cols());
    for (int i = 0; i < st.B.cols(); ++i) {
      const double half = w(rng);
      l(i) = -half;
      u(i) = half;
    }
    b.lower.push_back(l);
    b.upper.push_back(u);
  }
  return b;
}

/// Dense KKT solve with the inputs flagged in `active` fixed at their bound.
inline DenseSolution dense_solve(const LqData& d, const BoxBounds& bounds, const ActiveSet& active) {
  const int N = d.horizon();
  const int n = static_cast<int>(d.x0.size());
  const int m = static_cast<int>(d.stages.front().B.cols());
  const int nx = (N + 1) * n;
  const int nz = nx + N * m;
  auto xi = [&](int k) { return k * n; };
  auto ui = [&](int k) { return nx + k * m; };

  int nFixed = 0;
  for (const auto& row : active) {
    for (auto s : row) {
      nFixed += s != BoundStatus::inactive ? 1 : 0;
    }
  }
  const int ne = nx + nFixed;

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nz, nz);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nz);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(ne, nz);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(ne);
  for (int k = 0; k < N; ++k) {
    const auto& st = d.stages[k];
    H.block(xi(k), xi(k), n, n) = st.Q;
    H.block(ui(k), ui(k), m, m) = st.R;
    H.block(ui(k), xi(k), m, n) = st.S;
    H.block(xi(k), ui(k), n, m) = st.S.transpose();
    g.segment(xi(k), n) = st.q;
    g.segment(ui(k), m) = st.r;
  }
  H.block(xi(N), xi(N), n, n) = d.QN;
  g.segment(xi(N), n) = d.qN;

  E.block(0, 0, n, n).setIdentity();
  e.head(n) = d.x0;
  for (int k = 0; k < N; ++k) {
    const auto& st = d.stages[k];
    const int row = (k + 1) * n;
    E.block(row, xi(k + 1), n, n) = -Eigen::MatrixXd::Identity(n, n);
    E.block(row, xi(k), n, n) = st.A;
    E.block(row, ui(k), n, m) = st.B;
    e.segment(row, n) = -st.c;
  }
  int row = nx;
  for (int k = 0; k < static_cast<int>(active.size()); ++k) {
    for (int i = 0; i < static_cast<int>(active[k].size()); ++i) {
      if (active[k][i] == BoundStatus::inactive) {
        continue;
      }
      E(row, ui(k) + i) = 1.0;
      e(row) = active[k][i] == BoundStatus::lower ? bounds.lower[k](i) : bounds.upper[k](i);
      ++row;
    }
  }

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nz + ne, nz + ne);
  K.topLeftCorner(nz, nz) = H;
  K.topRightCorner(nz, ne) = E.transpose();
  K.bottomLeftCorner(ne, nz) = E;
  Eigen::VectorXd rhs(nz + ne);
  rhs << -g, e;
  const Eigen::VectorXd z = K.fullPivLu().solve(rhs).head(nz);

  DenseSolution s;
  for (int k = 0; k <= N; ++k) {
    s.dx.push_back(z.segment(xi(k), n));
  }
  for (int k = 0; k < N; ++k) {
    s.du.push_back(z.segment(ui(k), m));
  }
  s.objective = 0.5 * z.dot(H * z) + g.dot(z);
  return s;
}

/// Global box-QP optimum by enumerating every working set (small N * m only).
inline DenseSolution brute_force_box_qp(const LqData& d, const BoxBounds& bounds) {
  const int N = d.horizon();
  const int m = static_cast<int>(d.stages.front().B.cols());
  const int slots = N * m;
  int combos = 1;
  for (int i = 0; i < slots; ++i) {
    combos *= 3;
  }
  DenseSolution best;
  bool found = false;
  for (int code = 0; code < combos; ++code) {
    ActiveSet act(N, std::vector<BoundStatus>(m, BoundStatus::inactive));
    int c = code;
    for (int s = 0; s < slots; ++s) {
      act[s / m][s % m] = static_cast<BoundStatus>(c % 3);
      c /= 3;
    }
    const DenseSolution cand = dense_solve(d, bounds, act);
    bool feasible = true;
    for (int k = 0; k < N && feasible; ++k) {
      for (int i = 0; i < m; ++i) {
        const double v = cand.du[k](i);
        if (v < bounds.lower[k](i) - 1e-10 || v > bounds.upper[k](i) + 1e-10) {
          feasible = false;
          break;
        }
      }
    }
    if (feasible && (!found || cand.objective < best.objective)) {
      best = cand;
      found = true;
    }
  }
  return best;
}

}  // namespace maglev::testing
