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


#include <benchmark/benchmark.h>

#include <random>

#include "maglev/controller.hpp"
#include "maglev/model.hpp"
#include "maglev/riccati.hpp"
#include "support/dense_kkt.hpp"

namespace {

using namespace maglev;

void BM_RiccatiSolve(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const LqData d = testing::random_lq(rng, static_cast<int>(state.range(0)), 5, 1);
  const BoxBounds b = testing::random_bounds(rng, d, 0.5, 1.0);
  const ActiveSet act = empty_active_set(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_qp_riccati(d, b, act));
  }
}
BENCHMARK(BM_RiccatiSolve)->Arg(20)->Arg(50)->Arg(100);

void BM_ControlStep(benchmark::State& state, const char* preset) {
  const ModelParams p;
  const Equilibrium eq = solve_equilibrium(p);
  Controller c(preset_controller(preset), p, eq);
  ControllerState x;
  double phase = 0.0;
  for (auto _ : state) {
    x.ds = 1e-4 * std::sin(phase);
    x.dz2 = 1e-4 * std::cos(phase);
    phase += 0.03;
    benchmark::DoNotOptimize(c.step(x));
  }
}
BENCHMARK_CAPTURE(BM_ControlStep, C1M, "C1M")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ControlStep, C2M, "C2M")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ControlStep, C2ML, "C2ML")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
