/*
 * Copyright 2026 The assim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "assim/adjoint.hpp"
#include "assim/experiment_config.hpp"
#include "assim/experiments.hpp"
#include "assim/roughpath.hpp"

#include <benchmark/benchmark.h>

namespace {

assim::ExperimentConfig twin(int n_steps) {
  return assim::parse_config({{"model", {{"name", "lorenz63"}}},
                              {"grid", {{"T", 2.0}, {"n_steps", n_steps}}},
                              {"truth", {{"initial_state", {1.0, 1.0, -18.0}}, {"spinup_time", 2.0}}},
                              {"observation", {{"h", {0}}, {"seed", 3}}}});
}

void BM_PVariation(benchmark::State &state) {
  const int n = static_cast<int>(state.range(0));
  const auto w = assim::sample_wiener(assim::TimeGrid(1.0, n), 1, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assim::p_variation(w, 2.5));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_PVariation)->RangeMultiplier(2)->Range(256, 4096)->Complexity(benchmark::oNSquared);

void BM_IntegrateState(benchmark::State &state) {
  const auto cfg = twin(static_cast<int>(state.range(0)));
  const auto model = assim::build_model(cfg);
  const auto u = assim::ControlPath::zeros(cfg.grid(), 3);
  const Eigen::VectorXd xi = assim::truth_initial_state(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assim::integrate_state(model, u, xi));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_IntegrateState)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oN);

void BM_SolveCostate(benchmark::State &state) {
  const auto cfg = twin(static_cast<int>(state.range(0)));
  const auto model = assim::build_model(cfg);
  const auto cost = assim::build_cost(cfg, model);
  const auto sim = assim::simulate(cfg);
  const auto u = assim::ControlPath::zeros(cfg.grid(), 3);
  const auto x = assim::integrate_state(model, u, assim::assimilation_initial_state(cfg));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assim::solve_costate(model, cost, x, u, sim.eta));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveCostate)->RangeMultiplier(4)->Range(256, 4096)->Complexity(benchmark::oN);

} // namespace
BENCHMARK_MAIN();
