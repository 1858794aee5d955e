// Copyright 2026 The mtforge Authors.
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


#include <random>

#include <benchmark/benchmark.h>

#include "mtforge/moe_router.h"

namespace {

mtforge::Matrix RandomLogits(size_t tokens, size_t experts) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  mtforge::Matrix m(tokens, experts);
  for (double& v : m.data()) v = normal(rng);
  return m;
}

void BM_Route(benchmark::State& state) {
  const auto logits = RandomLogits(static_cast<size_t>(state.range(0)), 64);
  mtforge::moe::RouterConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(mtforge::moe::Route(logits, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Route)->Arg(512)->Arg(4096);

void BM_GateLossGrad(benchmark::State& state) {
  const auto logits = RandomLogits(static_cast<size_t>(state.range(0)), 64);
  for (auto _ : state) benchmark::DoNotOptimize(mtforge::moe::GateLossGrad(logits));
}
BENCHMARK(BM_GateLossGrad)->Arg(512)->Arg(4096);

}  // namespace
