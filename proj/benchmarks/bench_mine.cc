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


#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "mtforge/mine.h"

namespace {

mtforge::mine::EmbeddingSet RandomSet(size_t n, size_t d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> rows(n * d);
  for (double& v : rows) v = normal(rng);
  std::vector<std::string> ids;
  for (size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  return mtforge::mine::EmbeddingSet::FromRows(std::move(ids), std::move(rows), d, "", true);
}

void BM_Knn(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  const auto src = RandomSet(n, 64, 1);
  const auto tgt = RandomSet(n, 64, 2);
  for (auto _ : state) benchmark::DoNotOptimize(mtforge::mine::Knn(src, tgt, 4));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Knn)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oNSquared);

void BM_MinePairs(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  const auto src = RandomSet(n, 64, 3);
  const auto tgt = RandomSet(n, 64, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mtforge::mine::MinePairs(src, tgt, 4, 1.0));
  }
}
BENCHMARK(BM_MinePairs)->Arg(256)->Arg(1024);

}  // namespace
