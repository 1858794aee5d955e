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
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "mtforge/metrics.h"

namespace {

std::vector<std::string> Lines(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> out(n);
  for (auto& line : out) {
    const size_t len = 5 + rng() % 30;
    for (size_t i = 0; i < len; ++i) {
      line += (i ? " w" : "w") + std::to_string(rng() % 500);
      if (rng() % 10 == 0) line += ",";
    }
  }
  return out;
}

void BM_CorpusBleu(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  const auto hyps = Lines(n, 9);
  const auto refs = Lines(n, 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mtforge::metrics::CorpusBleu(hyps, refs, mtforge::metrics::TokenizeScheme::kIntl));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusBleu)->Arg(1000)->Arg(10000);

}  // namespace
