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

#include "mtforge/ngram_lm.h"

namespace {

std::vector<std::vector<std::string>> Corpus(size_t sentences, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> out(sentences);
  for (auto& s : out) {
    const size_t len = 5 + rng() % 20;
    for (size_t i = 0; i < len; ++i) s.push_back("w" + std::to_string(rng() % 2000));
  }
  return out;
}

void BM_LmTrain(benchmark::State& state) {
  const auto corpus = Corpus(static_cast<size_t>(state.range(0)), 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mtforge::lm::NGramModel::Train(corpus, 5, 0.75));
  }
}
BENCHMARK(BM_LmTrain)->Arg(1000)->Arg(10000);

void BM_LmCrossEntropy(benchmark::State& state) {
  const auto model = mtforge::lm::NGramModel::Train(Corpus(10000, 7), 5, 0.75);
  const auto queries = Corpus(1000, 8);
  for (auto _ : state) {
    double total = 0.0;
    for (const auto& q : queries) total += model.CrossEntropy(q);
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(queries.size()));
}
BENCHMARK(BM_LmCrossEntropy);

}  // namespace
