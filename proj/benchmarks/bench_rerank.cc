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

#include "mtforge/rerank.h"

namespace {

struct Instance {
  mtforge::rerank::NBestList nbest;
  std::vector<std::string> refs;
};

Instance MakeInstance(size_t segments, size_t hyps) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> score(-10.0, 0.0);
  Instance inst;
  for (size_t s = 0; s < segments; ++s) {
    mtforge::rerank::Segment seg;
    seg.id = static_cast<int64_t>(s);
    std::string ref;
    for (int w = 0; w < 12; ++w) ref += (w ? " t" : "t") + std::to_string(rng() % 100);
    inst.refs.push_back(ref);
    for (size_t h = 0; h < hyps; ++h) {
      std::string text;
      for (int w = 0; w < 12; ++w) text += (w ? " t" : "t") + std::to_string(rng() % 100);
      seg.hyps.push_back({text, score(rng), score(rng), score(rng), 12.0});
    }
    inst.nbest.segments.push_back(std::move(seg));
  }
  return inst;
}

void BM_Tune(benchmark::State& state) {
  const auto inst = MakeInstance(static_cast<size_t>(state.range(0)), 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mtforge::rerank::Tune(inst.nbest, inst.refs, 1000, {}, 1, 1));
  }
}
BENCHMARK(BM_Tune)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
