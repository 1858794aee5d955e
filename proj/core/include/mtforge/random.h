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

#ifndef MTFORGE_RANDOM_H_
#define MTFORGE_RANDOM_H_

#include <cstdint>

namespace mtforge {

// Counter-based generator: the value at (stream, counter) is a pure function
// of the seed, so draws can be computed in any order or on any thread and
// still agree bit-for-bit with a serial run. Mixing is two rounds of the
// splitmix64 finalizer.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t Bits(uint64_t stream, uint64_t counter) const {
    uint64_t x = Mix(seed_ ^ Mix(stream + 0x632BE59BD9B4E019ULL));
    return Mix(x + counter * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform(uint64_t stream, uint64_t counter) const {
    return static_cast<double>(Bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). n must be > 0. Uses a 128-bit multiply, whose
  // bias is below 2^-64 * n and irrelevant here.
  uint64_t Below(uint64_t stream, uint64_t counter, uint64_t n) const {
    __extension__ using Wide = unsigned __int128;
    const Wide wide = static_cast<Wide>(Bits(stream, counter)) * n;
    return static_cast<uint64_t>(wide >> 64);
  }

  uint64_t seed() const { return seed_; }

 private:
  static uint64_t Mix(uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t seed_;
};

}  // namespace mtforge

#endif  // MTFORGE_RANDOM_H_
