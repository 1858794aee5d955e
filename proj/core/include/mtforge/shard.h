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

// Epoch sharding. Large corpora are split into more shards than the base
// (lowest-resource) corpus, and every epoch reads one shard per corpus, which
// downsamples them to roughly the base size per epoch.

#ifndef MTFORGE_SHARD_H_
#define MTFORGE_SHARD_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace mtforge::shard {

struct CorpusShards {
  uint64_t lines = 0;
  uint64_t shards = 1;

  friend bool operator==(const CorpusShards&, const CorpusShards&) = default;
};

struct ShardPlan {
  std::string base;
  std::map<std::string, CorpusShards> corpora;

  friend bool operator==(const ShardPlan&, const ShardPlan&) = default;
};

// s_base = 1, s_c = max(1, ceil(lines_c / lines_base)). Throws ConfigError on
// an empty map, a missing base and DataError on a zero-size corpus.
ShardPlan PlanShards(const std::map<std::string, uint64_t>& sizes,
                     const std::string& base);

// Line i of a corpus belongs to shard i mod s.
inline uint64_t ShardOf(uint64_t line_index, uint64_t shards) {
  return line_index % shards;
}

// Number of lines shard k receives out of `lines`.
uint64_t ShardSize(uint64_t lines, uint64_t shards, uint64_t k);

// corpus -> epoch mod s_c.
std::map<std::string, uint64_t> EpochManifest(const ShardPlan& plan,
                                              uint64_t epoch);

std::string ShardFileName(const std::string& corpus, uint64_t k);

// Streams `in` into <out_dir>/<corpus>.shard<k>.txt for k in [0, shards).
// Returns the paths in shard order. Throws IoError when a file cannot be
// written and ConfigError when shards < 1.
std::vector<std::filesystem::path> WriteShards(
    std::istream& in, const std::string& corpus, uint64_t shards,
    const std::filesystem::path& out_dir);

}  // namespace mtforge::shard

#endif  // MTFORGE_SHARD_H_
