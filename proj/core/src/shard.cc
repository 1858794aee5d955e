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

#include "mtforge/shard.h"

#include <algorithm>
#include <fstream>
#include <memory>

#include "mtforge/error.h"

namespace mtforge::shard {

ShardPlan PlanShards(const std::map<std::string, uint64_t>& sizes,
                     const std::string& base) {
  if (sizes.empty()) throw ConfigError("empty_sizes", "no corpus sizes given");
  const auto base_it = sizes.find(base);
  if (base_it == sizes.end()) {
    throw ConfigError("unknown_base", "base corpus '" + base +
                                          "' is not in the size map");
  }
  for (const auto& [name, lines] : sizes) {
    if (lines == 0) {
      throw DataError("zero_size", "corpus '" + name + "' has zero lines");
    }
  }
  const uint64_t base_lines = base_it->second;
  ShardPlan plan;
  plan.base = base;
  for (const auto& [name, lines] : sizes) {
    const uint64_t shards =
        name == base ? 1 : std::max<uint64_t>(
                               1, (lines + base_lines - 1) / base_lines);
    plan.corpora[name] = {lines, shards};
  }
  return plan;
}

uint64_t ShardSize(uint64_t lines, uint64_t shards, uint64_t k) {
  return lines / shards + (k < lines % shards ? 1 : 0);
}

std::map<std::string, uint64_t> EpochManifest(const ShardPlan& plan,
                                              uint64_t epoch) {
  std::map<std::string, uint64_t> manifest;
  for (const auto& [name, c] : plan.corpora) manifest[name] = epoch % c.shards;
  return manifest;
}

std::string ShardFileName(const std::string& corpus, uint64_t k) {
  return corpus + ".shard" + std::to_string(k) + ".txt";
}

std::vector<std::filesystem::path> WriteShards(
    std::istream& in, const std::string& corpus, uint64_t shards,
    const std::filesystem::path& out_dir) {
  if (shards < 1) throw ConfigError("bad_shards", "shard count must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::vector<std::filesystem::path> paths;
  std::vector<std::unique_ptr<std::ofstream>> files;
  for (uint64_t k = 0; k < shards; ++k) {
    paths.push_back(out_dir / ShardFileName(corpus, k));
    files.push_back(std::make_unique<std::ofstream>(paths.back(),
                                                    std::ios::binary));
    if (!*files.back()) {
      throw IoError("unwritable_output",
                    "cannot open " + paths.back().string() + " for writing");
    }
  }
  std::string line;
  uint64_t i = 0;
  while (std::getline(in, line)) {
    *files[ShardOf(i++, shards)] << line << '\n';
  }
  for (size_t k = 0; k < files.size(); ++k) {
    files[k]->flush();
    if (!*files[k]) {
      throw IoError("write_failed", "failed writing " + paths[k].string());
    }
  }
  return paths;
}

}  // namespace mtforge::shard
