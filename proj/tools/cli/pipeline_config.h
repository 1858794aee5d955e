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


// Pipeline configuration: one JSON object with a section per stage. Every
// paper constant is a named key carrying its default; unknown keys and
// values of the wrong type are rejected. Seeds have no default, so a
// stochastic stage fails instead of silently picking one.

#ifndef MTFORGE_TOOLS_CLI_PIPELINE_CONFIG_H_
#define MTFORGE_TOOLS_CLI_PIPELINE_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mtforge::cli {

struct FilterSection {
  int64_t max_len = 250;
  double max_ratio = 3.0;
  double lid_alpha = 0.1;
  std::vector<std::string> no_lid = {"ha"};
  bool normalize_punct = true;
};

struct LmSection {
  int64_t order = 5;
  double discount = 0.75;
};

struct SelectSection {
  double select_threshold = 0.01;
  std::string orientation = "in_domain_like";  // or "literal_greater"
};

struct SubwordSection {
  double T = 5.0;
  std::optional<int64_t> vocab_size;
  std::optional<int64_t> budget;
  std::string marker = "@@";
};

struct MineSection {
  int64_t k = 4;
  double threshold = 1.06;
  bool allow_renormalize = false;
};

struct ShardSection {
  std::optional<std::string> base;
};

struct MoeSection {
  int64_t num_experts = 64;
  int64_t top_k = 2;
  double capacity_factor = 2.0;
  double gate_loss_weight = 0.01;
  int64_t moe_layer_frequency = 2;
};

struct CkptSection {
  int64_t avg_last = 5;
};

struct RerankSection {
  int64_t tune_trials = 1000;
  double tune_lower = 0.0;
  double tune_upper = 2.0;
};

struct BleuSection {
  std::string tokenize = "intl";
};

struct PostprocessSection {
  std::optional<std::string> lang;
};

struct SeedsSection {
  std::optional<uint64_t> subword_sample;
  std::optional<uint64_t> rerank_tune;
};

struct PipelineConfig {
  FilterSection filter;
  LmSection lm;
  SelectSection select;
  SubwordSection subword;
  MineSection mine;
  ShardSection shard;
  MoeSection moe;
  CkptSection ckpt;
  RerankSection rerank;
  BleuSection bleu;
  PostprocessSection postprocess;
  SeedsSection seeds;
  int64_t workers = 1;

  // Overlays the keys present in `doc` onto this config. Throws ConfigError
  // ("unknown_key", "bad_type") without modifying *this on failure.
  void Merge(const nlohmann::json& doc);

  // Throws ConfigError when a value is out of range.
  void Validate() const;

  nlohmann::json ToJson() const;
};

// Parses JSON text; malformed text throws ConfigError "bad_config_json".
PipelineConfig LoadConfig(const std::string& text);

}  // namespace mtforge::cli

#endif  // MTFORGE_TOOLS_CLI_PIPELINE_CONFIG_H_
