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

// Cross-entropy difference selection of general-domain monolingual text.
//
// score(s) = H_in(s) - H_general(s), both per-token cross entropies in nats
// from ngram_lm. Two retention rules are supported:
//   kInDomainLike   keep score < -threshold (the usual convention: the
//                   in-domain LM finds the sentence easier);
//   kLiteralGreater keep score > threshold.

#ifndef MTFORGE_DATA_SELECT_H_
#define MTFORGE_DATA_SELECT_H_

#include <span>
#include <string>
#include <vector>

#include "mtforge/ngram_lm.h"
#include "mtforge/records.h"

namespace mtforge::select {

inline constexpr double kDefaultThreshold = 0.01;

enum class Orientation { kInDomainLike, kLiteralGreater };

struct SelectionConfig {
  const lm::NGramModel* in_domain_lm = nullptr;
  const lm::NGramModel* general_lm = nullptr;
  double threshold = kDefaultThreshold;
  Orientation orientation = Orientation::kInDomainLike;
};

struct SelectionResult {
  std::vector<SentenceRecord> kept;
  size_t total = 0;

  double fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(kept.size()) / total;
  }
};

// Throws ConfigError when either LM is missing or the threshold is NaN.
// +inf is allowed and selects nothing.
void Validate(const SelectionConfig& cfg);

double MlScore(const SelectionConfig& cfg, std::span<const std::string> tokens);
double MlScore(const SelectionConfig& cfg, std::string_view text);

bool Passes(const SelectionConfig& cfg, double score);

SelectionResult Select(const SelectionConfig& cfg,
                       std::span<const SentenceRecord> corpus,
                       int workers = 1);

}  // namespace mtforge::select

#endif  // MTFORGE_DATA_SELECT_H_
