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

#include "mtforge/data_select.h"

#include <cmath>

#include "mtforge/error.h"
#include "mtforge/parallel.h"
#include "mtforge/utf8.h"

namespace mtforge::select {

void Validate(const SelectionConfig& cfg) {
  if (cfg.in_domain_lm == nullptr || cfg.general_lm == nullptr) {
    throw ConfigError("missing_lm", "selection needs both language models");
  }
  if (std::isnan(cfg.threshold)) {
    throw ConfigError("bad_threshold", "selection threshold is NaN");
  }
}

double MlScore(const SelectionConfig& cfg,
               std::span<const std::string> tokens) {
  return cfg.in_domain_lm->CrossEntropy(tokens) -
         cfg.general_lm->CrossEntropy(tokens);
}

double MlScore(const SelectionConfig& cfg, std::string_view text) {
  const auto tokens = utf8::SplitWhitespace(text);
  return MlScore(cfg, tokens);
}

bool Passes(const SelectionConfig& cfg, double score) {
  switch (cfg.orientation) {
    case Orientation::kInDomainLike:
      return score < -cfg.threshold;
    case Orientation::kLiteralGreater:
      return score > cfg.threshold;
  }
  return false;
}

SelectionResult Select(const SelectionConfig& cfg,
                       std::span<const SentenceRecord> corpus, int workers) {
  Validate(cfg);
  std::vector<char> keep(corpus.size(), 0);
  ParallelFor(corpus.size(), workers, [&](size_t i) {
    keep[i] = Passes(cfg, MlScore(cfg, std::string_view(corpus[i].text)));
  });
  SelectionResult result;
  result.total = corpus.size();
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (keep[i]) result.kept.push_back(corpus[i]);
  }
  return result;
}

}  // namespace mtforge::select
