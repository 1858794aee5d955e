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

// Noisy-channel reranking of n-best lists.
//
// Each hypothesis is scored as
//
//   log P(tgt|src) + lambda1 * log P(src|tgt) + lambda2 * log P(tgt)
//       + length_penalty * length
//
// and the weights are tuned by seeded random search against corpus BLEU.

#ifndef MTFORGE_RERANK_H_
#define MTFORGE_RERANK_H_

#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "mtforge/metrics.h"

namespace mtforge::rerank {

inline constexpr int kDefaultTrials = 1000;
inline constexpr double kDefaultLowerBound = 0.0;
inline constexpr double kDefaultUpperBound = 2.0;

struct Hypothesis {
  std::string text;
  double direct = 0.0;   // log P(tgt|src)
  double channel = 0.0;  // log P(src|tgt)
  double lm = 0.0;       // log P(tgt)
  double length = 0.0;   // target tokens
};

struct Segment {
  int64_t id = 0;
  std::string source;
  std::vector<Hypothesis> hyps;
};

struct NBestList {
  std::vector<Segment> segments;
};

// Reads `seg_id ||| text ||| direct channel lm length` lines. Segments are
// ordered by ascending seg_id; hypotheses keep file order. Throws DataError on
// malformed lines, non-finite scores or negative lengths.
NBestList ParseNBest(std::istream& in);

// Throws DataError unless every segment has a hypothesis with finite scores.
void Validate(const NBestList& nbest);

struct RerankWeights {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double length_penalty = 0.0;

  friend bool operator==(const RerankWeights&, const RerankWeights&) = default;
};

struct Bounds {
  double lower = kDefaultLowerBound;
  double upper = kDefaultUpperBound;
};

double CombinedScore(const Hypothesis& h, const RerankWeights& w);

// Highest combined score; ties go to the lowest index.
size_t BestIndex(const Segment& segment, const RerankWeights& w);

std::vector<std::string> Rerank(const NBestList& nbest, const RerankWeights& w);

// Weights for one trial: each coordinate uniform in [lower, upper), drawn
// from (seed, trial) alone.
RerankWeights TrialWeights(uint64_t seed, uint64_t trial, const Bounds& bounds);

// Precomputes per-hypothesis BLEU statistics against the references so a
// weight setting costs one argmax per segment.
class BleuObjective {
 public:
  // Throws DataError when the reference count differs from the segment count.
  BleuObjective(const NBestList& nbest, std::span<const std::string> refs,
                metrics::TokenizeScheme scheme = metrics::TokenizeScheme::kIntl);

  double Evaluate(const RerankWeights& w) const;

 private:
  const NBestList* nbest_;
  std::vector<std::vector<metrics::BleuStats>> stats_;
};

struct TuneResult {
  RerankWeights weights;
  double bleu = 0.0;
  uint64_t trial = 0;
  std::vector<double> trial_bleu;
};

// Random search over `trials` draws; the best BLEU wins, ties go to the
// earliest trial. Results do not depend on `workers`.
TuneResult Tune(const NBestList& nbest, std::span<const std::string> refs,
                int trials = kDefaultTrials, const Bounds& bounds = {},
                uint64_t seed = 0, int workers = 1,
                metrics::TokenizeScheme scheme = metrics::TokenizeScheme::kIntl);

}  // namespace mtforge::rerank

#endif  // MTFORGE_RERANK_H_
