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

#include "mtforge/rerank.h"

#include <cmath>
#include <map>

#include "mtforge/error.h"
#include "mtforge/parallel.h"
#include "mtforge/random.h"
#include "mtforge/strings.h"
#include "mtforge/utf8.h"

namespace mtforge::rerank {
namespace {

constexpr std::string_view kSeparator = " ||| ";

}  // namespace

NBestList ParseNBest(std::istream& in) {
  std::map<int64_t, Segment> by_id;
  std::string line;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ChompCr(line);
    if (TrimAscii(line).empty()) continue;
    auto fail = [&](const std::string& why) {
      throw DataError("malformed_nbest",
                      "n-best line " + std::to_string(line_no) + ": " + why);
    };
    const size_t first = line.find(kSeparator);
    const size_t last = line.rfind(kSeparator);
    if (first == std::string::npos || first == last) {
      fail("expected 'seg_id ||| text ||| scores'");
    }
    const auto id = ParseInt(std::string_view(line).substr(0, first));
    if (!id || *id < 0) fail("seg_id must be a non-negative integer");
    Hypothesis h;
    h.text = line.substr(first + kSeparator.size(),
                         last - first - kSeparator.size());
    const auto fields =
        utf8::SplitWhitespace(std::string_view(line).substr(last + kSeparator.size()));
    if (fields.size() != 4) fail("expected 4 scores: direct channel lm length");
    double values[4];
    for (int i = 0; i < 4; ++i) {
      const auto v = ParseDouble(fields[i]);
      if (!v || !std::isfinite(*v)) fail("score '" + fields[i] + "' is not finite");
      values[i] = *v;
    }
    h.direct = values[0];
    h.channel = values[1];
    h.lm = values[2];
    h.length = values[3];
    if (h.length < 0) fail("length must be >= 0");
    Segment& seg = by_id[*id];
    seg.id = *id;
    seg.hyps.push_back(std::move(h));
  }
  NBestList nbest;
  for (auto& [id, seg] : by_id) nbest.segments.push_back(std::move(seg));
  return nbest;
}

void Validate(const NBestList& nbest) {
  for (const auto& seg : nbest.segments) {
    if (seg.hyps.empty()) {
      throw DataError("empty_segment", "segment " + std::to_string(seg.id) +
                                           " has no hypotheses");
    }
    for (const auto& h : seg.hyps) {
      if (!std::isfinite(h.direct) || !std::isfinite(h.channel) ||
          !std::isfinite(h.lm) || !std::isfinite(h.length) || h.length < 0) {
        throw DataError("bad_scores", "segment " + std::to_string(seg.id) +
                                          " has a non-finite score");
      }
    }
  }
}

double CombinedScore(const Hypothesis& h, const RerankWeights& w) {
  return h.direct + w.lambda1 * h.channel + w.lambda2 * h.lm +
         w.length_penalty * h.length;
}

size_t BestIndex(const Segment& segment, const RerankWeights& w) {
  size_t best = 0;
  double best_score = CombinedScore(segment.hyps[0], w);
  for (size_t i = 1; i < segment.hyps.size(); ++i) {
    const double s = CombinedScore(segment.hyps[i], w);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

std::vector<std::string> Rerank(const NBestList& nbest,
                                const RerankWeights& w) {
  Validate(nbest);
  std::vector<std::string> out;
  out.reserve(nbest.segments.size());
  for (const auto& seg : nbest.segments) {
    out.push_back(seg.hyps[BestIndex(seg, w)].text);
  }
  return out;
}

RerankWeights TrialWeights(uint64_t seed, uint64_t trial,
                           const Bounds& bounds) {
  const CounterRng rng(seed);
  const double span = bounds.upper - bounds.lower;
  return {bounds.lower + span * rng.Uniform(0, trial),
          bounds.lower + span * rng.Uniform(1, trial),
          bounds.lower + span * rng.Uniform(2, trial)};
}

BleuObjective::BleuObjective(const NBestList& nbest,
                             std::span<const std::string> refs,
                             metrics::TokenizeScheme scheme)
    : nbest_(&nbest) {
  Validate(nbest);
  if (refs.size() != nbest.segments.size()) {
    throw DataError("length_mismatch",
                    "reference count (" + std::to_string(refs.size()) +
                        ") != segment count (" +
                        std::to_string(nbest.segments.size()) + ")");
  }
  stats_.resize(refs.size());
  for (size_t s = 0; s < refs.size(); ++s) {
    const auto ref = metrics::Tokenize(refs[s], scheme);
    for (const auto& h : nbest.segments[s].hyps) {
      stats_[s].push_back(metrics::ComputeStats(metrics::Tokenize(h.text, scheme), ref));
    }
  }
}

double BleuObjective::Evaluate(const RerankWeights& w) const {
  metrics::BleuStats total;
  for (size_t s = 0; s < stats_.size(); ++s) {
    total += stats_[s][BestIndex(nbest_->segments[s], w)];
  }
  return metrics::Bleu(total);
}

TuneResult Tune(const NBestList& nbest, std::span<const std::string> refs,
                int trials, const Bounds& bounds, uint64_t seed, int workers,
                metrics::TokenizeScheme scheme) {
  if (trials < 1) throw ConfigError("bad_trials", "trials must be >= 1");
  if (!std::isfinite(bounds.lower) || !std::isfinite(bounds.upper) ||
      bounds.lower > bounds.upper) {
    throw ConfigError("bad_bounds", "search bounds must satisfy lower <= upper");
  }
  const BleuObjective objective(nbest, refs, scheme);
  TuneResult result;
  result.trial_bleu.resize(trials);
  ParallelFor(static_cast<size_t>(trials), workers, [&](size_t t) {
    result.trial_bleu[t] = objective.Evaluate(TrialWeights(seed, t, bounds));
  });
  for (size_t t = 1; t < result.trial_bleu.size(); ++t) {
    if (result.trial_bleu[t] > result.trial_bleu[result.trial]) result.trial = t;
  }
  result.bleu = result.trial_bleu[result.trial];
  result.weights = TrialWeights(seed, result.trial, bounds);
  return result;
}

}  // namespace mtforge::rerank
