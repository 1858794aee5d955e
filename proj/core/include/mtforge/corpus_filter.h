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

// Bitext and monolingual cleaning: language identification, punctuation
// normalization and the length / length-ratio rule.
//
// The filters never modify records; each output element is a copy of some
// input element and input order is kept. NormalizePunct is the only stage
// that rewrites text and is applied explicitly before filtering.

#ifndef MTFORGE_CORPUS_FILTER_H_
#define MTFORGE_CORPUS_FILTER_H_

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mtforge/records.h"

namespace mtforge::filter {

inline constexpr int kDefaultMaxLen = 250;
inline constexpr double kDefaultMaxRatio = 3.0;
inline constexpr double kDefaultLidAlpha = 0.1;
inline constexpr int kLidMaxOrder = 4;

// Character 1..4-gram multinomial Naive Bayes language identifier with
// add-alpha smoothing.
//
// The event space of each class is the union of all n-grams seen in training
// plus one bucket for unseen n-grams, so per class
//   p(g | c) = (count_c(g) + alpha) / (total_c + alpha * (|V| + 1))
// sums to one over that space. Priors are document frequencies.
class LidModel {
 public:
  // Throws ConfigError with fewer than two distinct labels or alpha <= 0, and
  // DataError on an empty training record. Counting is order independent.
  static LidModel Train(std::span<const SentenceRecord> labeled, double alpha);

  static LidModel Load(std::istream& in);
  void Save(std::ostream& out) const;

  // Argmax class; ties go to the lexicographically smallest tag.
  const std::string& Predict(std::string_view text) const;

  // Unnormalized log joint log p(c) + sum_g n(g) log p(g|c), one per class
  // in classes() order.
  std::vector<double> LogScores(std::string_view text) const;

  bool HasClass(std::string_view lang) const;
  const std::vector<std::string>& classes() const { return classes_; }
  double alpha() const { return alpha_; }
  double log_prior(size_t c) const { return log_priors_[c]; }
  // log p(g | c) for any n-gram, including unseen ones.
  double LogProb(size_t c, const std::string& ngram) const;
  size_t ngram_vocab_size() const { return log_probs_.size(); }

  friend bool operator==(const LidModel&, const LidModel&) = default;

 private:
  double alpha_ = kDefaultLidAlpha;
  std::vector<std::string> classes_;  // sorted
  std::vector<double> log_priors_;
  std::vector<double> unseen_log_probs_;
  std::unordered_map<std::string, std::vector<double>> log_probs_;
};

// Character n-grams of orders 1..max_order, with repetition.
std::vector<std::string> CharNgrams(std::string_view text, int max_order);

// Keeps the records whose predicted class is `expected_lang`. bypass=true
// returns the input unchanged without consulting the model (used for
// languages where identification is unreliable). Throws ConfigError when
// expected_lang is not a model class and bypass is false.
std::vector<SentenceRecord> LidFilter(std::span<const SentenceRecord> records,
                                      const LidModel& model,
                                      std::string_view expected_lang,
                                      bool bypass, int workers = 1);

// Pair version: the source side must be identified as `expected_src` and the
// target side as `expected_tgt`; each side can be bypassed separately.
std::vector<ParallelRecord> LidFilterPairs(
    std::span<const ParallelRecord> pairs, const LidModel& model,
    std::string_view expected_src, bool bypass_src,
    std::string_view expected_tgt, bool bypass_tgt, int workers = 1);

// Fixed punctuation mapping: curly and angle quotes to ASCII, dash variants
// to '-', no-break and thin spaces to ' ', then collapse runs of ' ' and trim.
// Idempotent.
std::string NormalizePunct(std::string_view text);

// Whitespace token count.
size_t WordCount(std::string_view text);

// True iff both sides have at most max_len words and
// max(len)/min(len) <= max_ratio. An empty side always fails.
bool PassesLengthRatio(const ParallelRecord& pair, int max_len,
                       double max_ratio);

// Throws ConfigError unless max_len >= 1 and max_ratio >= 1.
std::vector<ParallelRecord> LengthRatioFilter(
    std::span<const ParallelRecord> pairs, int max_len = kDefaultMaxLen,
    double max_ratio = kDefaultMaxRatio);

}  // namespace mtforge::filter

#endif  // MTFORGE_CORPUS_FILTER_H_
