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

// Shared multilingual subword vocabulary: temperature-balanced sampling of
// the training text and classical BPE over whitespace-separated words.
//
// Word-internal pieces carry a continuation marker ("@@" by default), so
// "abab" with the single merge (a, b) encodes as ["ab@@", "ab"]. Every symbol
// (base character or merge result) has two vocabulary entries, the bare
// word-final form and the marked form, so any word over the base alphabet is
// encodable.

#ifndef MTFORGE_SUBWORD_H_
#define MTFORGE_SUBWORD_H_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mtforge::subword {

inline constexpr double kDefaultTemperature = 5.0;
inline constexpr std::string_view kDefaultMarker = "@@";

inline constexpr uint32_t kUnkId = 0;
inline constexpr uint32_t kBosId = 1;
inline constexpr uint32_t kEosId = 2;
inline constexpr uint32_t kPadId = 3;
inline constexpr uint32_t kNumSpecials = 4;

// Written in place of <unk> when decoding.
inline constexpr std::string_view kUnknownReplacement = "\xEF\xBF\xBD";

// probs_l = (D_l / sum D)^(1/T), renormalized. Throws ConfigError for T < 1,
// an empty map or a zero count.
std::map<std::string, double> TemperatureProbs(
    const std::map<std::string, uint64_t>& sizes, double temperature);

struct SamplingPlan {
  std::map<std::string, uint64_t> sizes;
  double temperature = kDefaultTemperature;
  std::map<std::string, double> probs;
};

SamplingPlan MakeSamplingPlan(const std::map<std::string, uint64_t>& sizes,
                              double temperature = kDefaultTemperature);

// Draws `budget` lines. Draw i picks a language from plan.probs with a
// seeded counter-based RNG; the j-th draw from a language returns its line j
// while j < its size, then samples uniformly with replacement. Throws
// DataError if a language with positive probability has no lines.
std::vector<std::string> SampleCorpus(
    const std::map<std::string, std::vector<std::string>>& corpora,
    const SamplingPlan& plan, uint64_t budget, uint64_t seed);

class SubwordModel {
 public:
  using Merge = std::pair<std::string, std::string>;

  // Greedy BPE. Each step merges the most frequent adjacent symbol pair
  // (counted over word occurrences), ties broken by (left, right) byte order.
  // Stops when the vocabulary would exceed vocab_size or the best pair occurs
  // fewer than twice. Throws ConfigError if vocab_size <= alphabet + 4.
  static SubwordModel Learn(std::span<const std::string> lines,
                            size_t vocab_size,
                            std::string_view marker = kDefaultMarker);

  static SubwordModel Load(std::istream& in);
  void Save(std::ostream& out) const;

  std::vector<std::string> EncodePieces(std::string_view text) const;
  std::vector<uint32_t> Encode(std::string_view text) const;
  // Words are re-joined with single spaces. Specials other than <unk> are
  // skipped. Throws DataError for an id outside the vocabulary.
  std::string Decode(std::span<const uint32_t> ids) const;

  const std::vector<Merge>& merges() const { return merges_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& marker() const { return marker_; }
  size_t vocab_size() const { return tokens_.size(); }
  // Sorted single-codepoint symbols seen in training.
  const std::vector<std::string>& alphabet() const { return alphabet_; }

  friend bool operator==(const SubwordModel& a, const SubwordModel& b) {
    return a.marker_ == b.marker_ && a.merges_ == b.merges_ &&
           a.tokens_ == b.tokens_;
  }

 private:
  struct Entry {
    std::string symbol;
    bool continuation = false;
  };

  void Index();
  std::vector<std::string> SegmentWord(std::string_view word) const;

  std::string marker_{kDefaultMarker};
  std::vector<Merge> merges_;
  std::vector<std::string> alphabet_;
  std::vector<std::string> tokens_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, uint32_t> final_ids_;
  std::unordered_map<std::string, uint32_t> continuation_ids_;
  std::map<Merge, size_t> merge_rank_;
};

}  // namespace mtforge::subword

#endif  // MTFORGE_SUBWORD_H_
