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

// Word n-gram language model with interpolated Kneser-Ney smoothing and a
// single fixed discount D.
//
// Each sentence is padded with order-1 copies of <s> on the left and one </s>
// on the right, so every predicted token has a full-length context. With c_k
// the raw count at the highest order and the continuation count
// N1+(. g) at lower orders:
//
//   p_k(w | h) = max(c_k(hw) - D, 0) / S(h) + D * T(h) / S(h) * p_{k-1}(w | h')
//
// where S(h) = sum_w c_k(hw), T(h) = |{w : c_k(hw) > 0}|, h' drops the oldest
// word of h, and p_0 is uniform over the predictable vocabulary (every word
// type plus </s> and <unk>, but not <s>). An unseen context backs off
// completely to h'.
//
// The model stores p_k(w|h) for observed n-grams and the backoff mass
// D*T(h)/S(h) per observed context, which reproduces the interpolated
// estimate exactly for unseen words.

#ifndef MTFORGE_NGRAM_LM_H_
#define MTFORGE_NGRAM_LM_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mtforge/records.h"

namespace mtforge::lm {

inline constexpr int kDefaultOrder = 5;
inline constexpr int kMaxOrder = 8;
inline constexpr double kDefaultDiscount = 0.75;

inline constexpr uint32_t kBosId = 0;
inline constexpr uint32_t kEosId = 1;
inline constexpr uint32_t kUnkId = 2;
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kUnkToken = "<unk>";

using Context = std::vector<uint32_t>;

struct ContextHash {
  size_t operator()(const Context& ctx) const {
    uint64_t h = 0xCBF29CE484222325ULL ^ ctx.size();
    for (uint32_t id : ctx) {
      h ^= id;
      h *= 0x100000001B3ULL;
      h ^= h >> 29;
    }
    return static_cast<size_t>(h);
  }
};

class NGramModel {
 public:
  struct ContextEntry {
    double backoff = 0.0;
    std::unordered_map<uint32_t, double> probs;

    friend bool operator==(const ContextEntry&, const ContextEntry&) = default;
  };

  // Throws ConfigError on an empty corpus, order outside [1, 8] or discount
  // outside (0, 1).
  static NGramModel Train(std::span<const std::vector<std::string>> sentences,
                          int order = kDefaultOrder,
                          double discount = kDefaultDiscount);
  // Whitespace-tokenizes each record first.
  static NGramModel Train(std::span<const SentenceRecord> corpus,
                          int order = kDefaultOrder,
                          double discount = kDefaultDiscount);

  static NGramModel Load(std::istream& in);
  void Save(std::ostream& out) const;

  // p(word | context). Only the last order-1 ids of `history` are used;
  // shorter histories are left-padded with <s>.
  double Prob(std::span<const uint32_t> history, uint32_t word) const;

  // Per-token cross entropy in nats, averaged over the |s| + 1 transitions
  // (including </s>). Out-of-vocabulary tokens score as <unk>.
  double CrossEntropy(std::span<const std::string> tokens) const;
  double CrossEntropy(std::string_view text) const;

  uint32_t WordId(std::string_view word) const;
  const std::vector<std::string>& vocab() const { return vocab_; }
  int order() const { return order_; }
  double discount() const { return discount_; }
  // Unigram probability of an unseen word (the <unk> estimate).
  double unigram_floor() const { return unigram_floor_; }
  const std::unordered_map<Context, ContextEntry, ContextHash>& contexts()
      const {
    return contexts_;
  }

  friend bool operator==(const NGramModel&, const NGramModel&) = default;

 private:
  // Walks suffixes of exactly `ctx` (no padding), longest first.
  double ProbExact(std::span<const uint32_t> ctx, uint32_t word) const;

  int order_ = kDefaultOrder;
  double discount_ = kDefaultDiscount;
  double unigram_floor_ = 0.0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, uint32_t> word_ids_;
  std::unordered_map<Context, ContextEntry, ContextHash> contexts_;
};

}  // namespace mtforge::lm

#endif  // MTFORGE_NGRAM_LM_H_
