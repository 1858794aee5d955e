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

// Single-reference corpus BLEU (n = 1..4, uniform weights, no smoothing).
//
//   BLEU = 100 * BP * exp(1/4 * sum_n ln p_n)
//   p_n  = sum clipped n-gram matches / sum hypothesis n-grams
//   BP   = min(1, exp(1 - ref_len / hyp_len))
//
// Any p_n == 0 or hyp_len == 0 gives 0.

#ifndef MTFORGE_METRICS_H_
#define MTFORGE_METRICS_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mtforge::metrics {

inline constexpr int kMaxOrder = 4;

enum class TokenizeScheme { kIntl, kChar };

// "intl" or "char"; throws ConfigError otherwise.
TokenizeScheme ParseScheme(std::string_view name);
std::string_view SchemeName(TokenizeScheme scheme);

// Punctuation and symbol blocks split off by the intl tokenizer: ASCII
// punctuation/symbols, Latin-1 punctuation, General Punctuation, currency
// signs, CJK symbols and punctuation, and the full-width ASCII forms.
bool IsPunctuation(char32_t cp);

// intl: surround every punctuation codepoint with spaces, then split on
// Unicode whitespace. char: one token per non-space codepoint.
std::vector<std::string> Tokenize(std::string_view text, TokenizeScheme scheme);

struct BleuStats {
  std::array<uint64_t, kMaxOrder> matches{};
  std::array<uint64_t, kMaxOrder> totals{};
  uint64_t hyp_len = 0;
  uint64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
  friend bool operator==(const BleuStats&, const BleuStats&) = default;
};

BleuStats ComputeStats(std::span<const std::string> hyp,
                       std::span<const std::string> ref);

BleuStats Sum(std::span<const BleuStats> stats);

double Bleu(const BleuStats& total);
double CorpusBleu(std::span<const BleuStats> stats);

// Tokenizes and scores aligned hypothesis/reference lines. Throws DataError
// on a count mismatch or an empty corpus.
double CorpusBleu(std::span<const std::string> hyps,
                  std::span<const std::string> refs, TokenizeScheme scheme);

// "BLEU = 12.34"
std::string FormatBleu(double bleu);

}  // namespace mtforge::metrics

#endif  // MTFORGE_METRICS_H_
