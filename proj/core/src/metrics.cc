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

#include "mtforge/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "mtforge/error.h"
#include "mtforge/utf8.h"

namespace mtforge::metrics {
namespace {

using NgramCounts = std::unordered_map<std::string, uint64_t>;

NgramCounts CountNgrams(std::span<const std::string> tokens, int n) {
  NgramCounts counts;
  if (tokens.size() < static_cast<size_t>(n)) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int j = 1; j < n; ++j) {
      key.push_back('\0');
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

TokenizeScheme ParseScheme(std::string_view name) {
  if (name == "intl") return TokenizeScheme::kIntl;
  if (name == "char") return TokenizeScheme::kChar;
  throw ConfigError("unknown_tokenizer",
                    "unknown tokenize scheme '" + std::string(name) + "'");
}

std::string_view SchemeName(TokenizeScheme scheme) {
  return scheme == TokenizeScheme::kIntl ? "intl" : "char";
}

bool IsPunctuation(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  return (cp >= 0xA1 && cp <= 0xBF && cp != 0xAA && cp != 0xAD &&
          cp != 0xB2 && cp != 0xB3 && cp != 0xB5 && cp != 0xB9 &&
          cp != 0xBA && cp != 0xBC && cp != 0xBD && cp != 0xBE) ||
         cp == 0xD7 || cp == 0xF7 || (cp >= 0x2010 && cp <= 0x2027) ||
         (cp >= 0x2030 && cp <= 0x205E) || (cp >= 0x20A0 && cp <= 0x20CF) ||
         (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x3008 && cp <= 0x3011) ||
         (cp >= 0x3014 && cp <= 0x301F) || (cp >= 0xFF01 && cp <= 0xFF0F) ||
         (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
         (cp >= 0xFF5B && cp <= 0xFF65);
}

std::vector<std::string> Tokenize(std::string_view text, TokenizeScheme scheme) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char32_t cp : utf8::Decode(text)) {
    if (utf8::IsUnicodeSpace(cp)) {
      flush();
    } else if (scheme == TokenizeScheme::kChar || IsPunctuation(cp)) {
      flush();
      utf8::Append(current, cp);
      flush();
    } else {
      utf8::Append(current, cp);
    }
  }
  flush();
  return tokens;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int n = 0; n < kMaxOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

BleuStats ComputeStats(std::span<const std::string> hyp,
                       std::span<const std::string> ref) {
  BleuStats stats;
  stats.hyp_len = hyp.size();
  stats.ref_len = ref.size();
  for (int n = 1; n <= kMaxOrder; ++n) {
    const NgramCounts hyp_counts = CountNgrams(hyp, n);
    const NgramCounts ref_counts = CountNgrams(ref, n);
    uint64_t matched = 0;
    for (const auto& [gram, count] : hyp_counts) {
      const auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    stats.matches[n - 1] = matched;
    stats.totals[n - 1] =
        hyp.size() >= static_cast<size_t>(n) ? hyp.size() - n + 1 : 0;
  }
  return stats;
}

BleuStats Sum(std::span<const BleuStats> stats) {
  BleuStats total;
  for (const auto& s : stats) total += s;
  return total;
}

double Bleu(const BleuStats& total) {
  if (total.hyp_len == 0) return 0.0;
  double log_precision = 0.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    if (total.matches[n] == 0 || total.totals[n] == 0) return 0.0;
    log_precision += std::log(static_cast<double>(total.matches[n]) /
                              static_cast<double>(total.totals[n]));
  }
  log_precision /= kMaxOrder;
  const double hyp_len = static_cast<double>(total.hyp_len);
  const double ref_len = static_cast<double>(total.ref_len);
  const double brevity =
      hyp_len < ref_len ? std::exp(1.0 - ref_len / hyp_len) : 1.0;
  return 100.0 * brevity * std::exp(log_precision);
}

double CorpusBleu(std::span<const BleuStats> stats) { return Bleu(Sum(stats)); }

double CorpusBleu(std::span<const std::string> hyps,
                  std::span<const std::string> refs, TokenizeScheme scheme) {
  if (hyps.size() != refs.size()) {
    throw DataError("length_mismatch",
                    "hypothesis and reference line counts differ (" +
                        std::to_string(hyps.size()) + " vs " +
                        std::to_string(refs.size()) + ")");
  }
  if (hyps.empty()) throw DataError("empty_corpus", "nothing to score");
  BleuStats total;
  for (size_t i = 0; i < hyps.size(); ++i) {
    total += ComputeStats(Tokenize(hyps[i], scheme), Tokenize(refs[i], scheme));
  }
  return Bleu(total);
}

std::string FormatBleu(double bleu) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "BLEU = %.2f", bleu);
  return buf;
}

}  // namespace mtforge::metrics
