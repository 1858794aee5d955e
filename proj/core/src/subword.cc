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

#include "mtforge/subword.h"

#include <cmath>
#include <set>
#include <tuple>

#include "mtforge/error.h"
#include "mtforge/random.h"
#include "mtforge/strings.h"
#include "mtforge/utf8.h"

namespace mtforge::subword {
namespace {

constexpr std::string_view kHeaderPrefix = "MTFG-BPE v1 marker=";
constexpr const char* kSpecialTokens[kNumSpecials] = {"<unk>", "<s>", "</s>",
                                                      "<pad>"};

// RNG streams for SampleCorpus.
constexpr uint64_t kLanguageStream = 1;
constexpr uint64_t kLineStream = 2;

using Merge = SubwordModel::Merge;

// Pair statistics with a priority set ordered by (-count, left, right) so the
// first element is always the next merge.
class PairTable {
 public:
  void Add(const Merge& pair, int64_t delta) {
    int64_t& count = counts_[pair];
    if (count > 0) queue_.erase({-count, pair.first, pair.second});
    count += delta;
    if (count > 0) queue_.insert({-count, pair.first, pair.second});
  }

  bool Empty() const { return queue_.empty(); }
  int64_t TopCount() const { return -std::get<0>(*queue_.begin()); }
  Merge Top() const {
    const auto& [neg, left, right] = *queue_.begin();
    return {left, right};
  }

 private:
  std::map<Merge, int64_t> counts_;
  std::set<std::tuple<int64_t, std::string, std::string>> queue_;
};

std::vector<std::string> ApplyMerge(const std::vector<std::string>& syms,
                                    const Merge& merge) {
  std::vector<std::string> out;
  out.reserve(syms.size());
  for (size_t i = 0; i < syms.size(); ++i) {
    if (i + 1 < syms.size() && syms[i] == merge.first &&
        syms[i + 1] == merge.second) {
      out.push_back(syms[i] + syms[i + 1]);
      ++i;
    } else {
      out.push_back(syms[i]);
    }
  }
  return out;
}

}  // namespace

std::map<std::string, double> TemperatureProbs(
    const std::map<std::string, uint64_t>& sizes, double temperature) {
  if (!(temperature >= 1.0) || !std::isfinite(temperature)) {
    throw ConfigError("bad_temperature", "temperature must be >= 1");
  }
  if (sizes.empty()) {
    throw ConfigError("empty_sizes", "no language sizes given");
  }
  double total = 0.0;
  for (const auto& [lang, count] : sizes) {
    if (count == 0) {
      throw ConfigError("zero_size", "language '" + lang + "' has size 0");
    }
    total += static_cast<double>(count);
  }
  std::map<std::string, double> probs;
  double norm = 0.0;
  for (const auto& [lang, count] : sizes) {
    const double share = static_cast<double>(count) / total;
    const double w = std::exp(std::log(share) / temperature);
    probs[lang] = w;
    norm += w;
  }
  for (auto& [lang, p] : probs) p /= norm;
  return probs;
}

SamplingPlan MakeSamplingPlan(const std::map<std::string, uint64_t>& sizes,
                              double temperature) {
  return {sizes, temperature, TemperatureProbs(sizes, temperature)};
}

std::vector<std::string> SampleCorpus(
    const std::map<std::string, std::vector<std::string>>& corpora,
    const SamplingPlan& plan, uint64_t budget, uint64_t seed) {
  if (budget < 1) throw ConfigError("bad_budget", "sample budget must be >= 1");
  std::vector<std::pair<const std::vector<std::string>*, double>> langs;
  for (const auto& [lang, p] : plan.probs) {
    if (p <= 0.0) continue;
    const auto it = corpora.find(lang);
    if (it == corpora.end() || it->second.empty()) {
      throw DataError("empty_language",
                      "language '" + lang + "' has no lines to sample");
    }
    langs.emplace_back(&it->second, p);
  }
  if (langs.empty()) throw ConfigError("empty_plan", "sampling plan is empty");

  const CounterRng rng(seed);
  std::vector<uint64_t> drawn(langs.size(), 0);
  std::vector<std::string> out;
  out.reserve(budget);
  for (uint64_t i = 0; i < budget; ++i) {
    const double u = rng.Uniform(kLanguageStream, i);
    size_t pick = langs.size() - 1;
    double cumulative = 0.0;
    for (size_t l = 0; l < langs.size(); ++l) {
      cumulative += langs[l].second;
      if (u < cumulative) {
        pick = l;
        break;
      }
    }
    const auto& lines = *langs[pick].first;
    const uint64_t j = drawn[pick]++;
    const uint64_t line =
        j < lines.size() ? j : rng.Below(kLineStream, i, lines.size());
    out.push_back(lines[line]);
  }
  return out;
}

SubwordModel SubwordModel::Learn(std::span<const std::string> lines,
                                 size_t vocab_size, std::string_view marker) {
  if (marker.empty()) throw ConfigError("bad_marker", "marker is empty");

  std::map<std::string, uint64_t> word_freq;
  for (const auto& line : lines) {
    for (auto& w : utf8::SplitWhitespace(line)) {
      if (w.find(marker) != std::string::npos) {
        throw DataError("marker_in_text", "training word '" + w +
                                              "' contains the continuation "
                                              "marker");
      }
      ++word_freq[std::move(w)];
    }
  }

  struct Word {
    std::vector<std::string> syms;
    int64_t freq;
  };
  std::vector<Word> words;
  std::set<std::string> alphabet;
  for (const auto& [w, f] : word_freq) {
    Word word{utf8::SplitCodepoints(w), static_cast<int64_t>(f)};
    alphabet.insert(word.syms.begin(), word.syms.end());
    words.push_back(std::move(word));
  }
  if (vocab_size <= alphabet.size() + kNumSpecials) {
    throw ConfigError("vocab_too_small",
                      "vocab_size must exceed alphabet size + 4 specials (" +
                          std::to_string(alphabet.size() + kNumSpecials) + ")");
  }
  const size_t base = kNumSpecials + 2 * alphabet.size();
  const size_t max_merges = vocab_size > base ? (vocab_size - base) / 2 : 0;

  PairTable table;
  std::map<Merge, std::set<size_t>> where;
  auto account = [&](size_t wi, int64_t sign) {
    const auto& syms = words[wi].syms;
    for (size_t i = 0; i + 1 < syms.size(); ++i) {
      Merge pair{syms[i], syms[i + 1]};
      table.Add(pair, sign * words[wi].freq);
      if (sign > 0) where[pair].insert(wi);
    }
  };
  for (size_t wi = 0; wi < words.size(); ++wi) account(wi, +1);

  SubwordModel model;
  model.marker_ = std::string(marker);
  model.alphabet_.assign(alphabet.begin(), alphabet.end());
  while (model.merges_.size() < max_merges && !table.Empty() &&
         table.TopCount() >= 2) {
    const Merge best = table.Top();
    model.merges_.push_back(best);
    const std::set<size_t> affected = where[best];
    for (size_t wi : affected) {
      account(wi, -1);
      words[wi].syms = ApplyMerge(words[wi].syms, best);
      account(wi, +1);
    }
  }

  for (const char* s : kSpecialTokens) model.tokens_.emplace_back(s);
  for (const auto& ch : model.alphabet_) {
    model.tokens_.push_back(ch);
    model.tokens_.push_back(ch + model.marker_);
  }
  // Different merges can spell the same symbol ("a"+"bc", "ab"+"c"); it gets
  // one pair of entries.
  std::set<std::string> merged;
  for (const auto& [left, right] : model.merges_) {
    if (!merged.insert(left + right).second) continue;
    model.tokens_.push_back(left + right);
    model.tokens_.push_back(left + right + model.marker_);
  }
  model.Index();
  return model;
}

void SubwordModel::Index() {
  entries_.assign(tokens_.size(), Entry{});
  final_ids_.clear();
  continuation_ids_.clear();
  merge_rank_.clear();
  for (uint32_t id = kNumSpecials; id < tokens_.size(); ++id) {
    const std::string& tok = tokens_[id];
    const bool cont = tok.size() > marker_.size() &&
                      tok.compare(tok.size() - marker_.size(), marker_.size(),
                                  marker_) == 0;
    Entry e{cont ? tok.substr(0, tok.size() - marker_.size()) : tok, cont};
    (cont ? continuation_ids_ : final_ids_).emplace(e.symbol, id);
    entries_[id] = std::move(e);
  }
  for (size_t r = 0; r < merges_.size(); ++r) merge_rank_.emplace(merges_[r], r);
}

std::vector<std::string> SubwordModel::SegmentWord(std::string_view word) const {
  std::vector<std::string> syms = utf8::SplitCodepoints(word);
  while (syms.size() > 1) {
    size_t best_rank = merges_.size();
    for (size_t i = 0; i + 1 < syms.size(); ++i) {
      const auto it = merge_rank_.find({syms[i], syms[i + 1]});
      if (it != merge_rank_.end() && it->second < best_rank) {
        best_rank = it->second;
      }
    }
    if (best_rank == merges_.size()) break;
    syms = ApplyMerge(syms, merges_[best_rank]);
  }
  return syms;
}

std::vector<std::string> SubwordModel::EncodePieces(std::string_view text) const {
  std::vector<std::string> pieces;
  for (const auto& word : utf8::SplitWhitespace(text)) {
    const auto syms = SegmentWord(word);
    for (size_t i = 0; i < syms.size(); ++i) {
      pieces.push_back(i + 1 < syms.size() ? syms[i] + marker_ : syms[i]);
    }
  }
  return pieces;
}

std::vector<uint32_t> SubwordModel::Encode(std::string_view text) const {
  std::vector<uint32_t> ids;
  for (const auto& word : utf8::SplitWhitespace(text)) {
    const auto syms = SegmentWord(word);
    for (size_t i = 0; i < syms.size(); ++i) {
      const auto& table = i + 1 < syms.size() ? continuation_ids_ : final_ids_;
      const auto it = table.find(syms[i]);
      ids.push_back(it == table.end() ? kUnkId : it->second);
    }
  }
  return ids;
}

std::string SubwordModel::Decode(std::span<const uint32_t> ids) const {
  std::string out;
  bool at_word_start = true;
  for (uint32_t id : ids) {
    if (id >= tokens_.size()) {
      throw DataError("id_out_of_range",
                      "token id " + std::to_string(id) + " is out of range");
    }
    if (id == kBosId || id == kEosId || id == kPadId) continue;
    if (at_word_start && !out.empty()) out += ' ';
    if (id == kUnkId) {
      out += kUnknownReplacement;
      at_word_start = true;
      continue;
    }
    out += entries_[id].symbol;
    at_word_start = !entries_[id].continuation;
  }
  return out;
}

void SubwordModel::Save(std::ostream& out) const {
  out << kHeaderPrefix << marker_ << '\n';
  for (const auto& [left, right] : merges_) out << left << ' ' << right << '\n';
  for (size_t id = 0; id < tokens_.size(); ++id) {
    out << tokens_[id] << '\t' << id << '\n';
  }
  if (!out) throw IoError("write_failed", "failed writing BPE model");
}

SubwordModel SubwordModel::Load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("bad_magic", "empty BPE model file");
  }
  ChompCr(line);
  if (line.rfind(kHeaderPrefix, 0) != 0 ||
      line.size() == kHeaderPrefix.size()) {
    throw DataError("bad_magic", "missing 'MTFG-BPE v1 marker=' header");
  }
  SubwordModel model;
  model.marker_ = line.substr(kHeaderPrefix.size());
  std::set<std::string> alphabet;
  while (std::getline(in, line)) {
    ChompCr(line);
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      if (!model.tokens_.empty()) {
        throw DataError("corrupt_file", "merge line after vocabulary");
      }
      const auto parts = SplitOn(line, " ");
      if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
        throw DataError("corrupt_file", "bad merge line: " + line);
      }
      model.merges_.emplace_back(parts[0], parts[1]);
      continue;
    }
    const auto id = ParseInt(std::string_view(line).substr(tab + 1));
    if (!id || *id != static_cast<int64_t>(model.tokens_.size())) {
      throw DataError("corrupt_file", "vocabulary ids must be dense: " + line);
    }
    model.tokens_.push_back(line.substr(0, tab));
  }
  if (model.tokens_.size() < kNumSpecials) {
    throw DataError("corrupt_file", "vocabulary is missing specials");
  }
  model.Index();
  for (uint32_t id = kNumSpecials; id < model.tokens_.size(); ++id) {
    const auto& e = model.entries_[id];
    if (!e.continuation && utf8::Decode(e.symbol).size() == 1) {
      alphabet.insert(e.symbol);
    }
  }
  model.alphabet_.assign(alphabet.begin(), alphabet.end());
  return model;
}

}  // namespace mtforge::subword
