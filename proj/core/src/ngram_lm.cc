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

#include "mtforge/ngram_lm.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mtforge/binary_io.h"
#include "mtforge/error.h"
#include "mtforge/utf8.h"

namespace mtforge::lm {
namespace {

constexpr std::string_view kMagic = "MTFG-NGLM";
constexpr uint16_t kVersion = 1;

using NgramCounts = std::unordered_map<Context, double, ContextHash>;

struct ContextStats {
  double total = 0.0;
  double types = 0.0;
};

}  // namespace

NGramModel NGramModel::Train(std::span<const SentenceRecord> corpus, int order,
                             double discount) {
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(corpus.size());
  for (const auto& r : corpus) sentences.push_back(utf8::SplitWhitespace(r.text));
  return Train(sentences, order, discount);
}

NGramModel NGramModel::Train(
    std::span<const std::vector<std::string>> sentences, int order,
    double discount) {
  if (sentences.empty()) {
    throw ConfigError("empty_corpus", "cannot train an LM on an empty corpus");
  }
  if (order < 1 || order > kMaxOrder) {
    throw ConfigError("bad_order", "LM order must be in [1, 8]");
  }
  if (!(discount > 0.0 && discount < 1.0)) {
    throw ConfigError("bad_discount", "KN discount must be in (0, 1)");
  }

  NGramModel model;
  model.order_ = order;
  model.discount_ = discount;

  std::set<std::string> words;
  for (const auto& s : sentences) {
    for (const auto& w : s) {
      if (w != kBosToken && w != kEosToken && w != kUnkToken) words.insert(w);
    }
  }
  model.vocab_ = {std::string(kBosToken), std::string(kEosToken),
                  std::string(kUnkToken)};
  model.vocab_.insert(model.vocab_.end(), words.begin(), words.end());
  for (uint32_t id = 0; id < model.vocab_.size(); ++id) {
    model.word_ids_.emplace(model.vocab_[id], id);
  }

  // levels[k] holds counts of (k+1)-grams.
  std::vector<NgramCounts> levels(order);
  for (const auto& s : sentences) {
    Context padded(order - 1, kBosId);
    for (const auto& w : s) padded.push_back(model.WordId(w));
    padded.push_back(kEosId);
    for (size_t i = order - 1; i < padded.size(); ++i) {
      Context gram(padded.begin() + (i - (order - 1)), padded.begin() + i + 1);
      levels[order - 1][gram] += 1.0;
    }
  }
  for (int k = order - 1; k >= 1; --k) {
    for (const auto& entry : levels[k]) {
      Context suffix(entry.first.begin() + 1, entry.first.end());
      levels[k - 1][suffix] += 1.0;
    }
  }

  const double vocab_size = static_cast<double>(model.vocab_.size() - 1);
  for (int k = 0; k < order; ++k) {
    std::unordered_map<Context, ContextStats, ContextHash> stats;
    for (const auto& [gram, count] : levels[k]) {
      auto& st = stats[Context(gram.begin(), gram.end() - 1)];
      st.total += count;
      st.types += 1.0;
    }
    for (const auto& [ctx, st] : stats) {
      model.contexts_[ctx].backoff = discount * st.types / st.total;
    }
    for (const auto& [gram, count] : levels[k]) {
      Context ctx(gram.begin(), gram.end() - 1);
      const uint32_t w = gram.back();
      const auto& st = stats.at(ctx);
      double lower;
      if (k == 0) {
        lower = 1.0 / vocab_size;
      } else {
        lower = model.ProbExact(std::span<const uint32_t>(ctx).subspan(1), w);
      }
      model.contexts_[ctx].probs[w] =
          std::max(count - discount, 0.0) / st.total +
          model.contexts_[ctx].backoff * lower;
    }
    if (k == 0) {
      // Unigram level covers the whole predictable vocabulary, including
      // words that never follow anything (at minimum <unk>).
      auto& unigram = model.contexts_[Context{}];
      model.unigram_floor_ = unigram.backoff / vocab_size;
      for (uint32_t id = 1; id < model.vocab_.size(); ++id) {
        unigram.probs.try_emplace(id, model.unigram_floor_);
      }
    }
  }
  return model;
}

uint32_t NGramModel::WordId(std::string_view word) const {
  const auto it = word_ids_.find(std::string(word));
  if (it == word_ids_.end() || it->second == kBosId || it->second == kEosId) {
    return kUnkId;
  }
  return it->second;
}

double NGramModel::Prob(std::span<const uint32_t> history,
                        uint32_t word) const {
  const size_t ctx_len = static_cast<size_t>(order_ - 1);
  Context ctx(ctx_len, kBosId);
  const size_t take = std::min(ctx_len, history.size());
  std::copy(history.end() - take, history.end(), ctx.end() - take);
  return ProbExact(ctx, word);
}

double NGramModel::ProbExact(std::span<const uint32_t> ctx,
                             uint32_t word) const {
  double scale = 1.0;
  for (size_t len = ctx.size() + 1; len-- > 0;) {
    const Context h(ctx.end() - len, ctx.end());
    const auto it = contexts_.find(h);
    if (it == contexts_.end()) continue;
    const auto pit = it->second.probs.find(word);
    if (pit != it->second.probs.end()) return scale * pit->second;
    scale *= it->second.backoff;
  }
  return scale * unigram_floor_;
}

double NGramModel::CrossEntropy(std::span<const std::string> tokens) const {
  Context history(order_ - 1, kBosId);
  double total = 0.0;
  for (size_t i = 0; i <= tokens.size(); ++i) {
    const uint32_t w = i < tokens.size() ? WordId(tokens[i]) : kEosId;
    total -= std::log(Prob(history, w));
    if (!history.empty()) {
      history.erase(history.begin());
      history.push_back(w);
    }
  }
  return total / static_cast<double>(tokens.size() + 1);
}

double NGramModel::CrossEntropy(std::string_view text) const {
  const auto tokens = utf8::SplitWhitespace(text);
  return CrossEntropy(tokens);
}

void NGramModel::Save(std::ostream& out) const {
  binio::WriteMagic(out, kMagic);
  binio::WriteUint<uint16_t>(out, kVersion);
  binio::WriteUint<uint32_t>(out, static_cast<uint32_t>(order_));
  binio::WriteF64(out, discount_);
  binio::WriteF64(out, unigram_floor_);
  binio::WriteUint<uint32_t>(out, static_cast<uint32_t>(vocab_.size()));
  for (const auto& w : vocab_) binio::WriteString(out, w);

  // Contexts ordered by (length, ids) so the file is byte-stable.
  std::vector<const Context*> keys;
  keys.reserve(contexts_.size());
  for (const auto& kv : contexts_) keys.push_back(&kv.first);
  std::sort(keys.begin(), keys.end(), [](const Context* a, const Context* b) {
    if (a->size() != b->size()) return a->size() < b->size();
    return *a < *b;
  });
  binio::WriteUint<uint32_t>(out, static_cast<uint32_t>(keys.size()));
  uint64_t num_triples = 0;
  for (const Context* key : keys) {
    binio::WriteUint<uint8_t>(out, static_cast<uint8_t>(key->size()));
    for (uint32_t id : *key) binio::WriteUint<uint32_t>(out, id);
    binio::WriteF64(out, contexts_.at(*key).backoff);
    num_triples += contexts_.at(*key).probs.size();
  }
  binio::WriteUint<uint64_t>(out, num_triples);
  for (uint32_t ctx_id = 0; ctx_id < keys.size(); ++ctx_id) {
    std::map<uint32_t, double> sorted(contexts_.at(*keys[ctx_id]).probs.begin(),
                                      contexts_.at(*keys[ctx_id]).probs.end());
    for (const auto& [word, p] : sorted) {
      binio::WriteUint<uint32_t>(out, ctx_id);
      binio::WriteUint<uint32_t>(out, word);
      binio::WriteF64(out, p);
    }
  }
  if (!out) throw IoError("write_failed", "failed writing LM");
}

NGramModel NGramModel::Load(std::istream& in) {
  binio::ExpectMagic(in, kMagic);
  if (binio::ReadUint<uint16_t>(in) != kVersion) {
    throw DataError("bad_version", "unsupported LM version");
  }
  NGramModel model;
  model.order_ = static_cast<int>(binio::ReadUint<uint32_t>(in));
  if (model.order_ < 1 || model.order_ > kMaxOrder) {
    throw DataError("corrupt_file", "bad LM order");
  }
  model.discount_ = binio::ReadF64(in);
  model.unigram_floor_ = binio::ReadF64(in);
  const auto vocab_size = binio::ReadUint<uint32_t>(in);
  if (vocab_size < 3) throw DataError("corrupt_file", "LM vocab too small");
  model.vocab_.reserve(vocab_size);
  for (uint32_t i = 0; i < vocab_size; ++i) {
    model.vocab_.push_back(binio::ReadString(in));
    model.word_ids_.emplace(model.vocab_.back(), i);
  }
  const auto num_contexts = binio::ReadUint<uint32_t>(in);
  std::vector<Context> keys;
  keys.reserve(num_contexts);
  for (uint32_t c = 0; c < num_contexts; ++c) {
    const auto len = binio::ReadUint<uint8_t>(in);
    if (len >= model.order_) throw DataError("corrupt_file", "context too long");
    Context ctx(len);
    for (auto& id : ctx) {
      id = binio::ReadUint<uint32_t>(in);
      if (id >= vocab_size) throw DataError("corrupt_file", "bad word id");
    }
    model.contexts_[ctx].backoff = binio::ReadF64(in);
    keys.push_back(std::move(ctx));
  }
  const auto num_triples = binio::ReadUint<uint64_t>(in);
  for (uint64_t t = 0; t < num_triples; ++t) {
    const auto ctx_id = binio::ReadUint<uint32_t>(in);
    const auto word = binio::ReadUint<uint32_t>(in);
    const double p = binio::ReadF64(in);
    if (ctx_id >= keys.size() || word >= vocab_size) {
      throw DataError("corrupt_file", "bad n-gram triple");
    }
    model.contexts_[keys[ctx_id]].probs[word] = p;
  }
  return model;
}

}  // namespace mtforge::lm
