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

#include "mtforge/corpus_filter.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mtforge/binary_io.h"
#include "mtforge/error.h"
#include "mtforge/parallel.h"
#include "mtforge/utf8.h"

namespace mtforge::filter {
namespace {

constexpr std::string_view kLidMagic = "MTFG-LID";
constexpr uint16_t kLidVersion = 1;

char32_t MapPunct(char32_t cp) {
  switch (cp) {
    case 0x201C:
    case 0x201D:
    case 0x201E:
    case 0x00AB:
    case 0x00BB:
      return U'"';
    case 0x2018:
    case 0x2019:
      return U'\'';
    case 0x2013:
    case 0x2014:
    case 0x2212:
      return U'-';
    case 0x00A0:
    case 0x2009:
    case 0x202F:
      return U' ';
    default:
      return cp;
  }
}

}  // namespace

std::vector<std::string> CharNgrams(std::string_view text, int max_order) {
  const std::vector<std::string> chars = utf8::SplitCodepoints(text);
  std::vector<std::string> grams;
  for (int n = 1; n <= max_order; ++n) {
    if (chars.size() < static_cast<size_t>(n)) break;
    for (size_t i = 0; i + n <= chars.size(); ++i) {
      std::string g;
      for (int j = 0; j < n; ++j) g += chars[i + j];
      grams.push_back(std::move(g));
    }
  }
  return grams;
}

LidModel LidModel::Train(std::span<const SentenceRecord> labeled,
                         double alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) {
    throw ConfigError("bad_alpha", "LID smoothing alpha must be > 0");
  }
  std::set<std::string> labels;
  for (const auto& r : labeled) labels.insert(r.lang);
  if (labels.size() < 2) {
    throw ConfigError("too_few_classes",
                      "language identification needs at least two labels");
  }

  LidModel model;
  model.alpha_ = alpha;
  model.classes_.assign(labels.begin(), labels.end());
  const size_t num_classes = model.classes_.size();
  auto class_index = [&](const std::string& lang) {
    return static_cast<size_t>(
        std::lower_bound(model.classes_.begin(), model.classes_.end(), lang) -
        model.classes_.begin());
  };

  std::vector<double> docs(num_classes, 0.0);
  std::vector<double> totals(num_classes, 0.0);
  std::map<std::string, std::vector<double>> counts;
  for (const auto& r : labeled) {
    if (r.text.empty()) {
      throw DataError("empty_record", "LID training record at line " +
                                          std::to_string(r.line_no) +
                                          " has empty text");
    }
    const size_t c = class_index(r.lang);
    docs[c] += 1;
    for (auto& g : CharNgrams(r.text, kLidMaxOrder)) {
      auto& row = counts[std::move(g)];
      if (row.empty()) row.assign(num_classes, 0.0);
      row[c] += 1;
      totals[c] += 1;
    }
  }

  const double n_docs = static_cast<double>(labeled.size());
  const double event_space = static_cast<double>(counts.size()) + 1.0;
  model.log_priors_.resize(num_classes);
  model.unseen_log_probs_.resize(num_classes);
  std::vector<double> log_denominators(num_classes);
  for (size_t c = 0; c < num_classes; ++c) {
    model.log_priors_[c] = std::log(docs[c] / n_docs);
    log_denominators[c] = std::log(totals[c] + alpha * event_space);
    model.unseen_log_probs_[c] = std::log(alpha) - log_denominators[c];
  }
  model.log_probs_.reserve(counts.size());
  for (const auto& [gram, row] : counts) {
    std::vector<double> lp(num_classes);
    for (size_t c = 0; c < num_classes; ++c) {
      lp[c] = std::log(row[c] + alpha) - log_denominators[c];
    }
    model.log_probs_.emplace(gram, std::move(lp));
  }
  return model;
}

double LidModel::LogProb(size_t c, const std::string& ngram) const {
  const auto it = log_probs_.find(ngram);
  return it == log_probs_.end() ? unseen_log_probs_[c] : it->second[c];
}

std::vector<double> LidModel::LogScores(std::string_view text) const {
  std::vector<double> scores = log_priors_;
  for (const auto& g : CharNgrams(text, kLidMaxOrder)) {
    const auto it = log_probs_.find(g);
    const std::vector<double>& lp =
        it == log_probs_.end() ? unseen_log_probs_ : it->second;
    for (size_t c = 0; c < scores.size(); ++c) scores[c] += lp[c];
  }
  return scores;
}

const std::string& LidModel::Predict(std::string_view text) const {
  const auto scores = LogScores(text);
  size_t best = 0;
  for (size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return classes_[best];
}

bool LidModel::HasClass(std::string_view lang) const {
  return std::binary_search(classes_.begin(), classes_.end(), lang);
}

void LidModel::Save(std::ostream& out) const {
  binio::WriteMagic(out, kLidMagic);
  binio::WriteUint<uint16_t>(out, kLidVersion);
  binio::WriteF64(out, alpha_);
  binio::WriteUint<uint32_t>(out, static_cast<uint32_t>(classes_.size()));
  for (size_t c = 0; c < classes_.size(); ++c) {
    binio::WriteString(out, classes_[c]);
    binio::WriteF64(out, log_priors_[c]);
    binio::WriteF64(out, unseen_log_probs_[c]);
  }
  std::vector<const std::string*> keys;
  keys.reserve(log_probs_.size());
  for (const auto& kv : log_probs_) keys.push_back(&kv.first);
  std::sort(keys.begin(), keys.end(),
            [](const auto* a, const auto* b) { return *a < *b; });
  binio::WriteUint<uint64_t>(out, keys.size());
  for (const auto* key : keys) {
    binio::WriteString(out, *key);
    for (double v : log_probs_.at(*key)) binio::WriteF64(out, v);
  }
  if (!out) throw IoError("write_failed", "failed writing LID model");
}

LidModel LidModel::Load(std::istream& in) {
  binio::ExpectMagic(in, kLidMagic);
  if (binio::ReadUint<uint16_t>(in) != kLidVersion) {
    throw DataError("bad_version", "unsupported LID model version");
  }
  LidModel model;
  model.alpha_ = binio::ReadF64(in);
  const auto num_classes = binio::ReadUint<uint32_t>(in);
  if (num_classes < 2 || num_classes > 4096) {
    throw DataError("corrupt_file", "bad LID class count");
  }
  for (uint32_t c = 0; c < num_classes; ++c) {
    model.classes_.push_back(binio::ReadString(in));
    model.log_priors_.push_back(binio::ReadF64(in));
    model.unseen_log_probs_.push_back(binio::ReadF64(in));
  }
  if (!std::is_sorted(model.classes_.begin(), model.classes_.end())) {
    throw DataError("corrupt_file", "LID classes are not sorted");
  }
  const auto n = binio::ReadUint<uint64_t>(in);
  model.log_probs_.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    std::string key = binio::ReadString(in);
    std::vector<double> lp(num_classes);
    for (auto& v : lp) v = binio::ReadF64(in);
    model.log_probs_.emplace(std::move(key), std::move(lp));
  }
  return model;
}

std::vector<SentenceRecord> LidFilter(std::span<const SentenceRecord> records,
                                      const LidModel& model,
                                      std::string_view expected_lang,
                                      bool bypass, int workers) {
  if (bypass) return {records.begin(), records.end()};
  if (!model.HasClass(expected_lang)) {
    throw ConfigError("unknown_lang", "language '" + std::string(expected_lang) +
                                          "' is not a class of the LID model");
  }
  std::vector<char> keep(records.size(), 0);
  ParallelFor(records.size(), workers, [&](size_t i) {
    keep[i] = model.Predict(records[i].text) == expected_lang;
  });
  std::vector<SentenceRecord> out;
  for (size_t i = 0; i < records.size(); ++i) {
    if (keep[i]) out.push_back(records[i]);
  }
  return out;
}

std::vector<ParallelRecord> LidFilterPairs(
    std::span<const ParallelRecord> pairs, const LidModel& model,
    std::string_view expected_src, bool bypass_src,
    std::string_view expected_tgt, bool bypass_tgt, int workers) {
  for (auto [lang, bypass] : {std::pair{expected_src, bypass_src},
                              std::pair{expected_tgt, bypass_tgt}}) {
    if (!bypass && !model.HasClass(lang)) {
      throw ConfigError("unknown_lang", "language '" + std::string(lang) +
                                            "' is not a class of the LID "
                                            "model");
    }
  }
  std::vector<char> keep(pairs.size(), 0);
  ParallelFor(pairs.size(), workers, [&](size_t i) {
    keep[i] = (bypass_src || model.Predict(pairs[i].src.text) == expected_src) &&
              (bypass_tgt || model.Predict(pairs[i].tgt.text) == expected_tgt);
  });
  std::vector<ParallelRecord> out;
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (keep[i]) out.push_back(pairs[i]);
  }
  return out;
}

std::string NormalizePunct(std::string_view text) {
  std::u32string mapped;
  mapped.reserve(text.size());
  for (char32_t cp : utf8::Decode(text)) {
    cp = MapPunct(cp);
    if (cp == U' ' && (mapped.empty() || mapped.back() == U' ')) continue;
    mapped.push_back(cp);
  }
  if (!mapped.empty() && mapped.back() == U' ') mapped.pop_back();
  return utf8::Encode(mapped);
}

size_t WordCount(std::string_view text) {
  return utf8::SplitWhitespace(text).size();
}

bool PassesLengthRatio(const ParallelRecord& pair, int max_len,
                       double max_ratio) {
  const size_t a = WordCount(pair.src.text);
  const size_t b = WordCount(pair.tgt.text);
  if (a == 0 || b == 0) return false;
  const auto limit = static_cast<size_t>(max_len);
  if (a > limit || b > limit) return false;
  const double longer = static_cast<double>(std::max(a, b));
  const double shorter = static_cast<double>(std::min(a, b));
  return longer / shorter <= max_ratio;
}

std::vector<ParallelRecord> LengthRatioFilter(
    std::span<const ParallelRecord> pairs, int max_len, double max_ratio) {
  if (max_len < 1) throw ConfigError("bad_max_len", "max_len must be >= 1");
  if (!(max_ratio >= 1.0)) {
    throw ConfigError("bad_max_ratio", "max_ratio must be >= 1");
  }
  std::vector<ParallelRecord> out;
  for (const auto& p : pairs) {
    if (PassesLengthRatio(p, max_len, max_ratio)) out.push_back(p);
  }
  return out;
}

}  // namespace mtforge::filter
