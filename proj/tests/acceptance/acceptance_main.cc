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


// Prints one PASS/FAIL line per acceptance criterion. `--only N` runs a
// single criterion. The exit status is nonzero if any selected criterion
// fails or exceeds its time limit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "json.hpp"
#include "mtforge/checkpoint.h"
#include "mtforge/corpus_filter.h"
#include "mtforge/data_select.h"
#include "mtforge/metrics.h"
#include "mtforge/mine.h"
#include "mtforge/moe_router.h"
#include "mtforge/ngram_lm.h"
#include "mtforge/postprocess.h"
#include "mtforge/rerank.h"
#include "mtforge/shard.h"
#include "mtforge/subword.h"
#include "oracles.h"
#include "pipeline.h"
#include "test_support.h"

namespace mtforge::acceptance {
namespace {

using namespace ::mtforge::testing;  // NOLINT

// Tolerances and sizes.
constexpr double kWeightSumTol = 1e-9;
constexpr double kGradRelTol = 1e-5;
constexpr double kGradStep = 1e-4;
constexpr double kUniformLossTol = 1e-9;
constexpr double kRerankGap = 0.1;
constexpr int kGridSteps = 21;
constexpr double kBleuRefTol = 0.01;
constexpr double kCkptTol = 1e-12;
constexpr double kTemperatureTol = 1e-4;

// Collects failed checks; the first few are reported.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) failures_.push_back(what);
  }
  bool ok() const { return failures_.empty(); }
  std::string Summary() const {
    if (ok()) return std::to_string(checks_) + " checks";
    std::string s = std::to_string(failures_.size()) + "/" + std::to_string(checks_) +
                    " checks failed: " + failures_[0];
    if (failures_.size() > 1) s += "; " + failures_[1];
    return s;
  }

 private:
  size_t checks_ = 0;
  std::vector<std::string> failures_;
};

std::string Fmt(double v) {
  std::ostringstream o;
  o.precision(10);
  o << v;
  return o.str();
}

// 1. Default config equals the published constants.
void ConfigDefaults(Checker& c) {
  const auto run = RunMtforge({"config-dump"});
  c.Expect(run.code == 0, "config-dump exit " + std::to_string(run.code));
  c.Expect(run.out == ReadFile(std::string(MTFORGE_GOLDEN_DIR) + "/default_config.json"),
           "config-dump differs from golden");
  const auto j = nlohmann::json::parse(run.out);
  c.Expect(j["filter"]["max_len"] == 250, "max_len");
  c.Expect(j["filter"]["max_ratio"] == 3.0, "max_ratio");
  c.Expect(j["select"]["select_threshold"] == 0.01, "select_threshold");
  c.Expect(j["subword"]["T"] == 5.0, "T");
  c.Expect(j["moe"]["top_k"] == 2, "top_k");
  c.Expect(j["moe"]["capacity_factor"] == 2.0, "capacity_factor");
  c.Expect(j["moe"]["gate_loss_weight"] == 0.01, "gate_loss_weight");
  c.Expect(j["ckpt"]["avg_last"] == 5, "avg_last");
  c.Expect(j["rerank"]["tune_trials"] == 1000, "tune_trials");
  c.Expect(j["rerank"]["tune_bounds"] == nlohmann::json::array({0.0, 2.0}), "tune_bounds");
}

std::vector<std::vector<std::string>> GeneratorSentences(std::mt19937_64& rng,
                                                         const std::string& prefix, int n) {
  std::vector<std::vector<std::string>> out;
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> s;
    const int len = 2 + static_cast<int>(rng() % 9);
    for (int j = 0; j < len; ++j) s.push_back(prefix + std::to_string(rng() % 30));
    out.push_back(std::move(s));
  }
  return out;
}

std::string Join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
  return s;
}

// 2. Moore-Lewis selection against a string-keyed LM oracle.
void MooreLewis(Checker& c) {
  std::mt19937_64 rng(2024);
  const auto news_train = GeneratorSentences(rng, "n", 400);
  const auto gen_train = GeneratorSentences(rng, "g", 400);
  const auto news_lm = lm::NGramModel::Train(news_train, 3, 0.75);
  const auto gen_lm = lm::NGramModel::Train(gen_train, 3, 0.75);
  const ReferenceKn news_ref(news_train, 3, 0.75);
  const ReferenceKn gen_ref(gen_train, 3, 0.75);

  std::vector<SentenceRecord> corpus;
  std::vector<std::vector<std::string>> tokens;
  for (int i = 0; i < 2000; ++i) {
    const bool news = rng() % 2 == 0;
    auto s = GeneratorSentences(rng, news ? "n" : "g", 1)[0];
    corpus.push_back({Join(s), "en", news ? "news" : "general", static_cast<uint64_t>(i)});
    tokens.push_back(std::move(s));
  }
  select::SelectionConfig cfg;
  cfg.in_domain_lm = &news_lm;
  cfg.general_lm = &gen_lm;

  auto oracle = [&](double threshold) {
    std::vector<SentenceRecord> kept;
    for (size_t i = 0; i < corpus.size(); ++i) {
      const double score = news_ref.CrossEntropy(tokens[i]) - gen_ref.CrossEntropy(tokens[i]);
      if (score < -threshold) kept.push_back(corpus[i]);
    }
    return kept;
  };
  const auto result = select::Select(cfg, corpus);
  c.Expect(result.kept == oracle(cfg.threshold), "selection differs from oracle");
  size_t news_count = 0;
  for (const auto& r : result.kept) news_count += r.origin == "news";
  c.Expect(news_count == result.kept.size(), "selected a general sentence");

  std::uniform_real_distribution<double> dist(-2.0, 8.0);
  std::vector<double> thresholds;
  for (int i = 0; i < 20; ++i) thresholds.push_back(dist(rng));
  std::sort(thresholds.begin(), thresholds.end());
  std::vector<SentenceRecord> previous = corpus;
  for (double t : thresholds) {
    cfg.threshold = t;
    const auto kept = select::Select(cfg, corpus, 2).kept;
    c.Expect(kept == oracle(t), "oracle mismatch at threshold " + Fmt(t));
    std::set<uint64_t> prev_lines;
    for (const auto& r : previous) prev_lines.insert(r.line_no);
    bool subset = true;
    for (const auto& r : kept) subset = subset && prev_lines.contains(r.line_no);
    c.Expect(subset, "selection grew at threshold " + Fmt(t));
    previous = kept;
  }
}

// 3. Mining equals the all-pairs oracle.
void Mining(Checker& c) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.2);
  for (int inst = 0; inst < 50; ++inst) {
    const size_t n = 10 + rng() % 191;
    const size_t m = 10 + rng() % 191;
    const size_t d = 16;
    auto src_rows = RandomUnitRows(rng, n, d);
    auto tgt_rows = RandomUnitRows(rng, m, d);
    for (size_t p = 0; p < std::min(n, m) / 2; ++p) {
      const size_t i = rng() % n, j = rng() % m;
      for (size_t k = 0; k < d; ++k) tgt_rows[j * d + k] = src_rows[i * d + k] + noise(rng);
    }
    const auto src = mine::EmbeddingSet::FromRows(NumberedIds("s", n), src_rows, d);
    const auto tgt =
        mine::EmbeddingSet::FromRows(NumberedIds("t", m), tgt_rows, d, "", true);
    const auto got = mine::MinePairs(src, tgt, mine::kDefaultK, mine::kDefaultThreshold);
    const auto want = BruteForceMine(src, tgt, mine::kDefaultK, mine::kDefaultThreshold);
    c.Expect(got == want, "instance " + std::to_string(inst) + " (" + std::to_string(n) +
                              "x" + std::to_string(m) + ") differs from oracle");
  }
}

// 4. Capacity, renormalization, gradient and uniform loss.
void MoeRouting(Checker& c) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 2.0);
  auto random_logits = [&](size_t t, size_t e) {
    Matrix m(t, e);
    for (double& v : m.data()) v = normal(rng);
    return m;
  };
  for (int inst = 0; inst < 500; ++inst) {
    const int e = 2 + static_cast<int>(rng() % 15);
    const size_t t = 1 + rng() % 64;
    moe::RouterConfig cfg;
    cfg.num_experts = e;
    cfg.capacity_factor = 0.25 + static_cast<double>(rng() % 400) / 100.0;
    const auto r = moe::Route(random_logits(t, e), cfg);
    const auto cap = static_cast<int64_t>(std::ceil(cfg.capacity_factor * t / e));
    for (int64_t load : r.expert_load) {
      c.Expect(load <= cap, "load " + std::to_string(load) + " > " + std::to_string(cap));
    }
    for (size_t i = 0; i < t; ++i) {
      double sum = 0.0;
      for (const auto& a : r.assignments[i]) sum += a.weight;
      c.Expect(r.assignments[i].size() <= 2, "more than two assignments");
      c.Expect(static_cast<bool>(r.dropped[i]) == r.assignments[i].empty(), "dropped flag");
      if (!r.assignments[i].empty()) {
        c.Expect(std::abs(sum - 1.0) <= kWeightSumTol, "weights sum to " + Fmt(sum));
      }
    }
  }
  for (int inst = 0; inst < 100; ++inst) {
    const int e = 2 + static_cast<int>(rng() % 15);
    const auto logits = random_logits(1 + rng() % 16, e);
    const auto top1 = moe::Route(logits, {e, 2, 2.0, 0.01}).top1;
    const double err =
        RelativeError(moe::GateLossGrad(logits), FiniteDifferenceGrad(logits, top1, kGradStep));
    c.Expect(err <= kGradRelTol, "gradient relative error " + Fmt(err));
  }
  for (int e = 2; e <= 16; ++e) {
    const Matrix uniform(e, e, 0.0);
    std::vector<int> top1(e);
    std::iota(top1.begin(), top1.end(), 0);
    const double loss = moe::GateLoss(moe::RowSoftmax(uniform), top1);
    c.Expect(std::abs(loss - 1.0) <= kUniformLossTol, "uniform l_aux " + Fmt(loss));
  }
}

// 5. Random-search tuning against the exhaustive grid.
void RerankTuning(Checker& c) {
  std::ifstream in(FixturePath("rerank/dev.nbest"));
  const auto nbest = rerank::ParseNBest(in);
  const auto refs = ReadLines(FixturePath("rerank/dev.ref"));
  c.Expect(nbest.segments.size() == 20, "fixture has 20 segments");
  const uint64_t seed = 1;
  const auto tuned = rerank::Tune(nbest, refs, rerank::kDefaultTrials, {}, seed, 1);
  const double baseline = rerank::BleuObjective(nbest, refs).Evaluate({});
  const auto grid = GridSearch(nbest, refs, 0.0, 2.0, kGridSteps);
  c.Expect(tuned.bleu >= baseline,
           "tuned " + Fmt(tuned.bleu) + " < baseline " + Fmt(baseline));
  c.Expect(tuned.bleu >= grid.bleu - kRerankGap,
           "tuned " + Fmt(tuned.bleu) + " vs grid " + Fmt(grid.bleu));
  const auto again = rerank::Tune(nbest, refs, rerank::kDefaultTrials, {}, seed, 1);
  const auto parallel = rerank::Tune(nbest, refs, rerank::kDefaultTrials, {}, seed, 4);
  c.Expect(again.weights == tuned.weights, "weights differ across runs");
  c.Expect(parallel.weights == tuned.weights, "weights differ across worker counts");
  c.Expect(parallel.trial_bleu == tuned.trial_bleu, "trial scores differ across workers");
}

// 6. BLEU fixtures.
void BleuCorrectness(Checker& c) {
  using metrics::TokenizeScheme;
  const auto hyps = ReadLines(FixturePath("bleu/hyp.txt"));
  const auto refs = ReadLines(FixturePath("bleu/ref.txt"));
  const double identity = metrics::CorpusBleu(refs, refs, TokenizeScheme::kIntl);
  c.Expect(metrics::FormatBleu(identity) == "BLEU = 100.00", "identity " + Fmt(identity));
  const auto clipped =
      metrics::ComputeStats(metrics::Tokenize("the the the the the the the", TokenizeScheme::kIntl),
                            metrics::Tokenize("the cat is on the mat", TokenizeScheme::kIntl));
  c.Expect(clipped.matches[0] == 2 && clipped.totals[0] == 7, "clipped p1 != 2/7");
  const double bleu = metrics::CorpusBleu(hyps, refs, TokenizeScheme::kIntl);
  c.Expect(std::abs(bleu - kFrozenFixtureBleu) <= kBleuRefTol,
           "fixture " + Fmt(bleu) + " vs " + Fmt(kFrozenFixtureBleu));
}

ckpt::TensorBundle RandomBundle(std::mt19937_64& rng, size_t params, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  ckpt::TensorBundle b;
  const size_t first = params / 3;
  std::vector<double> a(first), rest(params - first);
  for (double& v : a) v = dist(rng);
  for (double& v : rest) v = dist(rng);
  b.Add({"encoder.w", {first}, std::move(a)});
  b.Add({"decoder.w", {params - first}, std::move(rest)});
  return b;
}

// 7. Checkpoint averaging properties and the last-5 window.
void Checkpoints(Checker& c) {
  std::mt19937_64 rng(7);
  for (size_t params : {size_t{10}, size_t{1000}, size_t{1000000}}) {
    std::vector<ckpt::TensorBundle> bundles;
    for (int i = 0; i < 5; ++i) bundles.push_back(RandomBundle(rng, params, -1.0, 1.0));
    const std::vector<ckpt::TensorBundle> one = {bundles[0]};
    c.Expect(ckpt::Average(one) == bundles[0], "identity");

    ckpt::TensorBundle zeros, twos, ones;
    for (const auto& t : bundles[0].tensors()) {
      zeros.Add({t.name, t.shape, std::vector<double>(t.data.size(), 0.0)});
      twos.Add({t.name, t.shape, std::vector<double>(t.data.size(), 2.0)});
      ones.Add({t.name, t.shape, std::vector<double>(t.data.size(), 1.0)});
    }
    const std::vector<ckpt::TensorBundle> pair = {zeros, twos};
    c.Expect(ckpt::Average(pair) == ones, "midpoint");

    const double a = 3.5, b = -0.25;
    std::vector<ckpt::TensorBundle> mapped;
    for (const auto& x : bundles) {
      ckpt::TensorBundle y;
      for (auto t : x.tensors()) {
        for (double& v : t.data) v = a * v + b;
        y.Add(std::move(t));
      }
      mapped.push_back(std::move(y));
    }
    const auto avg = ckpt::Average(bundles);
    const auto avg_mapped = ckpt::Average(mapped);
    double lin_err = 0.0;
    bool bounded = true;
    for (size_t ti = 0; ti < avg.tensors().size(); ++ti) {
      const auto& at = avg.tensors()[ti].data;
      for (size_t j = 0; j < at.size(); ++j) {
        lin_err = std::max(lin_err, std::abs(avg_mapped.tensors()[ti].data[j] - (a * at[j] + b)));
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& x : bundles) {
          lo = std::min(lo, x.tensors()[ti].data[j]);
          hi = std::max(hi, x.tensors()[ti].data[j]);
        }
        bounded = bounded && at[j] >= lo && at[j] <= hi;
      }
    }
    c.Expect(lin_err <= kCkptTol, "linearity error " + Fmt(lin_err));
    c.Expect(bounded, "average leaves [min, max]");
  }

  // Window: ckpt-avg over six saved checkpoints averages the last five.
  TempDir dir;
  std::vector<std::string> paths;
  std::vector<ckpt::TensorBundle> saved;
  for (int i = 1; i <= 6; ++i) {
    paths.push_back(dir / ("c" + std::to_string(i) + ".bin"));
    WriteCheckpoint(paths.back(), i);
    std::ifstream in(paths.back(), std::ios::binary);
    saved.push_back(ckpt::TensorBundle::Load(in));
  }
  c.Expect(ckpt::LastK(paths) ==
               std::vector<std::string>(paths.begin() + 1, paths.end()),
           "last-5 window");
  std::vector<std::string> args = {"ckpt-avg"};
  args.insert(args.end(), paths.begin(), paths.end());
  args.insert(args.end(), {"--out", dir / "avg.bin"});
  const auto run = RunMtforge(args);
  c.Expect(run.code == 0, "ckpt-avg failed: " + run.err);
  std::ifstream in(dir / "avg.bin", std::ios::binary);
  const auto got = ckpt::TensorBundle::Load(in);
  const auto want = ckpt::Average(std::span<const ckpt::TensorBundle>(saved).subspan(1));
  double err = 0.0;
  for (size_t ti = 0; ti < want.tensors().size(); ++ti) {
    for (size_t j = 0; j < want.tensors()[ti].data.size(); ++j) {
      err = std::max(err, std::abs(got.tensors()[ti].data[j] - want.tensors()[ti].data[j]));
    }
  }
  c.Expect(err <= 1e-6, "ckpt-avg output differs from last-5 average by " + Fmt(err));
}

// 8. Subword round trips, temperature and the first merge.
void Subword(Checker& c) {
  std::vector<std::string> lines;
  for (const char* f : {"spm_de.txt", "spm_en.txt", "spm_ha.txt"}) {
    const auto part = ReadLines(FixturePath(std::string("pipeline/") + f));
    lines.insert(lines.end(), part.begin(), part.end());
  }
  const auto model = subword::SubwordModel::Learn(lines, 400);
  const auto& alphabet = model.alphabet();
  std::mt19937_64 rng(8);
  size_t failures = 0;
  std::string first_failure;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    const int words = 1 + static_cast<int>(rng() % 8);
    for (int w = 0; w < words; ++w) {
      if (w) s += ' ';
      const int len = 1 + static_cast<int>(rng() % 10);
      for (int k = 0; k < len; ++k) s += alphabet[rng() % alphabet.size()];
    }
    if (model.Decode(model.Encode(s)) != s) {
      if (failures++ == 0) first_failure = s;
    }
  }
  c.Expect(failures == 0, std::to_string(failures) + " round trips failed, e.g. [" +
                              first_failure + "]");
  const auto probs = subword::TemperatureProbs({{"a", 90}, {"b", 10}}, 5.0);
  c.Expect(std::abs(probs.at("a") - 0.6082) <= kTemperatureTol, "p_a " + Fmt(probs.at("a")));
  c.Expect(std::abs(probs.at("b") - 0.3918) <= kTemperatureTol, "p_b " + Fmt(probs.at("b")));
  const std::vector<std::string> abab = {"abab abab"};
  const auto small = subword::SubwordModel::Learn(abab, 100);
  c.Expect(!small.merges().empty() &&
               small.merges()[0] == subword::SubwordModel::Merge("a", "b"),
           "first merge is not (a, b)");
}

// 9. Pipeline determinism, filter boundaries, postprocess idempotence.
void Determinism(Checker& c) {
  TempDir a, b, d;
  const auto first = RunMiniPipeline(a, 1);
  const auto second = RunMiniPipeline(b, 1);
  const auto threaded = RunMiniPipeline(d, 4);
  for (const auto* run : {&first, &second, &threaded}) {
    c.Expect(run->failures.empty(),
             "pipeline step failed: " + (run->failures.empty() ? "" : run->failures[0]));
  }
  for (const auto& [name, bytes] : first.artifacts) {
    c.Expect(second.artifacts.at(name) == bytes, name + " differs across runs");
    c.Expect(threaded.artifacts.at(name) == bytes, name + " differs across worker counts");
  }

  auto pair = [](size_t src_words, size_t tgt_words) {
    auto words = [](size_t n) {
      std::string s;
      for (size_t i = 0; i < n; ++i) s += i ? " w" : "w";
      return s;
    };
    ParallelRecord p;
    p.src.text = words(src_words);
    p.tgt.text = words(tgt_words);
    return p;
  };
  const int len = filter::kDefaultMaxLen;
  const double ratio = filter::kDefaultMaxRatio;
  c.Expect(filter::PassesLengthRatio(pair(250, 250), len, ratio), "250 words dropped");
  c.Expect(!filter::PassesLengthRatio(pair(251, 250), len, ratio), "251 words kept");
  c.Expect(!filter::PassesLengthRatio(pair(250, 251), len, ratio), "251 target words kept");
  c.Expect(filter::PassesLengthRatio(pair(9, 3), len, ratio), "ratio 3 dropped");
  c.Expect(filter::PassesLengthRatio(pair(3, 9), len, ratio), "ratio 1/3 dropped");
  c.Expect(!filter::PassesLengthRatio(pair(10, 3), len, ratio), "ratio 10/3 kept");
  c.Expect(!filter::PassesLengthRatio(pair(0, 3), len, ratio), "empty side kept");

  const std::vector<std::string> atoms = {"a", "Z", " ", ".", ",", "?", "!", ":", ";", "(",
                                          ")", "\"", "7", "\xC3\xA9", "\xE4\xBD\xA0",
                                          "\xE2\x80\x9E", "\xEF\xBC\x8C"};
  const auto langs = postprocess::SupportedLanguages();
  std::mt19937_64 rng(9);
  size_t broken = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    const int n = static_cast<int>(rng() % 24);
    for (int k = 0; k < n; ++k) s += atoms[rng() % atoms.size()];
    const std::string& lang = langs[i % langs.size()];
    const std::string once = postprocess::Postprocess(s, lang);
    broken += postprocess::Postprocess(once, lang) != once;
  }
  c.Expect(broken == 0, std::to_string(broken) + " postprocess outputs changed on reapply");
}

// 10. Shard partition and epoch coverage.
void Shards(Checker& c) {
  std::mt19937_64 rng(10);
  for (int inst = 0; inst < 30; ++inst) {
    std::map<std::string, uint64_t> sizes;
    const uint64_t base_lines = 5 + rng() % 20;
    sizes["base"] = base_lines;
    const int extra = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < extra; ++k) {
      sizes["c" + std::to_string(k)] = 1 + rng() % (base_lines * 9);
    }
    const auto plan = shard::PlanShards(sizes, "base");
    uint64_t period = 1;
    for (const auto& [name, cs] : plan.corpora) period = std::lcm(period, cs.shards);

    for (const auto& [name, cs] : plan.corpora) {
      // Partition: writing the corpus and merging the shards gives it back.
      std::string text;
      for (uint64_t i = 0; i < cs.lines; ++i) text += name + "-" + std::to_string(i) + "\n";
      TempDir dir;
      std::istringstream in(text);
      const auto files = shard::WriteShards(in, name, cs.shards, dir.path());
      std::multiset<std::string> merged;
      for (const auto& f : files) {
        for (auto& line : ReadLines(f)) merged.insert(std::move(line));
      }
      std::multiset<std::string> original;
      for (uint64_t i = 0; i < cs.lines; ++i) original.insert(name + "-" + std::to_string(i));
      c.Expect(merged == original, name + " shards do not partition the corpus");

      std::vector<uint64_t> visits(cs.shards, 0);
      for (uint64_t epoch = 0; epoch < period; ++epoch) {
        ++visits[shard::EpochManifest(plan, epoch).at(name)];
      }
      bool exact = true;
      for (uint64_t i = 0; i < cs.lines; ++i) {
        exact = exact && visits[shard::ShardOf(i, cs.shards)] == period / cs.shards;
      }
      c.Expect(exact, name + " lines not scheduled lcm/s times");
    }
  }

  std::ifstream in(FixturePath("pipeline/table1_sizes.json"));
  const auto j = nlohmann::json::parse(in);
  std::map<std::string, uint64_t> sizes;
  for (const auto& [k, v] : j.items()) sizes[k] = v.get<uint64_t>();
  const auto plan = shard::PlanShards(sizes, "ha-bitext");
  const uint64_t s_de = plan.corpora.at("de-bitext").shards;
  c.Expect(s_de == 336, "s_de = " + std::to_string(s_de));
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<void(Checker&)> run;
};

const std::vector<Criterion>& Criteria() {
  static const std::vector<Criterion> all = {
      {1, "config defaults match published constants", 1.0, ConfigDefaults},
      {2, "Moore-Lewis selection matches LM oracle", 10.0, MooreLewis},
      {3, "margin mining matches all-pairs oracle", 30.0, Mining},
      {4, "MoE capacity, weights, gradient, uniform loss", 30.0, MoeRouting},
      {5, "reranker tuning vs baseline and grid", 60.0, RerankTuning},
      {6, "BLEU identity, clipping, reference fixture", 5.0, BleuCorrectness},
      {7, "checkpoint averaging properties and window", 10.0, Checkpoints},
      {8, "subword round trip, temperature, first merge", 20.0, Subword},
      {9, "pipeline determinism, filter bounds, idempotence", 30.0, Determinism},
      {10, "shard partition, coverage, s_de", 10.0, Shards},
  };
  return all;
}

int Main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]\n");
      return 2;
    }
  }
  int failed = 0;
  for (const auto& criterion : Criteria()) {
    if (only != 0 && criterion.id != only) continue;
    Checker checker;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(checker);
    } catch (const std::exception& e) {
      checker.Expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= criterion.limit_seconds;
    const bool pass = checker.ok() && in_time;
    failed += !pass;
    std::printf("criterion %d: %s %s (%s; %.2fs, limit %.0fs%s)\n", criterion.id,
                pass ? "PASS" : "FAIL", criterion.name, checker.Summary().c_str(), seconds,
                criterion.limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace mtforge::acceptance

int main(int argc, char** argv) { return mtforge::acceptance::Main(argc, argv); }
