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


#include "cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mtforge/checkpoint.h"
#include "mtforge/corpus_filter.h"
#include "mtforge/data_select.h"
#include "mtforge/error.h"
#include "mtforge/matrix.h"
#include "mtforge/metrics.h"
#include "mtforge/mine.h"
#include "mtforge/moe_router.h"
#include "mtforge/ngram_lm.h"
#include "mtforge/postprocess.h"
#include "mtforge/records.h"
#include "mtforge/rerank.h"
#include "mtforge/shard.h"
#include "mtforge/strings.h"
#include "mtforge/subword.h"
#include "mtforge/utf8.h"
#include "pipeline_config.h"

namespace mtforge::cli {
namespace {

using nlohmann::json;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

// One diagnostic line of space-separated key=value fields.
class Log {
 public:
  explicit Log(std::ostream& err) : err_(err) {}
  Log(const Log&) = delete;
  ~Log() { err_ << line_ << '\n'; }

  Log& operator()(std::string_view key, std::string_view value) {
    if (!line_.empty()) line_ += ' ';
    line_ += key;
    line_ += '=';
    line_ += value;
    return *this;
  }
  Log& operator()(std::string_view key, double value) {
    return (*this)(key, FormatDouble(value));
  }
  Log& operator()(std::string_view key, size_t value) {
    return (*this)(key, std::to_string(value));
  }
  Log& operator()(std::string_view key, int64_t value) {
    return (*this)(key, std::to_string(value));
  }

 private:
  std::ostream& err_;
  std::string line_;
};

class Input {
 public:
  Input(const std::string& path, std::istream& standard_in) {
    if (path == "-") {
      stream_ = &standard_in;
      return;
    }
    file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file_) throw IoError("open_failed", "cannot open '" + path + "' for reading");
    stream_ = file_.get();
  }
  std::istream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* stream_ = nullptr;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& standard_out) : path_(path) {
    if (path == "-") {
      stream_ = &standard_out;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw IoError("open_failed", "cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }
  void Close() {
    stream_->flush();
    if (!*stream_) throw IoError("write_failed", "failed writing '" + path_ + "'");
    if (file_) file_->close();
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::vector<std::string> ReadLines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    ChompCr(line);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> ReadLines(const std::string& path, Streams& io) {
  Input input(path, io.in);
  return ReadLines(input.get());
}

std::string ReadText(const std::string& path, Streams& io) {
  Input input(path, io.in);
  std::ostringstream buf;
  buf << input.get().rdbuf();
  return buf.str();
}

void WriteLines(const std::string& path, Streams& io,
                const std::vector<std::string>& lines) {
  Output output(path, io.out);
  for (const auto& line : lines) output.get() << line << '\n';
  output.Close();
}

json ParseJsonFile(const std::string& path, Streams& io) {
  const std::string text = ReadText(path, io);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("bad_json", "'" + path + "' is not valid JSON: " + e.what());
  }
}

// {name: positive integer}.
std::map<std::string, uint64_t> ParseSizes(const json& doc) {
  if (!doc.is_object()) throw ConfigError("bad_sizes", "sizes must be a JSON object");
  std::map<std::string, uint64_t> sizes;
  for (const auto& [name, value] : doc.items()) {
    if (!value.is_number_unsigned()) {
      throw ConfigError("bad_sizes", "size of '" + name + "' must be a non-negative integer");
    }
    sizes[name] = value.get<uint64_t>();
  }
  return sizes;
}

std::vector<SentenceRecord> ToRecords(const std::vector<std::string>& lines,
                                      const std::string& lang,
                                      const std::string& origin) {
  std::vector<SentenceRecord> records;
  records.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    records.push_back({lines[i], lang, origin, i + 1});
  }
  return records;
}

template <typename T>
T LoadBinary(const std::string& path, Streams& io) {
  Input input(path, io.in);
  return T::Load(input.get());
}

template <typename T>
void SaveBinary(const T& value, const std::string& path, Streams& io) {
  Output output(path, io.out);
  value.Save(output.get());
  output.Close();
}

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Flags. Optional members override the matching config key when present.
struct Options {
  std::string config_path;
  std::optional<int64_t> workers;

  // filter
  std::string pairs = "-";
  std::string src_lang;
  std::string tgt_lang;
  std::optional<int64_t> max_len;
  std::optional<double> max_ratio;
  std::string lid_model;
  std::string expected_src;
  std::string expected_tgt;
  std::vector<std::string> no_lid;
  bool no_normalize = false;

  // lid-train
  std::string labeled;
  std::optional<double> alpha;

  // lm-train
  std::optional<int64_t> order;
  std::optional<double> discount;

  // select
  std::string news_lm;
  std::string gen_lm;
  std::optional<double> select_threshold;
  bool literal = false;

  // spm-*
  std::vector<std::string> corpora;
  std::string sizes;
  std::optional<double> temperature;
  std::optional<int64_t> vocab;
  std::optional<int64_t> budget;
  std::optional<uint64_t> sample_seed;
  std::string sample_out;
  std::string model;
  bool pieces = false;
  bool decode = false;

  // mine
  std::string src_emb;
  std::string tgt_emb;
  std::optional<int64_t> k;
  std::optional<double> mine_threshold;
  bool allow_renormalize = false;

  // shard-*
  std::optional<std::string> base;
  std::string corpus;
  std::optional<uint64_t> shards;
  std::string plan;
  std::string out_dir = ".";

  // moe-route
  std::string logits;
  std::optional<int64_t> experts;
  std::optional<double> capacity_factor;
  std::optional<double> gate_loss_weight;

  // ckpt-*
  std::vector<std::string> checkpoints;
  std::optional<int64_t> last;
  std::string base_ckpt;
  std::string finetuned_ckpt;
  double finetuned_metric = 0.0;
  double averaged_metric = 0.0;
  bool lower_is_better = false;

  // rerank*
  std::string nbest;
  std::string weights;
  std::string refs;
  std::optional<int64_t> trials;
  std::optional<std::string> bounds;
  std::optional<uint64_t> tune_seed;

  // bleu
  std::string hyp;
  std::string ref;
  std::optional<std::string> tokenize;

  // postprocess
  std::optional<std::string> lang;
  bool print_table = false;

  std::string in = "-";
  std::string out = "-";
};

template <typename T, typename U>
void Override(const std::optional<T>& flag, U& target) {
  if (flag) target = *flag;
}

std::pair<double, double> ParseBounds(const std::string& text) {
  const auto parts = SplitOn(text, ":");
  std::optional<double> lo, hi;
  if (parts.size() == 2) {
    lo = ParseDouble(parts[0]);
    hi = ParseDouble(parts[1]);
  }
  if (!lo || !hi) throw ConfigError("bad_bounds", "--bounds must look like LOWER:UPPER");
  return {*lo, *hi};
}

void ApplyFlags(const Options& o, PipelineConfig& cfg) {
  Override(o.workers, cfg.workers);
  Override(o.max_len, cfg.filter.max_len);
  Override(o.max_ratio, cfg.filter.max_ratio);
  if (!o.no_lid.empty()) cfg.filter.no_lid = o.no_lid;
  if (o.no_normalize) cfg.filter.normalize_punct = false;
  Override(o.alpha, cfg.filter.lid_alpha);
  Override(o.order, cfg.lm.order);
  Override(o.discount, cfg.lm.discount);
  Override(o.select_threshold, cfg.select.select_threshold);
  if (o.literal) cfg.select.orientation = "literal_greater";
  Override(o.temperature, cfg.subword.T);
  if (o.vocab) cfg.subword.vocab_size = *o.vocab;
  if (o.budget) cfg.subword.budget = *o.budget;
  if (o.sample_seed) cfg.seeds.subword_sample = *o.sample_seed;
  Override(o.k, cfg.mine.k);
  Override(o.mine_threshold, cfg.mine.threshold);
  if (o.allow_renormalize) cfg.mine.allow_renormalize = true;
  if (o.base) cfg.shard.base = *o.base;
  Override(o.experts, cfg.moe.num_experts);
  Override(o.capacity_factor, cfg.moe.capacity_factor);
  Override(o.gate_loss_weight, cfg.moe.gate_loss_weight);
  Override(o.last, cfg.ckpt.avg_last);
  Override(o.trials, cfg.rerank.tune_trials);
  if (o.bounds) {
    std::tie(cfg.rerank.tune_lower, cfg.rerank.tune_upper) = ParseBounds(*o.bounds);
  }
  if (o.tune_seed) cfg.seeds.rerank_tune = *o.tune_seed;
  Override(o.tokenize, cfg.bleu.tokenize);
  if (o.lang) cfg.postprocess.lang = *o.lang;
}

int Workers(const PipelineConfig& cfg) { return static_cast<int>(cfg.workers); }

// ---- stages ----

int RunFilter(const PipelineConfig& cfg, const Options& o, Streams& io) {
  const std::string src_lang = o.src_lang.empty() ? o.expected_src : o.src_lang;
  const std::string tgt_lang = o.tgt_lang.empty() ? o.expected_tgt : o.tgt_lang;
  const auto lines = ReadLines(o.pairs, io);
  std::vector<ParallelRecord> pairs;
  pairs.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    pairs.push_back(ParsePairTsv(lines[i], src_lang, tgt_lang, o.pairs, i + 1));
  }
  const size_t total = pairs.size();
  if (cfg.filter.normalize_punct) {
    for (auto& p : pairs) {
      p.src.text = filter::NormalizePunct(p.src.text);
      p.tgt.text = filter::NormalizePunct(p.tgt.text);
    }
  }
  pairs = filter::LengthRatioFilter(pairs, static_cast<int>(cfg.filter.max_len),
                                    cfg.filter.max_ratio);
  const size_t after_length = pairs.size();
  std::string lid = "skipped";
  if (!o.lid_model.empty()) {
    if (o.expected_src.empty() || o.expected_tgt.empty()) {
      throw ConfigError("missing_flag",
                        "--lid-model needs --expected-src and --expected-tgt");
    }
    const auto model = LoadBinary<filter::LidModel>(o.lid_model, io);
    const auto& no_lid = cfg.filter.no_lid;
    const bool bypass_src =
        std::find(no_lid.begin(), no_lid.end(), o.expected_src) != no_lid.end();
    const bool bypass_tgt =
        std::find(no_lid.begin(), no_lid.end(), o.expected_tgt) != no_lid.end();
    pairs = filter::LidFilterPairs(pairs, model, o.expected_src, bypass_src,
                                   o.expected_tgt, bypass_tgt, Workers(cfg));
    lid = bypass_src && bypass_tgt ? "bypassed" : "applied";
  }
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(FormatPairTsv(p));
  WriteLines(o.out, io, out);
  Log{io.err}("stage", "filter")("total", total)("after_length", after_length)(
      "kept", pairs.size())("lid", lid);
  return kExitOk;
}

int RunLidTrain(const PipelineConfig& cfg, const Options& o, Streams& io) {
  const auto lines = ReadLines(o.labeled, io);
  std::vector<SentenceRecord> records;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const size_t tab = lines[i].find('\t');
    if (tab == std::string::npos) {
      throw DataError("malformed_tsv", "line " + std::to_string(i + 1) +
                                           ": expected 'lang<TAB>text'");
    }
    records.push_back({lines[i].substr(tab + 1), lines[i].substr(0, tab),
                       o.labeled, i + 1});
  }
  const auto model = filter::LidModel::Train(records, cfg.filter.lid_alpha);
  SaveBinary(model, o.out, io);
  Log{io.err}("stage", "lid-train")("records", records.size())(
      "classes", Join(model.classes(), ","))("ngrams", model.ngram_vocab_size());
  return kExitOk;
}

int RunLmTrain(const PipelineConfig& cfg, const Options& o, Streams& io) {
  const auto records = ToRecords(ReadLines(o.in, io), "", o.in);
  const auto model = lm::NGramModel::Train(
      std::span<const SentenceRecord>(records), static_cast<int>(cfg.lm.order),
      cfg.lm.discount);
  SaveBinary(model, o.out, io);
  Log{io.err}("stage", "lm-train")("sentences", records.size())(
      "vocab", model.vocab().size())("contexts", model.contexts().size());
  return kExitOk;
}

int RunSelect(const PipelineConfig& cfg, const Options& o, Streams& io) {
  if (o.news_lm.empty() || o.gen_lm.empty()) {
    throw ConfigError("missing_lm", "select needs --news-lm and --gen-lm");
  }
  const auto records = ToRecords(ReadLines(o.in, io), "", o.in);
  if (records.empty()) throw DataError("empty_corpus", "select input is empty");
  const auto news = LoadBinary<lm::NGramModel>(o.news_lm, io);
  const auto general = LoadBinary<lm::NGramModel>(o.gen_lm, io);
  select::SelectionConfig sc;
  sc.in_domain_lm = &news;
  sc.general_lm = &general;
  sc.threshold = cfg.select.select_threshold;
  sc.orientation = cfg.select.orientation == "literal_greater"
                       ? select::Orientation::kLiteralGreater
                       : select::Orientation::kInDomainLike;
  const auto result = select::Select(sc, records, Workers(cfg));
  std::vector<std::string> out;
  out.reserve(result.kept.size());
  for (const auto& r : result.kept) out.push_back(r.text);
  WriteLines(o.out, io, out);
  Log{io.err}("selected", result.kept.size())("total", result.total)(
      "frac", result.fraction());
  return kExitOk;
}

int RunSpmTrain(const PipelineConfig& cfg, const Options& o, Streams& io) {
  if (!cfg.subword.vocab_size) {
    throw ConfigError("missing_vocab_size", "spm-train needs --vocab or subword.vocab_size");
  }
  if (!cfg.seeds.subword_sample) {
    throw ConfigError("missing_seed", "spm-train needs --seed or seeds.subword_sample");
  }
  if (o.corpora.empty()) throw ConfigError("missing_corpus", "spm-train needs --corpus lang=path");
  std::map<std::string, std::vector<std::string>> corpora;
  std::map<std::string, uint64_t> sizes;
  for (const auto& spec : o.corpora) {
    const size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("bad_corpus_flag", "--corpus expects lang=path, got '" + spec + "'");
    }
    const std::string lang = spec.substr(0, eq);
    if (corpora.contains(lang)) {
      throw ConfigError("duplicate_language", "language '" + lang + "' given twice");
    }
    auto lines = ReadLines(spec.substr(eq + 1), io);
    std::erase_if(lines, [](const std::string& l) { return l.empty(); });
    sizes[lang] = lines.size();
    corpora[lang] = std::move(lines);
  }
  if (!o.sizes.empty()) {
    auto declared = ParseSizes(ParseJsonFile(o.sizes, io));
    std::set<std::string> a, b;
    for (const auto& [l, n] : declared) a.insert(l);
    for (const auto& [l, n] : corpora) b.insert(l);
    if (a != b) {
      throw ConfigError("sizes_mismatch", "--sizes languages differ from --corpus languages");
    }
    sizes = std::move(declared);
  }
  uint64_t budget = 0;
  if (cfg.subword.budget) {
    budget = static_cast<uint64_t>(*cfg.subword.budget);
  } else {
    for (const auto& [lang, lines] : corpora) budget += lines.size();
  }
  const auto plan = subword::MakeSamplingPlan(sizes, cfg.subword.T);
  const auto sample =
      subword::SampleCorpus(corpora, plan, budget, *cfg.seeds.subword_sample);
  if (!o.sample_out.empty()) WriteLines(o.sample_out, io, sample);
  const auto model = subword::SubwordModel::Learn(
      sample, static_cast<size_t>(*cfg.subword.vocab_size), cfg.subword.marker);
  SaveBinary(model, o.out, io);
  Log log(io.err);
  log("stage", "spm-train")("sampled", sample.size())("merges", model.merges().size())(
      "vocab", model.vocab_size());
  for (const auto& [lang, p] : plan.probs) log("prob." + lang, p);
  return kExitOk;
}

std::vector<uint32_t> ParseIds(const std::string& line, size_t line_no) {
  std::vector<uint32_t> ids;
  for (const auto& field : utf8::SplitWhitespace(line)) {
    const auto v = ParseInt(field);
    if (!v || *v < 0 || *v > UINT32_MAX) {
      throw DataError("bad_id", "line " + std::to_string(line_no) + ": '" + field +
                                    "' is not a token id");
    }
    ids.push_back(static_cast<uint32_t>(*v));
  }
  return ids;
}

int RunSpmEncode(const Options& o, Streams& io, bool decode) {
  Input model_in(o.model, io.in);
  const auto model = subword::SubwordModel::Load(model_in.get());
  const auto lines = ReadLines(o.in, io);
  std::vector<std::string> out;
  out.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    if (decode) {
      out.push_back(model.Decode(ParseIds(lines[i], i + 1)));
    } else if (o.pieces) {
      out.push_back(Join(model.EncodePieces(lines[i]), " "));
    } else {
      std::vector<std::string> ids;
      for (uint32_t id : model.Encode(lines[i])) ids.push_back(std::to_string(id));
      out.push_back(Join(ids, " "));
    }
  }
  WriteLines(o.out, io, out);
  Log{io.err}("stage", decode ? "spm-decode" : "spm-encode")("lines", lines.size());
  return kExitOk;
}

int RunMine(const PipelineConfig& cfg, const Options& o, Streams& io) {
  Input src_in(o.src_emb, io.in);
  const auto src = mine::EmbeddingSet::Load(src_in.get(), cfg.mine.allow_renormalize);
  Input tgt_in(o.tgt_emb, io.in);
  const auto tgt = mine::EmbeddingSet::Load(tgt_in.get(), cfg.mine.allow_renormalize);
  const auto pairs = mine::MinePairs(src, tgt, static_cast<int>(cfg.mine.k),
                                     cfg.mine.threshold, Workers(cfg));
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back(p.src_id + "\t" + p.tgt_id + "\t" + FormatDouble(p.margin));
  }
  WriteLines(o.out, io, out);
  Log{io.err}("stage", "mine")("src", src.size())("tgt", tgt.size())(
      "pairs", pairs.size());
  return kExitOk;
}

json PlanToJson(const shard::ShardPlan& plan) {
  json doc = json::object();
  for (const auto& [name, c] : plan.corpora) {
    doc[name] = {{"lines", c.lines}, {"shards", c.shards}};
  }
  return doc;
}

int RunShardPlan(const PipelineConfig& cfg, const Options& o, Streams& io) {
  if (!cfg.shard.base) throw ConfigError("missing_base", "shard-plan needs --base");
  const auto plan = shard::PlanShards(ParseSizes(ParseJsonFile(o.sizes, io)), *cfg.shard.base);
  Output output(o.out, io.out);
  output.get() << PlanToJson(plan).dump(2) << '\n';
  output.Close();
  Log log(io.err);
  log("stage", "shard-plan")("base", plan.base);
  for (const auto& [name, c] : plan.corpora) {
    log("shards." + name, static_cast<size_t>(c.shards));
  }
  return kExitOk;
}

int RunShardWrite(const Options& o, Streams& io) {
  if (o.corpus.empty()) throw ConfigError("missing_flag", "shard-write needs --corpus");
  uint64_t shards = 0;
  if (o.shards) {
    shards = *o.shards;
  } else if (!o.plan.empty()) {
    const json doc = ParseJsonFile(o.plan, io);
    if (!doc.is_object() || !doc.contains(o.corpus) ||
        !doc[o.corpus].is_object() || !doc[o.corpus].contains("shards") ||
        !doc[o.corpus]["shards"].is_number_unsigned()) {
      throw ConfigError("bad_plan", "plan has no shard count for '" + o.corpus + "'");
    }
    shards = doc[o.corpus]["shards"].get<uint64_t>();
  } else {
    throw ConfigError("missing_flag", "shard-write needs --shards or --plan");
  }
  std::filesystem::create_directories(o.out_dir);
  Input input(o.in, io.in);
  const auto files = shard::WriteShards(input.get(), o.corpus, shards, o.out_dir);
  Log{io.err}("stage", "shard-write")("corpus", o.corpus)("shards", files.size());
  return kExitOk;
}

Matrix ParseLogits(const std::vector<std::string>& lines) {
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < lines.size(); ++i) {
    const auto fields = utf8::SplitWhitespace(lines[i]);
    if (fields.empty()) continue;
    std::vector<double> row;
    for (const auto& f : fields) {
      const auto v = ParseDouble(f);
      if (!v) {
        throw DataError("malformed_logits", "line " + std::to_string(i + 1) + ": '" + f +
                                                "' is not a number");
      }
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError("malformed_logits", "line " + std::to_string(i + 1) +
                                              ": row length differs from the first row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty_batch", "no logits rows");
  Matrix m(rows.size(), rows.front().size());
  for (size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

int RunMoeRoute(const PipelineConfig& cfg, const Options& o, Streams& io) {
  const Matrix logits = ParseLogits(ReadLines(o.logits, io));
  moe::RouterConfig rc;
  rc.num_experts = static_cast<int>(cfg.moe.num_experts);
  rc.top_k = static_cast<int>(cfg.moe.top_k);
  rc.capacity_factor = cfg.moe.capacity_factor;
  rc.gate_loss_weight = cfg.moe.gate_loss_weight;
  const auto result = moe::Route(logits, rc);
  Output output(o.out, io.out);
  output.get() << "token\tdropped\tassignments\n";
  size_t dropped = 0;
  for (size_t t = 0; t < result.assignments.size(); ++t) {
    std::vector<std::string> parts;
    for (const auto& a : result.assignments[t]) {
      parts.push_back(std::to_string(a.expert) + ":" + FormatDouble(a.weight));
    }
    dropped += result.dropped[t] ? 1 : 0;
    output.get() << t << '\t' << (result.dropped[t] ? 1 : 0) << '\t'
                 << (parts.empty() ? "-" : Join(parts, ",")) << '\n';
  }
  output.Close();
  std::vector<std::string> load;
  for (int64_t n : result.expert_load) load.push_back(std::to_string(n));
  Log{io.err}("stage", "moe-route")("tokens", logits.rows())("capacity", result.capacity)(
      "dropped", dropped)("aux_loss", result.aux_loss)(
      "weighted_aux_loss", result.weighted_aux_loss)("load", Join(load, ","));
  return kExitOk;
}

int RunCkptAvg(const PipelineConfig& cfg, const Options& o, Streams& io) {
  const auto chosen = ckpt::LastK(o.checkpoints, static_cast<size_t>(cfg.ckpt.avg_last));
  std::vector<ckpt::TensorBundle> bundles;
  bundles.reserve(chosen.size());
  for (const auto& path : chosen) bundles.push_back(LoadBinary<ckpt::TensorBundle>(path, io));
  const auto averaged = ckpt::Average(bundles);
  SaveBinary(averaged, o.out, io);
  Log{io.err}("stage", "ckpt-avg")("averaged", chosen.size())(
      "parameters", averaged.num_parameters())("first", chosen.front())(
      "last", chosen.back());
  return kExitOk;
}

int RunCkptSelect(const Options& o, Streams& io) {
  const auto base = LoadBinary<ckpt::TensorBundle>(o.base_ckpt, io);
  const auto finetuned = LoadBinary<ckpt::TensorBundle>(o.finetuned_ckpt, io);
  const auto choice = ckpt::FinetuneSelect(
      base, finetuned,
      [&](const ckpt::TensorBundle& b) {
        return &b == &finetuned ? o.finetuned_metric : o.averaged_metric;
      },
      !o.lower_is_better);
  SaveBinary(choice.chosen, o.out, io);
  Log{io.err}("stage", "ckpt-select")("chosen", choice.averaged ? "averaged" : "finetuned")(
      "finetuned_metric", choice.finetuned_metric)("averaged_metric", choice.averaged_metric);
  return kExitOk;
}

rerank::NBestList LoadNBest(const std::string& path, Streams& io) {
  Input input(path, io.in);
  auto nbest = rerank::ParseNBest(input.get());
  if (nbest.segments.empty()) throw DataError("empty_corpus", "n-best list is empty");
  return nbest;
}

rerank::RerankWeights ParseWeights(const json& doc) {
  if (!doc.is_object()) throw ConfigError("bad_weights", "weights must be a JSON object");
  rerank::RerankWeights w;
  const std::pair<const char*, double*> fields[] = {
      {"lambda1", &w.lambda1}, {"lambda2", &w.lambda2}, {"length_penalty", &w.length_penalty}};
  for (const auto& [key, value] : doc.items()) {
    const auto it = std::find_if(std::begin(fields), std::end(fields),
                                 [&](const auto& f) { return key == f.first; });
    if (it == std::end(fields)) {
      throw ConfigError("unknown_key", "unknown weights key '" + key + "'");
    }
    if (!value.is_number()) throw ConfigError("bad_type", "weight '" + key + "' must be a number");
    *it->second = value.get<double>();
  }
  for (const auto& [key, target] : fields) {
    if (!doc.contains(key)) throw ConfigError("missing_key", "weights need '" + std::string(key) + "'");
  }
  return w;
}

json WeightsToJson(const rerank::RerankWeights& w) {
  return {{"lambda1", w.lambda1}, {"lambda2", w.lambda2}, {"length_penalty", w.length_penalty}};
}

int RunRerank(const Options& o, Streams& io) {
  const auto nbest = LoadNBest(o.nbest, io);
  const auto weights = ParseWeights(ParseJsonFile(o.weights, io));
  WriteLines(o.out, io, rerank::Rerank(nbest, weights));
  Log{io.err}("stage", "rerank")("segments", nbest.segments.size());
  return kExitOk;
}

int RunRerankTune(const PipelineConfig& cfg, const Options& o, Streams& io) {
  if (!cfg.seeds.rerank_tune) {
    throw ConfigError("missing_seed", "rerank-tune needs --seed or seeds.rerank_tune");
  }
  const auto nbest = LoadNBest(o.nbest, io);
  const auto refs = ReadLines(o.refs, io);
  const auto result = rerank::Tune(
      nbest, refs, static_cast<int>(cfg.rerank.tune_trials),
      {cfg.rerank.tune_lower, cfg.rerank.tune_upper}, *cfg.seeds.rerank_tune,
      Workers(cfg), metrics::ParseScheme(cfg.bleu.tokenize));
  const double baseline =
      rerank::BleuObjective(nbest, refs, metrics::ParseScheme(cfg.bleu.tokenize))
          .Evaluate({});
  Output output(o.out, io.out);
  output.get() << WeightsToJson(result.weights).dump(2) << '\n';
  output.Close();
  Log{io.err}("stage", "rerank-tune")("trials", result.trial_bleu.size())(
      "best_trial", static_cast<size_t>(result.trial))("bleu", result.bleu)(
      "baseline_bleu", baseline);
  return kExitOk;
}

int RunBleu(const PipelineConfig& cfg, const Options& o, Streams& io) {
  const auto hyps = ReadLines(o.hyp, io);
  const auto refs = ReadLines(o.ref, io);
  const double bleu =
      metrics::CorpusBleu(hyps, refs, metrics::ParseScheme(cfg.bleu.tokenize));
  io.out << metrics::FormatBleu(bleu) << '\n';
  Log{io.err}("stage", "bleu")("segments", hyps.size())("bleu", bleu)(
      "tokenize", cfg.bleu.tokenize);
  return kExitOk;
}

int RunPostprocess(const PipelineConfig& cfg, const Options& o, Streams& io) {
  if (!cfg.postprocess.lang) {
    throw ConfigError("missing_lang", "postprocess needs --lang or postprocess.lang");
  }
  const std::string& lang = *cfg.postprocess.lang;
  if (o.print_table) {
    Output output(o.out, io.out);
    output.get() << postprocess::PrintTable(lang);
    output.Close();
    return kExitOk;
  }
  auto lines = ReadLines(o.in, io);
  for (auto& line : lines) line = postprocess::Postprocess(line, lang);
  WriteLines(o.out, io, lines);
  Log{io.err}("stage", "postprocess")("lang", lang)("lines", lines.size());
  return kExitOk;
}

int RunConfigDump(const PipelineConfig& cfg, const Options& o, Streams& io) {
  Output output(o.out, io.out);
  output.get() << cfg.ToJson().dump(2) << '\n';
  output.Close();
  return kExitOk;
}

// ---- command table ----

struct Command {
  CLI::App* app;
  std::function<int(const PipelineConfig&, const Options&, Streams&)> run;
};

std::vector<Command> Define(CLI::App& app, Options& o) {
  app.add_option("--config", o.config_path, "Pipeline config JSON (flags win)");
  app.add_option("--workers", o.workers, "Worker threads; output never depends on it");
  app.require_subcommand(1);
  app.fallthrough();
  std::vector<Command> commands;
  auto add = [&](const char* name, const char* help, auto run) {
    CLI::App* sub = app.add_subcommand(name, help);
    commands.push_back({sub, run});
    return sub;
  };
  auto out_opt = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output path ('-' for stdout)");
  };

  auto* filter = add("filter", "Normalize, length/ratio-filter and language-filter bitext",
                     RunFilter);
  filter->add_option("--pairs", o.pairs, "Input TSV: src TAB tgt [TAB score]");
  filter->add_option("--src-lang", o.src_lang);
  filter->add_option("--tgt-lang", o.tgt_lang);
  filter->add_option("--max-len", o.max_len);
  filter->add_option("--max-ratio", o.max_ratio);
  filter->add_option("--lid-model", o.lid_model);
  filter->add_option("--expected-src", o.expected_src);
  filter->add_option("--expected-tgt", o.expected_tgt);
  filter->add_option("--no-lid", o.no_lid, "Languages whose LID check is bypassed");
  filter->add_flag("--no-normalize", o.no_normalize);
  out_opt(filter);

  auto* lid = add("lid-train", "Train the character n-gram language identifier", RunLidTrain);
  lid->add_option("--labeled", o.labeled, "TSV: lang TAB text")->required();
  lid->add_option("--alpha", o.alpha);
  lid->add_option("--out", o.out)->required();

  auto* lmt = add("lm-train", "Train a Kneser-Ney n-gram LM", RunLmTrain);
  lmt->add_option("--in", o.in);
  lmt->add_option("--order", o.order);
  lmt->add_option("--discount", o.discount);
  lmt->add_option("--out", o.out)->required();

  auto* sel = add("select", "Cross-entropy difference selection", RunSelect);
  sel->add_option("--in", o.in);
  sel->add_option("--news-lm", o.news_lm);
  sel->add_option("--gen-lm", o.gen_lm);
  sel->add_option("--threshold", o.select_threshold);
  sel->add_flag("--literal-greater", o.literal, "Keep score > threshold instead of score < -threshold");
  out_opt(sel);

  auto* spm = add("spm-train", "Temperature-sample corpora and learn BPE", RunSpmTrain);
  spm->add_option("--corpus", o.corpora, "lang=path, repeatable");
  spm->add_option("--sizes", o.sizes, "JSON {lang: lines} used for the sampling plan");
  spm->add_option("--T", o.temperature);
  spm->add_option("--vocab", o.vocab);
  spm->add_option("--budget", o.budget);
  spm->add_option("--seed", o.sample_seed);
  spm->add_option("--sample-out", o.sample_out);
  spm->add_option("--out", o.out)->required();

  auto* enc = add("spm-encode", "Encode lines to ids (or pieces); --decode inverts",
                  [](const PipelineConfig&, const Options& opt, Streams& io) {
                    return RunSpmEncode(opt, io, opt.decode);
                  });
  enc->add_option("--model", o.model)->required();
  enc->add_option("--in", o.in);
  enc->add_flag("--pieces", o.pieces);
  enc->add_flag("--decode", o.decode);
  out_opt(enc);

  auto* dec = add("spm-decode", "Decode id lines",
                  [](const PipelineConfig&, const Options& opt, Streams& io) {
                    return RunSpmEncode(opt, io, true);
                  });
  dec->add_option("--model", o.model)->required();
  dec->add_option("--in", o.in);
  out_opt(dec);

  auto* mn = add("mine", "Margin-based bitext mining", RunMine);
  mn->add_option("--src", o.src_emb)->required();
  mn->add_option("--tgt", o.tgt_emb)->required();
  mn->add_option("--k", o.k);
  mn->add_option("--threshold", o.mine_threshold);
  mn->add_flag("--allow-renormalize", o.allow_renormalize);
  out_opt(mn);

  auto* sp = add("shard-plan", "Plan per-corpus shard counts", RunShardPlan);
  sp->add_option("--sizes", o.sizes)->required();
  sp->add_option("--base", o.base);
  out_opt(sp);

  auto* sw = add("shard-write", "Split a corpus into shard files",
                 [](const PipelineConfig&, const Options& opt, Streams& io) {
                   return RunShardWrite(opt, io);
                 });
  sw->add_option("--in", o.in);
  sw->add_option("--corpus", o.corpus);
  sw->add_option("--shards", o.shards);
  sw->add_option("--plan", o.plan);
  sw->add_option("--out-dir", o.out_dir);

  auto* moe = add("moe-route", "Top-2 routing of a logits matrix", RunMoeRoute);
  moe->add_option("--logits", o.logits)->required();
  moe->add_option("--experts", o.experts);
  moe->add_option("--capacity-factor", o.capacity_factor);
  moe->add_option("--gate-loss-weight", o.gate_loss_weight);
  out_opt(moe);

  auto* avg = add("ckpt-avg", "Average the last k checkpoints", RunCkptAvg);
  avg->add_option("checkpoints", o.checkpoints)->required();
  avg->add_option("--last", o.last);
  avg->add_option("--out", o.out)->required();

  auto* cs = add("ckpt-select", "Keep base+finetuned average only if strictly better",
                 [](const PipelineConfig&, const Options& opt, Streams& io) {
                   return RunCkptSelect(opt, io);
                 });
  cs->add_option("--base", o.base_ckpt)->required();
  cs->add_option("--finetuned", o.finetuned_ckpt)->required();
  cs->add_option("--finetuned-metric", o.finetuned_metric)->required();
  cs->add_option("--averaged-metric", o.averaged_metric)->required();
  cs->add_flag("--lower-is-better", o.lower_is_better);
  cs->add_option("--out", o.out)->required();

  auto* rr = add("rerank", "Pick the best hypothesis per segment",
                 [](const PipelineConfig&, const Options& opt, Streams& io) {
                   return RunRerank(opt, io);
                 });
  rr->add_option("--nbest", o.nbest)->required();
  rr->add_option("--weights", o.weights)->required();
  out_opt(rr);

  auto* rt = add("rerank-tune", "Random-search the reranking weights", RunRerankTune);
  rt->add_option("--nbest", o.nbest)->required();
  rt->add_option("--refs", o.refs)->required();
  rt->add_option("--trials", o.trials);
  rt->add_option("--bounds", o.bounds, "LOWER:UPPER");
  rt->add_option("--seed", o.tune_seed);
  rt->add_option("--tokenize", o.tokenize);
  out_opt(rt);

  auto* bl = add("bleu", "Corpus BLEU", RunBleu);
  bl->add_option("--hyp", o.hyp)->required();
  bl->add_option("--ref", o.ref)->required();
  bl->add_option("--tokenize", o.tokenize);

  auto* pp = add("postprocess", "Language-specific punctuation", RunPostprocess);
  pp->add_option("--lang", o.lang);
  pp->add_flag("--print-table", o.print_table);
  pp->add_option("--in", o.in);
  out_opt(pp);

  auto* cd = add("config-dump", "Print the effective config", RunConfigDump);
  out_opt(cd);
  return commands;
}

int ExitCodeFor(ErrorKind kind) {
  return kind == ErrorKind::kConfig ? kExitConfig : kExitData;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err) {
  Streams io{in, out, err};
  Options options;
  CLI::App app{"mtforge: machine translation data and decoding utilities", "mtforge"};
  const auto commands = Define(app, options);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    Log{err}("error", "usage")("message", e.what());
    return kExitConfig;
  }
  try {
    PipelineConfig cfg;
    if (!options.config_path.empty()) cfg = LoadConfig(ReadText(options.config_path, io));
    ApplyFlags(options, cfg);
    cfg.Validate();
    for (const auto& command : commands) {
      if (command.app->parsed()) return command.run(cfg, options, io);
    }
    Log{err}("error", "usage")("message", "no subcommand");
    return kExitConfig;
  } catch (const Error& e) {
    Log{err}("error", e.code())("message", e.what());
    return ExitCodeFor(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    Log{err}("error", "io")("message", e.what());
    return kExitData;
  }
}

}  // namespace mtforge::cli
