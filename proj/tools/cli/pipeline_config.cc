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


#include "pipeline_config.h"

#include <cmath>
#include <set>

#include "mtforge/error.h"
#include "mtforge/metrics.h"
#include "mtforge/moe_router.h"

namespace mtforge::cli {
namespace {

using nlohmann::json;

std::string TypeError(const std::string& path, const char* expected) {
  return "config key '" + path + "' must be " + expected;
}

// Reads the keys of one JSON object and rejects the ones nobody asked for.
class Section {
 public:
  Section(const json& doc, std::string path) : path_(std::move(path)) {
    if (!doc.is_object()) {
      throw ConfigError("bad_type", TypeError(path_, "an object"));
    }
    doc_ = &doc;
  }

  template <typename T>
  void Read(const std::string& key, T& out) {
    seen_.insert(key);
    const auto it = doc_->find(key);
    if (it != doc_->end()) Convert(*it, Path(key), out);
  }

  // Finds a raw value and marks the key as known.
  const json* Raw(const std::string& key) {
    seen_.insert(key);
    const auto it = doc_->find(key);
    return it == doc_->end() ? nullptr : &*it;
  }

  void Finish() const {
    for (const auto& [key, value] : doc_->items()) {
      if (!seen_.contains(key)) {
        throw ConfigError("unknown_key", "unknown config key '" + Path(key) + "'");
      }
    }
  }

  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  static void Convert(const json& v, const std::string& path, int64_t& out) {
    if (!v.is_number_integer()) throw ConfigError("bad_type", TypeError(path, "an integer"));
    out = v.get<int64_t>();
  }
  static void Convert(const json& v, const std::string& path, uint64_t& out) {
    if (!v.is_number_unsigned()) {
      throw ConfigError("bad_type", TypeError(path, "a non-negative integer"));
    }
    out = v.get<uint64_t>();
  }
  static void Convert(const json& v, const std::string& path, double& out) {
    if (!v.is_number()) throw ConfigError("bad_type", TypeError(path, "a number"));
    out = v.get<double>();
  }
  static void Convert(const json& v, const std::string& path, bool& out) {
    if (!v.is_boolean()) throw ConfigError("bad_type", TypeError(path, "a boolean"));
    out = v.get<bool>();
  }
  static void Convert(const json& v, const std::string& path, std::string& out) {
    if (!v.is_string()) throw ConfigError("bad_type", TypeError(path, "a string"));
    out = v.get<std::string>();
  }
  static void Convert(const json& v, const std::string& path,
                      std::vector<std::string>& out) {
    if (!v.is_array()) throw ConfigError("bad_type", TypeError(path, "a list of strings"));
    std::vector<std::string> values;
    for (const auto& item : v) {
      if (!item.is_string()) {
        throw ConfigError("bad_type", TypeError(path, "a list of strings"));
      }
      values.push_back(item.get<std::string>());
    }
    out = std::move(values);
  }
  template <typename T>
  static void Convert(const json& v, const std::string& path,
                      std::optional<T>& out) {
    if (v.is_null()) {
      out.reset();
      return;
    }
    T value{};
    Convert(v, path, value);
    out = std::move(value);
  }

  const json* doc_ = nullptr;
  std::string path_;
  std::set<std::string> seen_;
};

void Require(bool ok, const char* code, const std::string& message) {
  if (!ok) throw ConfigError(code, message);
}

json Optional(const auto& value) {
  return value ? json(*value) : json(nullptr);
}

}  // namespace

void PipelineConfig::Merge(const json& doc) {
  PipelineConfig next = *this;
  Section root(doc, "");
  auto section = [&](const char* name, auto&& read) {
    if (const json* raw = root.Raw(name)) {
      Section s(*raw, name);
      read(s);
      s.Finish();
    }
  };
  section("filter", [&](Section& s) {
    s.Read("max_len", next.filter.max_len);
    s.Read("max_ratio", next.filter.max_ratio);
    s.Read("lid_alpha", next.filter.lid_alpha);
    s.Read("no_lid", next.filter.no_lid);
    s.Read("normalize_punct", next.filter.normalize_punct);
  });
  section("lm", [&](Section& s) {
    s.Read("order", next.lm.order);
    s.Read("discount", next.lm.discount);
  });
  section("select", [&](Section& s) {
    s.Read("select_threshold", next.select.select_threshold);
    s.Read("orientation", next.select.orientation);
  });
  section("subword", [&](Section& s) {
    s.Read("T", next.subword.T);
    s.Read("vocab_size", next.subword.vocab_size);
    s.Read("budget", next.subword.budget);
    s.Read("marker", next.subword.marker);
  });
  section("mine", [&](Section& s) {
    s.Read("k", next.mine.k);
    s.Read("threshold", next.mine.threshold);
    s.Read("allow_renormalize", next.mine.allow_renormalize);
  });
  section("shard", [&](Section& s) { s.Read("base", next.shard.base); });
  section("moe", [&](Section& s) {
    s.Read("num_experts", next.moe.num_experts);
    s.Read("top_k", next.moe.top_k);
    s.Read("capacity_factor", next.moe.capacity_factor);
    s.Read("gate_loss_weight", next.moe.gate_loss_weight);
    s.Read("moe_layer_frequency", next.moe.moe_layer_frequency);
  });
  section("ckpt", [&](Section& s) { s.Read("avg_last", next.ckpt.avg_last); });
  section("rerank", [&](Section& s) {
    s.Read("tune_trials", next.rerank.tune_trials);
    if (const json* b = s.Raw("tune_bounds")) {
      if (!b->is_array() || b->size() != 2 || !(*b)[0].is_number() ||
          !(*b)[1].is_number()) {
        throw ConfigError("bad_type",
                          TypeError("rerank.tune_bounds", "a [lower, upper] pair"));
      }
      next.rerank.tune_lower = (*b)[0].get<double>();
      next.rerank.tune_upper = (*b)[1].get<double>();
    }
  });
  section("bleu", [&](Section& s) { s.Read("tokenize", next.bleu.tokenize); });
  section("postprocess", [&](Section& s) { s.Read("lang", next.postprocess.lang); });
  section("seeds", [&](Section& s) {
    s.Read("subword_sample", next.seeds.subword_sample);
    s.Read("rerank_tune", next.seeds.rerank_tune);
  });
  root.Read("workers", next.workers);
  root.Finish();
  *this = std::move(next);
}

void PipelineConfig::Validate() const {
  Require(filter.max_len >= 1, "bad_max_len", "filter.max_len must be >= 1");
  Require(filter.max_ratio >= 1, "bad_max_ratio", "filter.max_ratio must be >= 1");
  Require(filter.lid_alpha > 0, "bad_alpha", "filter.lid_alpha must be > 0");
  Require(lm.order >= 1 && lm.order <= 8, "bad_order", "lm.order must be in [1, 8]");
  Require(lm.discount > 0 && lm.discount < 1, "bad_discount",
          "lm.discount must be in (0, 1)");
  Require(!std::isnan(select.select_threshold), "bad_threshold",
          "select.select_threshold is NaN");
  Require(select.orientation == "in_domain_like" ||
              select.orientation == "literal_greater",
          "bad_orientation",
          "select.orientation must be in_domain_like or literal_greater");
  Require(subword.T >= 1, "bad_temperature", "subword.T must be >= 1");
  Require(!subword.vocab_size || *subword.vocab_size > 4, "bad_vocab_size",
          "subword.vocab_size must exceed the 4 specials");
  Require(!subword.budget || *subword.budget >= 1, "bad_budget",
          "subword.budget must be >= 1");
  Require(!subword.marker.empty(), "bad_marker", "subword.marker is empty");
  Require(mine.k >= 1, "bad_k", "mine.k must be >= 1");
  Require(!std::isnan(mine.threshold), "bad_threshold", "mine.threshold is NaN");
  moe::Validate({static_cast<int>(moe.num_experts), static_cast<int>(moe.top_k),
                 moe.capacity_factor, moe.gate_loss_weight});
  Require(moe.moe_layer_frequency >= 1, "bad_layer_frequency",
          "moe.moe_layer_frequency must be >= 1");
  Require(ckpt.avg_last >= 1, "bad_avg_last", "ckpt.avg_last must be >= 1");
  Require(rerank.tune_trials >= 1, "bad_trials", "rerank.tune_trials must be >= 1");
  Require(std::isfinite(rerank.tune_lower) && std::isfinite(rerank.tune_upper) &&
              rerank.tune_lower <= rerank.tune_upper,
          "bad_bounds", "rerank.tune_bounds must be finite with lower <= upper");
  metrics::ParseScheme(bleu.tokenize);
  Require(workers >= 1, "bad_workers", "workers must be >= 1");
}

json PipelineConfig::ToJson() const {
  json doc;
  doc["filter"] = {{"max_len", filter.max_len},
                   {"max_ratio", filter.max_ratio},
                   {"lid_alpha", filter.lid_alpha},
                   {"no_lid", filter.no_lid},
                   {"normalize_punct", filter.normalize_punct}};
  doc["lm"] = {{"order", lm.order}, {"discount", lm.discount}};
  doc["select"] = {{"select_threshold", select.select_threshold},
                   {"orientation", select.orientation}};
  doc["subword"] = {{"T", subword.T},
                    {"vocab_size", Optional(subword.vocab_size)},
                    {"budget", Optional(subword.budget)},
                    {"marker", subword.marker}};
  doc["mine"] = {{"k", mine.k},
                 {"threshold", mine.threshold},
                 {"allow_renormalize", mine.allow_renormalize}};
  doc["shard"] = {{"base", Optional(shard.base)}};
  doc["moe"] = {{"num_experts", moe.num_experts},
                {"top_k", moe.top_k},
                {"capacity_factor", moe.capacity_factor},
                {"gate_loss_weight", moe.gate_loss_weight},
                {"moe_layer_frequency", moe.moe_layer_frequency}};
  doc["ckpt"] = {{"avg_last", ckpt.avg_last}};
  doc["rerank"] = {{"tune_trials", rerank.tune_trials},
                   {"tune_bounds", {rerank.tune_lower, rerank.tune_upper}}};
  doc["bleu"] = {{"tokenize", bleu.tokenize}};
  doc["postprocess"] = {{"lang", Optional(postprocess.lang)}};
  doc["seeds"] = {{"subword_sample", Optional(seeds.subword_sample)},
                  {"rerank_tune", Optional(seeds.rerank_tune)}};
  doc["workers"] = workers;
  return doc;
}

PipelineConfig LoadConfig(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("bad_config_json", std::string("config is not valid JSON: ") + e.what());
  }
  PipelineConfig cfg;
  cfg.Merge(doc);
  return cfg;
}

}  // namespace mtforge::cli
