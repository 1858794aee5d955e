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

#include "mtforge/checkpoint.h"

#include <algorithm>

#include "mtforge/binary_io.h"
#include "mtforge/error.h"

namespace mtforge::ckpt {
namespace {

constexpr std::string_view kMagic = "MTFG-CKPT";
constexpr size_t kMaxRank = 255;

uint64_t NumElements(const std::vector<uint64_t>& shape) {
  uint64_t n = 1;
  for (uint64_t d : shape) n *= d;
  return n;
}

// Sum of tensors[lo, hi) for one name, accumulated as a balanced tree.
std::vector<double> PairwiseSum(const std::vector<const Tensor*>& tensors,
                                size_t lo, size_t hi) {
  if (hi - lo == 1) return tensors[lo]->data;
  const size_t mid = lo + (hi - lo) / 2;
  std::vector<double> left = PairwiseSum(tensors, lo, mid);
  const std::vector<double> right = PairwiseSum(tensors, mid, hi);
  for (size_t i = 0; i < left.size(); ++i) left[i] += right[i];
  return left;
}

}  // namespace

void TensorBundle::Add(Tensor tensor) {
  if (Find(tensor.name) != nullptr) {
    throw DataError("duplicate_tensor", "duplicate tensor '" + tensor.name + "'");
  }
  if (tensor.shape.size() > kMaxRank) {
    throw DataError("bad_rank", "tensor '" + tensor.name + "' rank > 255");
  }
  if (NumElements(tensor.shape) != tensor.data.size()) {
    throw DataError("shape_mismatch",
                    "tensor '" + tensor.name + "' data length != shape product");
  }
  index_.emplace(tensor.name, tensors_.size());
  tensors_.push_back(std::move(tensor));
}

const Tensor* TensorBundle::Find(const std::string& name) const {
  const auto it = index_.find(name);
  return it == index_.end() ? nullptr : &tensors_[it->second];
}

size_t TensorBundle::num_parameters() const {
  size_t n = 0;
  for (const auto& t : tensors_) n += t.data.size();
  return n;
}

void TensorBundle::Save(std::ostream& out) const {
  binio::WriteMagic(out, kMagic);
  binio::WriteUint<uint32_t>(out, static_cast<uint32_t>(tensors_.size()));
  for (const auto& t : tensors_) {
    binio::WriteString(out, t.name);
    binio::WriteUint<uint8_t>(out, static_cast<uint8_t>(t.shape.size()));
    for (uint64_t d : t.shape) binio::WriteUint<uint64_t>(out, d);
    for (double v : t.data) binio::WriteF32(out, static_cast<float>(v));
  }
  if (!out) throw IoError("write_failed", "failed writing checkpoint");
}

TensorBundle TensorBundle::Load(std::istream& in) {
  binio::ExpectMagic(in, kMagic);
  const auto count = binio::ReadUint<uint32_t>(in);
  TensorBundle bundle;
  for (uint32_t i = 0; i < count; ++i) {
    Tensor t;
    t.name = binio::ReadString(in);
    const auto rank = binio::ReadUint<uint8_t>(in);
    t.shape.resize(rank);
    for (auto& d : t.shape) d = binio::ReadUint<uint64_t>(in);
    const uint64_t n = NumElements(t.shape);
    if (n > (uint64_t{1} << 34)) {
      throw DataError("corrupt_file", "tensor '" + t.name + "' is too large");
    }
    t.data.resize(n);
    for (double& v : t.data) v = binio::ReadF32(in);
    bundle.Add(std::move(t));
  }
  return bundle;
}

std::string FirstIncompatibility(const TensorBundle& a, const TensorBundle& b) {
  for (const auto& t : a.tensors()) {
    const Tensor* other = b.Find(t.name);
    if (other == nullptr || other->shape != t.shape) return t.name;
  }
  for (const auto& t : b.tensors()) {
    if (a.Find(t.name) == nullptr) return t.name;
  }
  return {};
}

TensorBundle Average(std::span<const TensorBundle> bundles) {
  if (bundles.empty()) {
    throw ConfigError("no_checkpoints", "nothing to average");
  }
  for (size_t i = 1; i < bundles.size(); ++i) {
    const std::string bad = FirstIncompatibility(bundles[0], bundles[i]);
    if (!bad.empty()) {
      throw DataError("incompatible_checkpoints",
                      "tensor '" + bad + "' differs between checkpoint 0 and " +
                          std::to_string(i));
    }
  }
  const double count = static_cast<double>(bundles.size());
  TensorBundle out;
  for (const auto& t : bundles[0].tensors()) {
    std::vector<const Tensor*> parts;
    parts.reserve(bundles.size());
    for (const auto& b : bundles) parts.push_back(b.Find(t.name));
    Tensor avg{t.name, t.shape, PairwiseSum(parts, 0, parts.size())};
    for (double& v : avg.data) v /= count;
    out.Add(std::move(avg));
  }
  return out;
}

std::vector<std::string> LastK(std::span<const std::string> paths, size_t k) {
  if (paths.empty()) throw ConfigError("no_checkpoints", "checkpoint list is empty");
  if (k < 1) throw ConfigError("bad_k", "k must be >= 1");
  const size_t take = std::min(k, paths.size());
  return {paths.end() - static_cast<std::ptrdiff_t>(take), paths.end()};
}

FinetuneChoice FinetuneSelect(
    const TensorBundle& base, const TensorBundle& finetuned,
    const std::function<double(const TensorBundle&)>& metric,
    bool higher_is_better) {
  const TensorBundle pair[] = {base, finetuned};
  TensorBundle candidate = Average(pair);
  FinetuneChoice choice;
  choice.finetuned_metric = metric(finetuned);
  choice.averaged_metric = metric(candidate);
  const bool better = higher_is_better
                          ? choice.averaged_metric > choice.finetuned_metric
                          : choice.averaged_metric < choice.finetuned_metric;
  choice.averaged = better;
  choice.chosen = better ? std::move(candidate) : finetuned;
  return choice;
}

}  // namespace mtforge::ckpt
