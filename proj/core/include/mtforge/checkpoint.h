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

#ifndef MTFORGE_CHECKPOINT_H_
#define MTFORGE_CHECKPOINT_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mtforge::ckpt {

inline constexpr size_t kDefaultAverageLast = 5;

struct Tensor {
  std::string name;
  std::vector<uint64_t> shape;
  std::vector<double> data;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Named tensors in a fixed order. Names are unique and every data length
// equals the product of its shape.
class TensorBundle {
 public:
  TensorBundle() = default;

  // Throws DataError on a duplicate name or a data/shape size mismatch.
  void Add(Tensor tensor);

  const std::vector<Tensor>& tensors() const { return tensors_; }
  const Tensor* Find(const std::string& name) const;
  size_t num_parameters() const;

  // "MTFG-CKPT" container; values are stored as little-endian f32.
  static TensorBundle Load(std::istream& in);
  void Save(std::ostream& out) const;

  friend bool operator==(const TensorBundle& a, const TensorBundle& b) {
    return a.tensors_ == b.tensors_;
  }

 private:
  std::vector<Tensor> tensors_;
  std::unordered_map<std::string, size_t> index_;
};

// Same name set and the same shape per name. Returns the first offending
// tensor name, or an empty string when compatible.
std::string FirstIncompatibility(const TensorBundle& a, const TensorBundle& b);

// Elementwise mean, keeping the tensor order of the first bundle. Summation
// over bundles is pairwise (tree) so results do not drift with list order.
// Throws ConfigError on an empty list and DataError naming the first
// incompatible tensor.
TensorBundle Average(std::span<const TensorBundle> bundles);

// The last min(k, n) entries in their original order. Throws ConfigError on
// an empty list or k < 1.
std::vector<std::string> LastK(std::span<const std::string> paths,
                               size_t k = kDefaultAverageLast);

struct FinetuneChoice {
  TensorBundle chosen;
  bool averaged = false;
  double finetuned_metric = 0.0;
  double averaged_metric = 0.0;
};

// Averages base and finetuned, and keeps the average only if it is strictly
// better on `metric` than the finetuned model. Metric failures propagate.
FinetuneChoice FinetuneSelect(
    const TensorBundle& base, const TensorBundle& finetuned,
    const std::function<double(const TensorBundle&)>& metric,
    bool higher_is_better = true);

}  // namespace mtforge::ckpt

#endif  // MTFORGE_CHECKPOINT_H_
