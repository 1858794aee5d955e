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

// Margin-based bitext mining over precomputed sentence embeddings.
//
// For a candidate pair (x, y) the ratio margin is
//
//   margin(x, y) = cos(x, y) / ( sum_{z in NN_k(x)} cos(x, z) / 2k
//                              + sum_{z in NN_k(y)} cos(y, z) / 2k )
//
// with NN_k(x) the k nearest target sentences of x and NN_k(y) the k nearest
// source sentences of y. Candidates are the union of forward and backward
// k-NN lists; they are matched greedily one-to-one in descending margin.

#ifndef MTFORGE_MINE_H_
#define MTFORGE_MINE_H_

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace mtforge::mine {

inline constexpr int kDefaultK = 4;
inline constexpr double kDefaultThreshold = 1.06;
// Norm tolerance for in-memory sets and for files loaded without
// renormalization.
inline constexpr double kUnitNormTolerance = 1e-6;
inline constexpr double kFileNormTolerance = 0.01;

class EmbeddingSet {
 public:
  EmbeddingSet() = default;

  // `data` is row-major n x dim. With normalize=false every row must already
  // have unit norm within 1e-6; with normalize=true rows are scaled to unit
  // norm. Throws DataError on empty input, duplicate ids, zero or non-finite
  // rows, or a size mismatch.
  static EmbeddingSet FromRows(std::vector<std::string> ids,
                               std::vector<double> data, size_t dim,
                               std::string lang = "", bool normalize = false);

  // Binary "MTFG-EMB" container. Rows are always renormalized; a row whose
  // stored norm is off by more than 0.01 is rejected unless
  // allow_renormalize is set.
  static EmbeddingSet Load(std::istream& in, bool allow_renormalize = false,
                           std::string lang = "");
  void Save(std::ostream& out) const;

  size_t size() const { return ids_.size(); }
  size_t dim() const { return dim_; }
  const std::string& id(size_t i) const { return ids_[i]; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& lang() const { return lang_; }
  std::span<const double> row(size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }

 private:
  std::vector<std::string> ids_;
  std::vector<double> data_;
  size_t dim_ = 0;
  std::string lang_;
};

struct Neighbor {
  size_t index = 0;
  double cosine = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct MinedPair {
  std::string src_id;
  std::string tgt_id;
  double margin = 0.0;

  friend bool operator==(const MinedPair&, const MinedPair&) = default;
};

double Dot(std::span<const double> a, std::span<const double> b);

// Exact top-k by cosine for every query row, best first; equal cosines are
// ordered by ascending index row. Throws ConfigError unless
// 1 <= k <= index.size() and the dimensions agree.
std::vector<std::vector<Neighbor>> Knn(const EmbeddingSet& query,
                                       const EmbeddingSet& index, int k,
                                       int workers = 1);

// Sums are taken over exactly k neighbor cosines on each side.
double MarginFromSums(double cos_xy, double sum_x, double sum_y, int k);
// Throws DataError if the neighbor lists are empty or differ in length, or if
// the denominator is zero while cos_xy is not (a zero cosine gives 0).
double MarginScore(double cos_xy, std::span<const double> nn_x,
                   std::span<const double> nn_y);

// Pairs with margin >= threshold, best first, each sentence used at most
// once. Equal margins are ordered by (src_id, tgt_id).
std::vector<MinedPair> MinePairs(const EmbeddingSet& src,
                                 const EmbeddingSet& tgt, int k,
                                 double threshold, int workers = 1);

}  // namespace mtforge::mine

#endif  // MTFORGE_MINE_H_
