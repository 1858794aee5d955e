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

#include "mtforge/mine.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

#include "mtforge/binary_io.h"
#include "mtforge/error.h"
#include "mtforge/parallel.h"

namespace mtforge::mine {
namespace {

constexpr std::string_view kMagic = "MTFG-EMB";

double Norm(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

}  // namespace

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

EmbeddingSet EmbeddingSet::FromRows(std::vector<std::string> ids,
                                    std::vector<double> data, size_t dim,
                                    std::string lang, bool normalize) {
  if (ids.empty() || dim == 0) {
    throw DataError("empty_embeddings", "embedding set must be non-empty");
  }
  if (data.size() != ids.size() * dim) {
    throw DataError("shape_mismatch", "embedding data size != n * dim");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw DataError("duplicate_id", "duplicate sentence id '" + id + "'");
    }
  }
  EmbeddingSet set;
  set.ids_ = std::move(ids);
  set.data_ = std::move(data);
  set.dim_ = dim;
  set.lang_ = std::move(lang);
  for (size_t i = 0; i < set.size(); ++i) {
    std::span<double> r(set.data_.data() + i * dim, dim);
    const double norm = Norm(r);
    if (!std::isfinite(norm) || norm == 0.0) {
      throw DataError("bad_row", "row '" + set.ids_[i] +
                                     "' has zero or non-finite norm");
    }
    if (normalize) {
      for (double& v : r) v /= norm;
    } else if (std::abs(norm - 1.0) > kUnitNormTolerance) {
      throw DataError("not_normalized",
                      "row '" + set.ids_[i] + "' is not unit norm");
    }
  }
  return set;
}

EmbeddingSet EmbeddingSet::Load(std::istream& in, bool allow_renormalize,
                                std::string lang) {
  binio::ExpectMagic(in, kMagic);
  const auto n = binio::ReadUint<uint32_t>(in);
  const auto d = binio::ReadUint<uint32_t>(in);
  if (n == 0 || d == 0) {
    throw DataError("empty_embeddings", "embedding file has n or d = 0");
  }
  std::vector<double> data(static_cast<size_t>(n) * d);
  for (double& v : data) v = binio::ReadF32(in);
  std::vector<std::string> ids;
  ids.reserve(n);
  std::string line;
  while (ids.size() < n && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ids.push_back(line);
  }
  if (ids.size() != n) {
    throw DataError("truncated_file", "embedding file has fewer ids than rows");
  }
  if (!allow_renormalize) {
    for (uint32_t i = 0; i < n; ++i) {
      const double norm = Norm({data.data() + static_cast<size_t>(i) * d, d});
      if (!(std::abs(norm - 1.0) <= kFileNormTolerance)) {
        throw DataError("not_normalized",
                        "row '" + ids[i] +
                            "' deviates from unit norm by more than 0.01");
      }
    }
  }
  return FromRows(std::move(ids), std::move(data), d, std::move(lang),
                  /*normalize=*/true);
}

void EmbeddingSet::Save(std::ostream& out) const {
  binio::WriteMagic(out, kMagic);
  binio::WriteUint<uint32_t>(out, static_cast<uint32_t>(size()));
  binio::WriteUint<uint32_t>(out, static_cast<uint32_t>(dim_));
  for (double v : data_) binio::WriteF32(out, static_cast<float>(v));
  for (const auto& id : ids_) out << id << '\n';
  if (!out) throw IoError("write_failed", "failed writing embeddings");
}

std::vector<std::vector<Neighbor>> Knn(const EmbeddingSet& query,
                                       const EmbeddingSet& index, int k,
                                       int workers) {
  if (k < 1 || static_cast<size_t>(k) > index.size()) {
    throw ConfigError("bad_k", "k must be in [1, " +
                                   std::to_string(index.size()) + "]");
  }
  if (query.dim() != index.dim()) {
    throw ConfigError("dim_mismatch", "embedding dimensions differ");
  }
  std::vector<std::vector<Neighbor>> result(query.size());
  ParallelFor(query.size(), workers, [&](size_t q) {
    std::vector<Neighbor> all(index.size());
    for (size_t j = 0; j < index.size(); ++j) {
      all[j] = {j, Dot(query.row(q), index.row(j))};
    }
    std::partial_sort(all.begin(), all.begin() + k, all.end(),
                      [](const Neighbor& a, const Neighbor& b) {
                        if (a.cosine != b.cosine) return a.cosine > b.cosine;
                        return a.index < b.index;
                      });
    all.resize(k);
    result[q] = std::move(all);
  });
  return result;
}

double MarginFromSums(double cos_xy, double sum_x, double sum_y, int k) {
  const double denom = sum_x / (2.0 * k) + sum_y / (2.0 * k);
  if (denom == 0.0) {
    if (cos_xy == 0.0) return 0.0;
    throw DataError("zero_margin_denominator",
                    "neighbor cosines sum to zero");
  }
  return cos_xy / denom;
}

double MarginScore(double cos_xy, std::span<const double> nn_x,
                   std::span<const double> nn_y) {
  if (nn_x.empty() || nn_x.size() != nn_y.size()) {
    throw DataError("bad_neighbors", "neighbor lists must be equal-size, k>=1");
  }
  double sum_x = 0.0;
  double sum_y = 0.0;
  for (double c : nn_x) sum_x += c;
  for (double c : nn_y) sum_y += c;
  return MarginFromSums(cos_xy, sum_x, sum_y, static_cast<int>(nn_x.size()));
}

std::vector<MinedPair> MinePairs(const EmbeddingSet& src,
                                 const EmbeddingSet& tgt, int k,
                                 double threshold, int workers) {
  const auto forward = Knn(src, tgt, k, workers);
  const auto backward = Knn(tgt, src, k, workers);

  auto neighbor_sum = [](const std::vector<Neighbor>& nn) {
    double s = 0.0;
    for (const auto& n : nn) s += n.cosine;
    return s;
  };
  std::vector<double> sum_src(src.size());
  std::vector<double> sum_tgt(tgt.size());
  for (size_t i = 0; i < src.size(); ++i) sum_src[i] = neighbor_sum(forward[i]);
  for (size_t j = 0; j < tgt.size(); ++j) sum_tgt[j] = neighbor_sum(backward[j]);

  std::vector<std::pair<size_t, size_t>> candidates;
  candidates.reserve((src.size() + tgt.size()) * k);
  for (size_t i = 0; i < src.size(); ++i) {
    for (const auto& n : forward[i]) candidates.emplace_back(i, n.index);
  }
  for (size_t j = 0; j < tgt.size(); ++j) {
    for (const auto& n : backward[j]) candidates.emplace_back(n.index, j);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  struct Scored {
    size_t src;
    size_t tgt;
    double margin;
  };
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  for (const auto& [i, j] : candidates) {
    const double cos = Dot(src.row(i), tgt.row(j));
    scored.push_back({i, j, MarginFromSums(cos, sum_src[i], sum_tgt[j], k)});
  }
  std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
    if (a.margin != b.margin) return a.margin > b.margin;
    if (src.id(a.src) != src.id(b.src)) return src.id(a.src) < src.id(b.src);
    return tgt.id(a.tgt) < tgt.id(b.tgt);
  });

  std::vector<char> used_src(src.size(), 0);
  std::vector<char> used_tgt(tgt.size(), 0);
  std::vector<MinedPair> out;
  for (const auto& s : scored) {
    if (!(s.margin >= threshold)) break;
    if (used_src[s.src] || used_tgt[s.tgt]) continue;
    used_src[s.src] = used_tgt[s.tgt] = 1;
    out.push_back({src.id(s.src), tgt.id(s.tgt), s.margin});
  }
  return out;
}

}  // namespace mtforge::mine
