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


#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mtforge/binary_io.h"
#include "mtforge/error.h"
#include "mtforge/mine.h"
#include "oracles.h"
#include "test_support.h"

namespace mtforge::mine {
namespace {

using ::mtforge::testing::BruteForceKnn;
using ::mtforge::testing::BruteForceMine;
using ::mtforge::testing::NumberedIds;
using ::mtforge::testing::RandomUnitRows;

EmbeddingSet RandomSet(std::mt19937_64& rng, const std::string& prefix, size_t n,
                       size_t d) {
  return EmbeddingSet::FromRows(NumberedIds(prefix, n), RandomUnitRows(rng, n, d), d);
}

// Targets are noisy copies of a shuffled subset of the sources plus
// unrelated rows, so some pairs clear the threshold and most do not.
std::pair<EmbeddingSet, EmbeddingSet> PlantedInstance(std::mt19937_64& rng, size_t n,
                                                      size_t m, size_t d) {
  auto src_rows = RandomUnitRows(rng, n, d);
  auto tgt_rows = RandomUnitRows(rng, m, d);
  std::normal_distribution<double> noise(0.0, 0.15);
  const size_t planted = std::min(n, m) / 2;
  for (size_t p = 0; p < planted; ++p) {
    const size_t i = rng() % n;
    const size_t j = rng() % m;
    for (size_t c = 0; c < d; ++c) tgt_rows[j * d + c] = src_rows[i * d + c] + noise(rng);
  }
  return {EmbeddingSet::FromRows(NumberedIds("s", n), std::move(src_rows), d),
          EmbeddingSet::FromRows(NumberedIds("t", m), std::move(tgt_rows), d, "",
                                 /*normalize=*/true)};
}

TEST(MarginTest, WorkedExamples) {
  const std::vector<double> half = {0.4, 0.4, 0.4, 0.4};
  EXPECT_DOUBLE_EQ(MarginScore(0.8, half, half), 2.0);
  const std::vector<double> ones = {1.0, 1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(MarginScore(1.0, ones, ones), 1.0);
  const std::vector<double> a = {0.9, 0.5};
  const std::vector<double> b = {0.3, 0.1};
  EXPECT_DOUBLE_EQ(MarginScore(0.6, a, b), 0.6 / (1.4 / 4 + 0.4 / 4));
  EXPECT_DOUBLE_EQ(MarginFromSums(0.6, 1.4, 0.4, 2), MarginScore(0.6, a, b));
}

TEST(MarginTest, ZeroDenominator) {
  const std::vector<double> zero = {0.5, -0.5};
  EXPECT_EQ(MarginScore(0.0, zero, zero), 0.0);
  EXPECT_THROW(MarginScore(0.1, zero, zero), DataError);
  const std::vector<double> one = {0.5};
  EXPECT_THROW(MarginScore(0.1, one, zero), DataError);
  EXPECT_THROW(MarginScore(0.1, {}, {}), DataError);
}

TEST(KnnTest, MatchesFullSort) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const size_t n = 1 + rng() % 60;
    const size_t m = 1 + rng() % 60;
    const auto q = RandomSet(rng, "q", n, 8);
    const auto x = RandomSet(rng, "x", m, 8);
    const int k = 1 + static_cast<int>(rng() % m);
    EXPECT_EQ(Knn(q, x, k), BruteForceKnn(q, x, k));
    EXPECT_EQ(Knn(q, x, k, 3), BruteForceKnn(q, x, k));
  }
}

TEST(KnnTest, EqualCosinesOrderedByIndex) {
  const std::vector<double> rows = {1, 0, 1, 0, 0, 1, 1, 0};
  const auto index = EmbeddingSet::FromRows(NumberedIds("x", 4), rows, 2);
  const auto query = EmbeddingSet::FromRows({"q"}, {1, 0}, 2);
  const auto nn = Knn(query, index, 4)[0];
  ASSERT_EQ(nn.size(), 4u);
  EXPECT_EQ(nn[0].index, 0u);
  EXPECT_EQ(nn[1].index, 1u);
  EXPECT_EQ(nn[2].index, 3u);
  EXPECT_EQ(nn[3].index, 2u);
}

TEST(KnnTest, RejectsBadK) {
  std::mt19937_64 rng(2);
  const auto a = RandomSet(rng, "a", 5, 4);
  EXPECT_THROW(Knn(a, a, 0), ConfigError);
  EXPECT_THROW(Knn(a, a, 6), ConfigError);
  const auto b = RandomSet(rng, "b", 5, 3);
  EXPECT_THROW(Knn(a, b, 1), ConfigError);
}

TEST(MineTest, IdenticalSetsMineTheIdentity) {
  std::mt19937_64 rng(3);
  const size_t n = 40;
  const auto rows = RandomUnitRows(rng, n, 16);
  const auto src = EmbeddingSet::FromRows(NumberedIds("s", n), rows, 16);
  const auto tgt = EmbeddingSet::FromRows(NumberedIds("t", n), rows, 16);
  const auto pairs = MinePairs(src, tgt, 4, kDefaultThreshold);
  ASSERT_EQ(pairs.size(), n);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.src_id.substr(1), p.tgt_id.substr(1));
    EXPECT_GE(p.margin, kDefaultThreshold);
  }
}

TEST(MineTest, MatchesAllPairsOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 15; ++trial) {
    const size_t n = 5 + rng() % 40;
    const size_t m = 5 + rng() % 40;
    const auto [src, tgt] = PlantedInstance(rng, n, m, 16);
    for (double threshold : {1.0, kDefaultThreshold, 1.2}) {
      const auto got = MinePairs(src, tgt, 4, threshold);
      const auto want = BruteForceMine(src, tgt, 4, threshold);
      ASSERT_EQ(got.size(), want.size());
      for (size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].src_id, want[i].src_id);
        EXPECT_EQ(got[i].tgt_id, want[i].tgt_id);
        EXPECT_NEAR(got[i].margin, want[i].margin, 1e-12);
      }
    }
  }
}

TEST(MineTest, OutputIsOneToOneSortedAndAboveThreshold) {
  std::mt19937_64 rng(5);
  const auto [src, tgt] = PlantedInstance(rng, 80, 70, 16);
  const auto pairs = MinePairs(src, tgt, 4, kDefaultThreshold);
  ASSERT_FALSE(pairs.empty());
  std::set<std::string> s, t;
  for (size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_TRUE(s.insert(pairs[i].src_id).second);
    EXPECT_TRUE(t.insert(pairs[i].tgt_id).second);
    EXPECT_GE(pairs[i].margin, kDefaultThreshold);
    if (i) {
      EXPECT_GE(pairs[i - 1].margin, pairs[i].margin);
    }
  }
  EXPECT_EQ(MinePairs(src, tgt, 4, kDefaultThreshold, 4), pairs);
  EXPECT_TRUE(MinePairs(src, tgt, 4, 1e9).empty());
}

TEST(EmbeddingSetTest, ValidatesRows) {
  EXPECT_THROW(EmbeddingSet::FromRows({}, {}, 2), DataError);
  EXPECT_THROW(EmbeddingSet::FromRows({"a", "a"}, {1, 0, 0, 1}, 2), DataError);
  EXPECT_THROW(EmbeddingSet::FromRows({"a"}, {1, 0, 0}, 2), DataError);
  EXPECT_THROW(EmbeddingSet::FromRows({"a"}, {0.5, 0}, 2), DataError);
  EXPECT_THROW(EmbeddingSet::FromRows({"a"}, {0, 0}, 2, "", true), DataError);
  const auto set = EmbeddingSet::FromRows({"a"}, {3, 4}, 2, "en", true);
  EXPECT_DOUBLE_EQ(set.row(0)[0], 0.6);
  EXPECT_DOUBLE_EQ(set.row(0)[1], 0.8);
  EXPECT_EQ(set.lang(), "en");
}

TEST(EmbeddingSetTest, LoadChecksStoredNorms) {
  std::mt19937_64 rng(6);
  const auto set = RandomSet(rng, "s", 10, 8);
  std::stringstream buf;
  set.Save(buf);
  const auto loaded = EmbeddingSet::Load(buf);
  ASSERT_EQ(loaded.size(), 10u);
  EXPECT_EQ(loaded.ids(), set.ids());
  for (size_t i = 0; i < set.size(); ++i) {
    for (size_t c = 0; c < 8; ++c) EXPECT_NEAR(loaded.row(i)[c], set.row(i)[c], 1e-6);
  }

  std::string bytes = buf.str();
  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(EmbeddingSet::Load(truncated), DataError);
}

std::string EmbeddingFile(double scale) {
  std::ostringstream out;
  binio::WriteMagic(out, "MTFG-EMB");
  binio::WriteUint<uint32_t>(out, 1);
  binio::WriteUint<uint32_t>(out, 2);
  binio::WriteF32(out, static_cast<float>(0.6 * scale));
  binio::WriteF32(out, static_cast<float>(0.8 * scale));
  out << "only\n";
  return out.str();
}

TEST(EmbeddingSetTest, LoadToleratesSmallNormDrift) {
  std::istringstream close(EmbeddingFile(1.005));
  const auto set = EmbeddingSet::Load(close);
  EXPECT_NEAR(set.row(0)[0], 0.6, 1e-6);
  std::istringstream far(EmbeddingFile(1.05));
  EXPECT_THROW(EmbeddingSet::Load(far), DataError);
  std::istringstream far_again(EmbeddingFile(1.05));
  EXPECT_NEAR(EmbeddingSet::Load(far_again, true).row(0)[1], 0.8, 1e-6);
}

}  // namespace
}  // namespace mtforge::mine
