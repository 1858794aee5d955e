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
#include <vector>

#include <gtest/gtest.h>

#include "mtforge/error.h"
#include "mtforge/moe_router.h"
#include "oracles.h"

namespace mtforge::moe {
namespace {

using ::mtforge::testing::FiniteDifferenceGrad;
using ::mtforge::testing::OracleGateLoss;
using ::mtforge::testing::RelativeError;

Matrix FromRows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Matrix RandomLogits(std::mt19937_64& rng, size_t t, size_t e, double scale = 2.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(t, e);
  for (double& v : m.data()) v = normal(rng);
  return m;
}

RouterConfig Config(int experts, double cf) {
  RouterConfig cfg;
  cfg.num_experts = experts;
  cfg.capacity_factor = cf;
  return cfg;
}

TEST(RouteTest, UniformLogitsSplitEvenly) {
  const auto r = Route(Matrix(2, 2, 0.0), Config(2, 2.0));
  for (int t = 0; t < 2; ++t) {
    EXPECT_EQ(r.assignments[t],
              (std::vector<Assignment>{{0, 0.5}, {1, 0.5}}));
    EXPECT_FALSE(r.dropped[t]);
  }
  EXPECT_EQ(r.capacity, 2);
}

TEST(RouteTest, SingleTokenSoftmaxWeights) {
  const auto r = Route(FromRows({{std::log(3.0), 0.0}}), Config(2, 2.0));
  EXPECT_NEAR(r.gates(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(r.gates(0, 1), 0.25, 1e-15);
  ASSERT_EQ(r.assignments[0].size(), 2u);
  EXPECT_EQ(r.assignments[0][0].expert, 0);
  EXPECT_NEAR(r.assignments[0][0].weight, 0.75, 1e-15);
  EXPECT_NEAR(r.assignments[0][1].weight, 0.25, 1e-15);
}

// All four tokens prefer expert 0 and C = 2. Pass 1 seats tokens 0 and 1 on
// expert 0; pass 2 seats their second choices on expert 1, which is then full,
// so tokens 2 and 3 lose both choices.
TEST(RouteTest, OverflowDropsLateTokens) {
  const auto r = Route(FromRows({{2, 0}, {2, 0}, {2, 0}, {2, 0}}), Config(2, 1.0));
  EXPECT_EQ(r.capacity, 2);
  for (int t = 0; t < 2; ++t) {
    ASSERT_EQ(r.assignments[t].size(), 2u);
    EXPECT_EQ(r.assignments[t][0].expert, 0);
    EXPECT_EQ(r.assignments[t][1].expert, 1);
    EXPECT_FALSE(r.dropped[t]);
  }
  for (int t = 2; t < 4; ++t) {
    EXPECT_TRUE(r.assignments[t].empty());
    EXPECT_TRUE(r.dropped[t]);
  }
  EXPECT_EQ(r.expert_load, (std::vector<int64_t>{2, 2}));
}

// Token 1 loses expert 0 in the first pass and keeps its second choice.
TEST(RouteTest, OverflowReroutesToSecondChoice) {
  const auto r = Route(FromRows({{3, 0, 1}, {3, 1, 0}}), Config(3, 1.0));
  EXPECT_EQ(r.capacity, 1);
  ASSERT_EQ(r.assignments[0].size(), 2u);
  EXPECT_EQ(r.assignments[0][0].expert, 0);
  EXPECT_EQ(r.assignments[0][1].expert, 2);
  const double z = r.gates(0, 0) + r.gates(0, 2);
  EXPECT_NEAR(r.assignments[0][0].weight, r.gates(0, 0) / z, 1e-15);
  EXPECT_EQ(r.assignments[1], (std::vector<Assignment>{{1, 1.0}}));
  EXPECT_FALSE(r.dropped[1]);
}

TEST(RouteTest, TiesGoToLowerExpert) {
  EXPECT_EQ(TopTwo(std::vector<double>{1, 3, 3, 0}), std::make_pair(1, 2));
  EXPECT_EQ(TopTwo(std::vector<double>{5, 5}), std::make_pair(0, 1));
}

TEST(RouteTest, CapacityRounding) {
  EXPECT_EQ(ExpertCapacity(2.0, 64, 64), 2);
  EXPECT_EQ(ExpertCapacity(1.0, 5, 2), 3);
  EXPECT_EQ(ExpertCapacity(0.1, 3, 4), 1);
}

TEST(RouteTest, RandomInstancesRespectInvariants) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const int e = 2 + static_cast<int>(rng() % 15);
    const size_t t = 1 + rng() % 64;
    const double cf = 0.25 + static_cast<double>(rng() % 300) / 100.0;
    const auto logits = RandomLogits(rng, t, e);
    const auto r = Route(logits, Config(e, cf));
    const int64_t cap = static_cast<int64_t>(std::ceil(cf * t / e));
    EXPECT_EQ(r.capacity, cap);
    std::vector<int64_t> load(e, 0);
    for (size_t i = 0; i < t; ++i) {
      const auto& a = r.assignments[i];
      EXPECT_LE(a.size(), 2u);
      EXPECT_EQ(static_cast<bool>(r.dropped[i]), a.empty());
      double sum = 0.0;
      for (const auto& x : a) {
        ++load[x.expert];
        sum += x.weight;
      }
      if (!a.empty()) {
        EXPECT_NEAR(sum, 1.0, 1e-9);
      }
    }
    EXPECT_EQ(load, r.expert_load);
    for (int64_t l : load) EXPECT_LE(l, cap);
  }
}

TEST(RouteTest, ShiftInvariant) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 50; ++trial) {
    const auto logits = RandomLogits(rng, 20, 6);
    Matrix shifted = logits;
    for (size_t t = 0; t < shifted.rows(); ++t) {
      const double c = static_cast<double>(rng() % 100) - 50.0;
      for (double& v : shifted.row(t)) v += c;
    }
    const auto a = Route(logits, Config(6, 1.0));
    const auto b = Route(shifted, Config(6, 1.0));
    EXPECT_EQ(a.top1, b.top1);
    EXPECT_EQ(a.top2, b.top2);
    EXPECT_EQ(a.dropped, b.dropped);
    for (size_t t = 0; t < a.assignments.size(); ++t) {
      ASSERT_EQ(a.assignments[t].size(), b.assignments[t].size());
      for (size_t j = 0; j < a.assignments[t].size(); ++j) {
        EXPECT_EQ(a.assignments[t][j].expert, b.assignments[t][j].expert);
        EXPECT_NEAR(a.assignments[t][j].weight, b.assignments[t][j].weight, 1e-12);
      }
    }
  }
}

TEST(RouteTest, Rejections) {
  EXPECT_THROW(Route(Matrix(0, 2), Config(2, 1.0)), DataError);
  EXPECT_THROW(Route(Matrix(2, 3), Config(2, 1.0)), ConfigError);
  Matrix bad(1, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(Route(bad, Config(2, 1.0)), DataError);
  RouterConfig cfg = Config(1, 1.0);
  EXPECT_THROW(Validate(cfg), ConfigError);
  cfg = Config(4, 0.0);
  EXPECT_THROW(Validate(cfg), ConfigError);
  cfg = Config(4, 1.0);
  cfg.top_k = 1;
  EXPECT_THROW(Validate(cfg), ConfigError);
  cfg = Config(4, 1.0);
  cfg.gate_loss_weight = -1;
  EXPECT_THROW(Validate(cfg), ConfigError);
}

TEST(GateLossTest, UniformBalancedIsOne) {
  for (int e : {2, 4, 8, 16}) {
    const Matrix gates(e, e, 1.0 / e);
    std::vector<int> top1(e);
    for (int i = 0; i < e; ++i) top1[i] = i;
    EXPECT_NEAR(GateLoss(gates, top1), 1.0, 1e-12);
  }
}

TEST(GateLossTest, AllToOneIsNumExperts) {
  Matrix gates(5, 4, 0.0);
  for (size_t t = 0; t < 5; ++t) gates(t, 0) = 1.0;
  EXPECT_DOUBLE_EQ(GateLoss(gates, std::vector<int>(5, 0)), 4.0);
}

TEST(GateLossTest, LabelSwapSymmetry) {
  const Matrix gates = FromRows({{0.7, 0.3}, {0.2, 0.8}, {0.6, 0.4}});
  const Matrix swapped = FromRows({{0.3, 0.7}, {0.8, 0.2}, {0.4, 0.6}});
  EXPECT_DOUBLE_EQ(GateLoss(gates, std::vector<int>{0, 1, 0}),
                   GateLoss(swapped, std::vector<int>{1, 0, 1}));
}

TEST(GateLossTest, MatchesOracleAndRouteReportsIt) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const int e = 2 + static_cast<int>(rng() % 10);
    const auto logits = RandomLogits(rng, 1 + rng() % 30, e);
    RouterConfig cfg = Config(e, 2.0);
    const auto r = Route(logits, cfg);
    EXPECT_NEAR(r.aux_loss, OracleGateLoss(logits, r.top1), 1e-12);
    EXPECT_DOUBLE_EQ(r.weighted_aux_loss, 0.01 * r.aux_loss);
    cfg.gate_loss_weight = 0.0;
    EXPECT_EQ(Route(logits, cfg).weighted_aux_loss, 0.0);
  }
}

// Balanced instances with a skewed gate average can fall below 1, so the
// lower bound is only checked where gates agree with the top-1 counts.
TEST(GateLossTest, BalancedSharpGatesStayAboveOne) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 50; ++trial) {
    const int e = 2 + static_cast<int>(rng() % 8);
    const int per = 1 + static_cast<int>(rng() % 4);
    Matrix logits(e * per, e, 0.0);
    std::vector<int> top1;
    for (int t = 0; t < e * per; ++t) {
      logits(t, t % e) = 5.0 + static_cast<double>(rng() % 100) / 10.0;
      top1.push_back(t % e);
    }
    EXPECT_GE(OracleGateLoss(logits, top1), 1.0 - 1e-12);
  }
}

TEST(GateLossGradTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int e = 2 + static_cast<int>(rng() % 8);
    const auto logits = RandomLogits(rng, 1 + rng() % 20, e);
    const auto r = Route(logits, Config(e, 2.0));
    const auto analytic = GateLossGrad(logits);
    const auto numeric = FiniteDifferenceGrad(logits, r.top1, 1e-4);
    EXPECT_LT(RelativeError(analytic, numeric), 1e-5);
    EXPECT_EQ(GateLossGrad(logits, r.top1), analytic);
  }
}

TEST(GateLossGradTest, SmallInstanceAndZeroRowSums) {
  const Matrix logits = FromRows({{0.1, -0.4, 1.2, 0.0}, {2.0, 0.5, -1.0, 0.3},
                                  {-0.7, 0.9, 0.2, 0.4}});
  const auto r = Route(logits, Config(4, 2.0));
  EXPECT_LT(RelativeError(GateLossGrad(logits), FiniteDifferenceGrad(logits, r.top1, 1e-4)),
            1e-5);
  const auto uniform = GateLossGrad(Matrix(4, 4, 0.0), std::vector<int>{0, 1, 2, 3});
  for (size_t t = 0; t < 4; ++t) {
    double sum = 0.0;
    for (double v : uniform.row(t)) sum += v;
    EXPECT_NEAR(sum, 0.0, 1e-15);
  }
}

}  // namespace
}  // namespace mtforge::moe
