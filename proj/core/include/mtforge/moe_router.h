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

// Top-2 sparsely gated mixture-of-experts routing.
//
// For T tokens and E experts, gates are the row softmax of the router logits.
// Each expert accepts at most C = ceil(capacity_factor * T / E) tokens.
// Routing runs two passes in token order: first every token's top-1 choice,
// then every token's top-2 choice; a choice whose expert is full is
// discarded. Surviving gate values are renormalized per token, and a token
// with no surviving choice is marked dropped.
//
// The load-balancing loss is l_aux = E * sum_e f_e * mean_t(gates[t, e]),
// with f_e the fraction of tokens whose top-1 expert is e. f_e is treated as
// a constant when differentiating.

#ifndef MTFORGE_MOE_ROUTER_H_
#define MTFORGE_MOE_ROUTER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mtforge/matrix.h"

namespace mtforge::moe {

inline constexpr int kTopK = 2;
inline constexpr double kDefaultCapacityFactor = 2.0;
inline constexpr double kDefaultGateLossWeight = 0.01;

struct RouterConfig {
  int num_experts = 64;
  int top_k = kTopK;
  double capacity_factor = kDefaultCapacityFactor;
  double gate_loss_weight = kDefaultGateLossWeight;
};

// Throws ConfigError unless E >= 2, top_k == 2, capacity_factor > 0 and
// gate_loss_weight >= 0.
void Validate(const RouterConfig& cfg);

int64_t ExpertCapacity(double capacity_factor, int64_t tokens, int64_t experts);

struct Assignment {
  int expert = 0;
  double weight = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct RouteResult {
  Matrix gates;
  std::vector<int> top1;
  std::vector<int> top2;
  // Per token, surviving choices in (top-1, top-2) order.
  std::vector<std::vector<Assignment>> assignments;
  std::vector<char> dropped;
  std::vector<int64_t> expert_load;
  int64_t capacity = 0;
  double aux_loss = 0.0;
  // gate_loss_weight * aux_loss, the term added to the training objective.
  double weighted_aux_loss = 0.0;
};

Matrix RowSoftmax(const Matrix& logits);

// Indices of the largest and second-largest entries; ties go to the lower
// index.
std::pair<int, int> TopTwo(std::span<const double> row);

// Throws DataError on non-finite logits or T == 0, ConfigError on a column
// count different from cfg.num_experts.
RouteResult Route(const Matrix& logits, const RouterConfig& cfg);

double GateLoss(const Matrix& gates, std::span<const int> top1);

// d l_aux / d logits with f_e held at the top-1 fractions of `logits`.
Matrix GateLossGrad(const Matrix& logits);

// Same, evaluated with caller-supplied top-1 assignments.
Matrix GateLossGrad(const Matrix& logits, std::span<const int> top1);

}  // namespace mtforge::moe

#endif  // MTFORGE_MOE_ROUTER_H_
