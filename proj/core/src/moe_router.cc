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

#include "mtforge/moe_router.h"

#include <algorithm>
#include <cmath>

#include "mtforge/error.h"

namespace mtforge::moe {
namespace {

std::vector<double> TopOneFractions(std::span<const int> top1, size_t experts) {
  std::vector<double> f(experts, 0.0);
  for (int e : top1) f[e] += 1.0;
  for (double& v : f) v /= static_cast<double>(top1.size());
  return f;
}

}  // namespace

void Validate(const RouterConfig& cfg) {
  if (cfg.num_experts < 2) {
    throw ConfigError("bad_experts", "num_experts must be >= 2");
  }
  if (cfg.top_k != kTopK) {
    throw ConfigError("bad_top_k", "only top-2 gating is supported");
  }
  if (!(cfg.capacity_factor > 0.0) || !std::isfinite(cfg.capacity_factor)) {
    throw ConfigError("bad_capacity_factor", "capacity_factor must be > 0");
  }
  if (!(cfg.gate_loss_weight >= 0.0) || !std::isfinite(cfg.gate_loss_weight)) {
    throw ConfigError("bad_gate_loss_weight", "gate_loss_weight must be >= 0");
  }
}

int64_t ExpertCapacity(double capacity_factor, int64_t tokens,
                       int64_t experts) {
  return static_cast<int64_t>(
      std::ceil(capacity_factor * static_cast<double>(tokens) /
                static_cast<double>(experts)));
}

Matrix RowSoftmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (size_t t = 0; t < logits.rows(); ++t) {
    const auto in = logits.row(t);
    const double max = *std::max_element(in.begin(), in.end());
    auto row = out.row(t);
    double sum = 0.0;
    for (size_t e = 0; e < in.size(); ++e) {
      row[e] = std::exp(in[e] - max);
      sum += row[e];
    }
    for (double& v : row) v /= sum;
  }
  return out;
}

std::pair<int, int> TopTwo(std::span<const double> row) {
  int first = 0;
  for (size_t e = 1; e < row.size(); ++e) {
    if (row[e] > row[first]) first = static_cast<int>(e);
  }
  int second = first == 0 ? 1 : 0;
  for (size_t e = 0; e < row.size(); ++e) {
    if (static_cast<int>(e) == first) continue;
    if (row[e] > row[second]) second = static_cast<int>(e);
  }
  return {first, second};
}

RouteResult Route(const Matrix& logits, const RouterConfig& cfg) {
  Validate(cfg);
  if (logits.rows() == 0) throw DataError("empty_batch", "no tokens to route");
  if (logits.cols() != static_cast<size_t>(cfg.num_experts)) {
    throw ConfigError("expert_mismatch",
                      "logit columns (" + std::to_string(logits.cols()) +
                          ") != num_experts (" +
                          std::to_string(cfg.num_experts) + ")");
  }
  for (double v : logits.data()) {
    if (!std::isfinite(v)) {
      throw DataError("non_finite_logits", "router logits must be finite");
    }
  }

  const size_t tokens = logits.rows();
  const size_t experts = logits.cols();
  RouteResult r;
  r.gates = RowSoftmax(logits);
  r.capacity = ExpertCapacity(cfg.capacity_factor, static_cast<int64_t>(tokens),
                              static_cast<int64_t>(experts));
  r.top1.resize(tokens);
  r.top2.resize(tokens);
  for (size_t t = 0; t < tokens; ++t) {
    std::tie(r.top1[t], r.top2[t]) = TopTwo(r.gates.row(t));
  }

  r.expert_load.assign(experts, 0);
  std::vector<char> keep1(tokens, 0);
  std::vector<char> keep2(tokens, 0);
  for (size_t t = 0; t < tokens; ++t) {
    if (r.expert_load[r.top1[t]] < r.capacity) {
      ++r.expert_load[r.top1[t]];
      keep1[t] = 1;
    }
  }
  for (size_t t = 0; t < tokens; ++t) {
    if (r.expert_load[r.top2[t]] < r.capacity) {
      ++r.expert_load[r.top2[t]];
      keep2[t] = 1;
    }
  }

  r.assignments.resize(tokens);
  r.dropped.assign(tokens, 0);
  for (size_t t = 0; t < tokens; ++t) {
    const double g1 = keep1[t] ? r.gates(t, r.top1[t]) : 0.0;
    const double g2 = keep2[t] ? r.gates(t, r.top2[t]) : 0.0;
    const double norm = g1 + g2;
    if (!keep1[t] && !keep2[t]) {
      r.dropped[t] = 1;
      continue;
    }
    if (keep1[t]) r.assignments[t].push_back({r.top1[t], g1 / norm});
    if (keep2[t]) r.assignments[t].push_back({r.top2[t], g2 / norm});
  }

  r.aux_loss = GateLoss(r.gates, r.top1);
  r.weighted_aux_loss = cfg.gate_loss_weight * r.aux_loss;
  return r;
}

double GateLoss(const Matrix& gates, std::span<const int> top1) {
  const size_t tokens = gates.rows();
  const size_t experts = gates.cols();
  const auto f = TopOneFractions(top1, experts);
  double loss = 0.0;
  for (size_t e = 0; e < experts; ++e) {
    double mean = 0.0;
    for (size_t t = 0; t < tokens; ++t) mean += gates(t, e);
    mean /= static_cast<double>(tokens);
    loss += f[e] * mean;
  }
  return static_cast<double>(experts) * loss;
}

Matrix GateLossGrad(const Matrix& logits) {
  const Matrix gates = RowSoftmax(logits);
  std::vector<int> top1(gates.rows());
  for (size_t t = 0; t < gates.rows(); ++t) top1[t] = TopTwo(gates.row(t)).first;
  return GateLossGrad(logits, top1);
}

Matrix GateLossGrad(const Matrix& logits, std::span<const int> top1) {
  // dl/dz[t,j] = (E/T) * g[t,j] * (f_j - sum_e f_e g[t,e])
  const Matrix gates = RowSoftmax(logits);
  const size_t tokens = gates.rows();
  const size_t experts = gates.cols();
  const auto f = TopOneFractions(top1, experts);
  const double scale =
      static_cast<double>(experts) / static_cast<double>(tokens);
  Matrix grad(tokens, experts);
  for (size_t t = 0; t < tokens; ++t) {
    double expected_f = 0.0;
    for (size_t e = 0; e < experts; ++e) expected_f += f[e] * gates(t, e);
    for (size_t j = 0; j < experts; ++j) {
      grad(t, j) = scale * gates(t, j) * (f[j] - expected_f);
    }
  }
  return grad;
}

}  // namespace mtforge::moe
