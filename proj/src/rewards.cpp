// Copyright 2026 The pobsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pobsim/rewards.hpp"

namespace pob {

std::set<ValidatorId> active_set(const std::map<ValidatorId, double>& epoch_scores,
                                 double beta) {
  std::set<ValidatorId> out;
  for (const auto& [id, u] : epoch_scores) {
    if (u > beta) out.insert(id);
  }
  return out;
}

std::vector<Payout> distribute(const RewardSchedule& schedule, const WeightTable& table,
                               const std::map<ValidatorId, double>& epoch_scores,
                               const std::map<ValidatorId, double>& activeness) {
  require(schedule.total_reward >= 0.0, "total reward must be non-negative");
  require(schedule.base_reward >= 0.0, "base reward must be non-negative");
  require(schedule.activeness_epsilon >= 0.0, "activeness epsilon must be non-negative");

  const std::set<ValidatorId> active = active_set(epoch_scores, schedule.activity_threshold);
  if (active.empty()) return {};
  const double n = static_cast<double>(active.size());
  const double stipends = n * schedule.base_reward;
  if (stipends > schedule.total_reward) {
    fail(ErrorCode::kInsufficientPool,
         "base reward for " + std::to_string(active.size()) +
             " active validators exceeds the pool");
  }
  const double bonus_pool = schedule.total_reward - stipends;

  double weight_sum = 0.0;
  for (ValidatorId id : active) {
    if (table.contains(id)) weight_sum += table.weight(id);
  }

  std::vector<Payout> out;
  out.reserve(active.size());
  for (ValidatorId id : active) {
    const double w = table.contains(id) ? table.weight(id) : 0.0;
    Payout p;
    p.validator = id;
    p.base = schedule.base_reward;
    p.bonus = weight_sum > 0.0 ? bonus_pool * w / weight_sum : bonus_pool / n;
    auto it = activeness.find(id);
    const double a = it == activeness.end() ? 0.0 : it->second;
    p.activeness_multiplier = 1.0 + schedule.activeness_epsilon * a;
    p.total = (p.base + p.bonus) * p.activeness_multiplier;
    out.push_back(p);
  }
  return out;
}

}  // namespace pob
