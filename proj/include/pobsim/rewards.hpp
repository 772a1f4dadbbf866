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

#ifndef POBSIM_REWARDS_HPP_
#define POBSIM_REWARDS_HPP_

#include <map>
#include <set>
#include <vector>

#include "pobsim/common.hpp"
#include "pobsim/weights.hpp"

namespace pob {

struct RewardSchedule {
  double total_reward = 100.0;
  double base_reward = 0.5;
  double activity_threshold = 0.0;  // strict: U_i > threshold
  double activeness_epsilon = 0.0;  // payout multiplier is 1 + epsilon * A_i

  bool operator==(const RewardSchedule&) const = default;
};

struct Payout {
  ValidatorId validator;
  double base = 0.0;
  double bonus = 0.0;
  double activeness_multiplier = 1.0;
  double total = 0.0;

  bool operator==(const Payout&) const = default;
};

std::set<ValidatorId> active_set(const std::map<ValidatorId, double>& epoch_scores,
                                 double beta);

// Base stipend to every active validator plus the remaining pool shared by
// weight among them. Throws kInsufficientPool when the stipends alone exceed
// the pool. If every active weight is zero the bonus is split evenly.
// Validators missing from `activeness` are treated as A_i = 0.
std::vector<Payout> distribute(const RewardSchedule& schedule, const WeightTable& table,
                               const std::map<ValidatorId, double>& epoch_scores,
                               const std::map<ValidatorId, double>& activeness);

}  // namespace pob

#endif  // POBSIM_REWARDS_HPP_
