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

// Behaviour utilities, epoch scores and activeness.
//
// Every function here is pure. A behaviour's total utility is the sum of a
// motivation part (intensity-weighted dot product) and an outcome part
// (base utility scaled by context relevance and initiative). Validator epoch
// scores are sums of total utilities.

#ifndef POBSIM_SCORING_HPP_
#define POBSIM_SCORING_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pobsim/common.hpp"

namespace pob {

struct MotivationProfile {
  std::vector<double> intensities;
  std::vector<double> weights;

  // Throws kInvalidInput on length mismatch, empty profile, or weights that
  // do not sum to one within 1e-9.
  void validate() const;

  bool operator==(const MotivationProfile&) const = default;
};

struct BehaviorRecord {
  ValidatorId actor;
  std::uint32_t epoch = 0;
  double base_utility = 0.0;
  double context_factor = 1.0;  // in [0, 1]
  double initiative = 1.0;      // in [0, 1]
  MotivationProfile motivation;
  ActionKind kind = ActionKind::kValidateBlock;
  // Ground-truth label for evaluation. Protocol code never reads it; only
  // metrics.cpp does.
  bool is_fraud_ground_truth = false;

  void validate() const;

  bool operator==(const BehaviorRecord&) const = default;
};

struct ActivenessInputs {
  std::uint64_t action_count = 0;
  double network_mean_actions = 1.0;
  double mean_initiative = 0.0;
  double diversity = 0.0;
  std::array<double, 3> betas{1.0 / 3, 1.0 / 3, 1.0 / 3};
};

double motivation_utility(const MotivationProfile& m);
double outcome_utility(const BehaviorRecord& b);
double total_utility(const BehaviorRecord& b);

// Sum of total utilities over records matching (actor, epoch).
double epoch_score(std::span<const BehaviorRecord> behaviors, ValidatorId actor,
                   std::uint32_t epoch);

// Epoch scores for every listed validator; validators without records get 0.
std::map<ValidatorId, double> epoch_scores(
    std::span<const BehaviorRecord> behaviors, std::span<const ValidatorId> validators);

double activeness(const ActivenessInputs& a);

// High frequency together with low initiative and low diversity.
bool flag_anomalous(const ActivenessInputs& a, double freq_threshold,
                    double quality_threshold);

// Fraction of the known action kinds a record list touches.
double diversity_index(std::span<const BehaviorRecord> behaviors);

// Builds activeness inputs for every listed validator from one window of
// records. The network mean is taken over the listed validators; when it is
// zero the mean is reported as 1 so that every count maps to zero frequency.
std::map<ValidatorId, ActivenessInputs> activeness_inputs(
    std::span<const BehaviorRecord> behaviors, std::span<const ValidatorId> validators,
    const std::array<double, 3>& betas);

}  // namespace pob

#endif  // POBSIM_SCORING_HPP_
