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

#include "pobsim/scoring.hpp"

#include <bitset>
#include <cmath>

namespace pob {
namespace {

constexpr double kSumTolerance = 1e-9;

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void MotivationProfile::validate() const {
  require(!intensities.empty(), "motivation profile is empty");
  require(intensities.size() == weights.size(),
          "motivation intensities and weights differ in length");
  double sum = 0.0;
  for (double w : weights) {
    require(in_unit(w), "motivation weight outside [0,1]");
    sum += w;
  }
  require(std::abs(sum - 1.0) <= kSumTolerance, "motivation weights do not sum to 1");
}

void BehaviorRecord::validate() const {
  require(in_unit(context_factor), "context factor outside [0,1]");
  require(in_unit(initiative), "initiative outside [0,1]");
  require(std::isfinite(base_utility), "base utility is not finite");
  motivation.validate();
}

double motivation_utility(const MotivationProfile& m) {
  m.validate();
  double sum = 0.0;
  for (std::size_t j = 0; j < m.intensities.size(); ++j) {
    sum += m.intensities[j] * m.weights[j];
  }
  return sum;
}

double outcome_utility(const BehaviorRecord& b) {
  require(in_unit(b.context_factor), "context factor outside [0,1]");
  require(in_unit(b.initiative), "initiative outside [0,1]");
  return b.base_utility * b.context_factor * b.initiative;
}

double total_utility(const BehaviorRecord& b) {
  return motivation_utility(b.motivation) + outcome_utility(b);
}

double epoch_score(std::span<const BehaviorRecord> behaviors, ValidatorId actor,
                   std::uint32_t epoch) {
  double sum = 0.0;
  for (const BehaviorRecord& b : behaviors) {
    if (b.actor == actor && b.epoch == epoch) sum += total_utility(b);
  }
  return sum;
}

std::map<ValidatorId, double> epoch_scores(std::span<const BehaviorRecord> behaviors,
                                           std::span<const ValidatorId> validators) {
  std::map<ValidatorId, double> scores;
  for (ValidatorId id : validators) scores[id] = 0.0;
  for (const BehaviorRecord& b : behaviors) {
    auto it = scores.find(b.actor);
    if (it != scores.end()) it->second += total_utility(b);
  }
  return scores;
}

double activeness(const ActivenessInputs& a) {
  require(a.network_mean_actions > 0.0, "network mean actions must be positive");
  const double beta_sum = a.betas[0] + a.betas[1] + a.betas[2];
  require(std::abs(beta_sum - 1.0) <= kSumTolerance, "activeness betas do not sum to 1");
  for (double b : a.betas) require(in_unit(b), "activeness beta outside [0,1]");
  return a.betas[0] * (static_cast<double>(a.action_count) / a.network_mean_actions) +
         a.betas[1] * a.mean_initiative + a.betas[2] * a.diversity;
}

bool flag_anomalous(const ActivenessInputs& a, double freq_threshold,
                    double quality_threshold) {
  require(freq_threshold > 0.0 && quality_threshold > 0.0, "thresholds must be positive");
  require(a.network_mean_actions > 0.0, "network mean actions must be positive");
  const double freq = static_cast<double>(a.action_count) / a.network_mean_actions;
  return freq > freq_threshold && a.mean_initiative < quality_threshold &&
         a.diversity < quality_threshold;
}

double diversity_index(std::span<const BehaviorRecord> behaviors) {
  std::bitset<kActionKindCount> seen;
  for (const BehaviorRecord& b : behaviors) seen.set(static_cast<std::size_t>(b.kind));
  return static_cast<double>(seen.count()) / kActionKindCount;
}

std::map<ValidatorId, ActivenessInputs> activeness_inputs(
    std::span<const BehaviorRecord> behaviors, std::span<const ValidatorId> validators,
    const std::array<double, 3>& betas) {
  struct Acc {
    std::uint64_t count = 0;
    double initiative = 0.0;
    std::bitset<kActionKindCount> kinds;
  };
  std::map<ValidatorId, Acc> acc;
  for (ValidatorId id : validators) acc[id];
  std::uint64_t total = 0;
  for (const BehaviorRecord& b : behaviors) {
    auto it = acc.find(b.actor);
    if (it == acc.end()) continue;
    ++it->second.count;
    it->second.initiative += b.initiative;
    it->second.kinds.set(static_cast<std::size_t>(b.kind));
    ++total;
  }
  double mean = validators.empty() ? 0.0
                                   : static_cast<double>(total) / validators.size();
  if (mean <= 0.0) mean = 1.0;

  std::map<ValidatorId, ActivenessInputs> out;
  for (const auto& [id, a] : acc) {
    ActivenessInputs in;
    in.action_count = a.count;
    in.network_mean_actions = mean;
    in.mean_initiative = a.count == 0 ? 0.0 : a.initiative / static_cast<double>(a.count);
    in.diversity = static_cast<double>(a.kinds.count()) / kActionKindCount;
    in.betas = betas;
    out.emplace(id, in);
  }
  return out;
}

}  // namespace pob
