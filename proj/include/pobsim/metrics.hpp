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

// Evaluation metrics. This is the only module that reads ground-truth fraud
// labels and validator roles.

#ifndef POBSIM_METRICS_HPP_
#define POBSIM_METRICS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "pobsim/config.hpp"
#include "pobsim/netsim.hpp"

namespace pob {

// accepted / attempted; no value when nothing was attempted.
std::optional<double> fraud_acceptance_rate(std::uint64_t attempted, std::uint64_t accepted);

// Pairwise-difference Gini. No value for an all-zero vector.
std::optional<double> gini(std::span<const double> counts);

enum class AdaptationMode { kRise, kFall };

// First index at which the trajectory reaches >= target (rise) or drops
// below target (fall).
std::optional<std::uint64_t> adaptation_time(std::span<const double> trajectory,
                                             double target, AdaptationMode mode);

struct FraudTally {
  std::uint64_t attempted = 0;
  std::uint64_t accepted = 0;
  double accepted_value = 0.0;  // sum of |U_b| over accepted frauds
};

// Fraud acceptance over a whole trial. A fraud is accepted when its
// behaviour was included in a confirmed block and no guilty verdict or
// slash answered for it within `detection_window` epochs.
FraudTally tally_frauds(const TrialResult& trial, std::uint32_t detection_window);

// Signed difference of accepted fraud value, PoS minus PoB. Throws
// kInvalidInput unless the two results come from the same seed and one of
// each protocol.
double loss_averted(const TrialResult& pob, const TrialResult& pos,
                    std::uint32_t detection_window = 1);

// Behaviours, as (epoch, index), answered by a guilty verdict or a slash
// within `detection_window` epochs.
std::set<std::pair<std::uint32_t, std::size_t>> punished_behaviors(
    const TrialResult& trial, std::uint32_t detection_window);

// The focal validator's payoff in each epoch: its payout, plus the gain from
// its accepted frauds, minus fines for its convictions.
std::vector<double> focal_round_payoffs(const TrialResult& trial, const ScenarioConfig& config,
                                        ValidatorId focal);

struct TrialMetrics {
  std::optional<double> far;
  std::uint64_t attempted = 0;
  std::uint64_t accepted = 0;
  double loss = 0.0;
  std::optional<double> proposer_gini;
  std::optional<double> mean_latency_ms;
  std::optional<double> newcomer_adaptation_blocks;
  std::optional<double> suppression_blocks;
  std::optional<double> bottom_decile_share;
  std::uint64_t false_positives = 0;
  std::uint64_t guilty_verdicts = 0;
  std::optional<double> max_sybil_share;
  std::optional<double> attacker_weight_drop;
  std::optional<double> griefer_weight_drop;
  std::uint64_t griefer_guilty = 0;
  std::optional<double> fork_adopted;
  std::optional<double> fork_compromised_share;
};

TrialMetrics compute_metrics(const TrialResult& trial, const ScenarioConfig& config);

// Column order of the per-protocol block in trials.csv.
const std::vector<std::string>& metric_names();
std::vector<std::optional<double>> metric_values(const TrialMetrics& m);

struct Aggregate {
  std::optional<double> mean;
  std::optional<double> ci_half_width;  // 1.96 s / sqrt(n); needs n >= 2
  std::size_t n = 0;

  bool operator==(const Aggregate&) const = default;
};

// Undefined entries are skipped and not counted in n.
Aggregate aggregate(std::span<const std::optional<double>> values);

}  // namespace pob

#endif  // POBSIM_METRICS_HPP_
