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

// Scenario configuration.
//
// Configs are YAML documents. Every key is optional except n_validators;
// unknown keys are rejected. The echo form lists every effective value and
// loads back to an equal config. Fields whose default depends on other
// fields are written as `auto` and resolved through the accessors below.

#ifndef POBSIM_CONFIG_HPP_
#define POBSIM_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pobsim/adversaries.hpp"
#include "pobsim/common.hpp"
#include "pobsim/rational.hpp"
#include "pobsim/watchdog.hpp"

namespace pob {

enum class LatencyDistribution { kExponential, kFixed, kUniform };

std::string_view to_string(LatencyDistribution d);

struct LatencyConfig {
  LatencyDistribution distribution = LatencyDistribution::kExponential;
  double mean_ms = 50.0;
  double stage_cost_ms = 10.0;  // per pipeline stage (proposal, votes, watchdog)
  double scoring_cost_ms = 3.0;  // per-block behaviour scoring, PoB only

  bool operator==(const LatencyConfig&) const = default;
};

struct RewardsConfig {
  double total_reward = 100.0;
  std::optional<double> base_reward;  // auto: total_reward / (2 N)
  double activity_threshold = 0.0;
  double epsilon = 0.0;

  bool operator==(const RewardsConfig&) const = default;
};

struct ActivenessConfig {
  std::array<double, 3> betas{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double freq_threshold = 3.0;
  double quality_threshold = 0.2;

  bool operator==(const ActivenessConfig&) const = default;
};

struct PenaltyConfig {
  PenaltyPolicy policy;
  double fine = 0.0;  // immediate token penalty per conviction

  bool operator==(const PenaltyConfig&) const = default;
};

struct WatchdogConfig {
  bool enabled = true;
  Rational theta{2, 3};
  std::optional<std::uint32_t> committee_size;  // auto: min(30, N - 1)
  double detection_accuracy = 0.9;
  double observation_probability = 1.0;

  bool operator==(const WatchdogConfig&) const = default;
};

enum class StakeDistribution { kUniform, kPareto };

std::string_view to_string(StakeDistribution d);

struct PosConfig {
  std::uint64_t slash_delay_blocks = 100;
  double slash_fraction = 1.0;
  StakeDistribution stakes = StakeDistribution::kUniform;
  double pareto_alpha = 1.5;
  double join_stake = 0.0;

  bool operator==(const PosConfig&) const = default;
};

enum class InitialWeights { kUniform, kStake };

std::string_view to_string(InitialWeights w);

struct IncentiveConfig {
  std::optional<std::uint32_t> focal;  // auto: first non-honest validator
  double discount = 0.9;
  double fraud_gain_per_unit = 1.0;

  bool operator==(const IncentiveConfig&) const = default;
};

// Bundled synthetic block trace, used when no trace file is given.
struct TraceConfig {
  std::string path;  // empty: no trace
  bool synthetic = false;
  std::uint64_t blocks = 1000;
  std::uint64_t exploit_height = 500;
  std::uint32_t culprit = 7;
  double exploit_value = 10.0;
  std::uint64_t seed = 20240501;

  bool operator==(const TraceConfig&) const = default;
};

// Validators `first..last` (inclusive; negative indices count from the end,
// -1 being the last validator) follow `strategy`.
struct RosterEntry {
  std::int64_t first = 0;
  std::int64_t last = -1;
  StrategySpec strategy;
  double weight = 1.0;  // multiple of the fair genesis share / stake
  std::uint32_t join_epoch = 0;

  bool operator==(const RosterEntry&) const = default;
};

// One validator's resolved roster line.
struct ValidatorPlan {
  ValidatorId id;
  StrategySpec strategy;
  double weight = 1.0;
  std::uint32_t join_epoch = 0;
};

struct SweepAxis {
  std::string path;
  std::vector<std::string> values;

  bool operator==(const SweepAxis&) const = default;
};

struct ScenarioConfig {
  std::string name = "custom";
  Protocol protocol = Protocol::kPob;
  bool compare_pos = true;  // run the paired baseline alongside
  std::uint32_t n_validators = 0;
  std::uint32_t epochs = 200;
  std::uint32_t blocks_per_epoch = 1;
  std::uint32_t trials = 30;
  std::uint64_t seed = 1;
  std::uint32_t detection_window = 1;  // epochs

  double rho = 0.9;
  double delta = 0.05;
  Rational quorum{2, 3};
  InitialWeights initial_weights = InitialWeights::kUniform;

  WatchdogConfig watchdog;
  PenaltyConfig penalty;
  RewardsConfig rewards;
  ActivenessConfig activeness;
  LatencyConfig latency;
  PosConfig pos;
  BehaviorModel behavior;
  IncentiveConfig incentive;
  TraceConfig trace;
  double dollars_per_unit = 1.0;

  std::vector<RosterEntry> roster;
  std::vector<SweepAxis> sweep;

  // Resolved values of the `auto` fields.
  std::uint32_t committee_size() const;
  double base_reward() const;

  // Plan for each of the n_validators ids, in id order. Validators not
  // covered by any entry are honest; later entries override earlier ones.
  std::vector<ValidatorPlan> resolved_roster() const;

  // Throws Error(kConfig) naming the field path and allowed range.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config(const std::string& yaml_text);
ScenarioConfig load_config(const std::string& path);
std::string echo_config(const ScenarioConfig& config);

// Sets the dotted `path` (e.g. "watchdog.theta", "penalty.base_coefficient")
// to the scalar `value` and revalidates. Unknown paths are config errors.
ScenarioConfig with_override(const ScenarioConfig& config, const std::string& path,
                             const std::string& value);

}  // namespace pob

#endif  // POBSIM_CONFIG_HPP_
