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

// Validator strategies.
//
// A strategy turns (context, random stream) into the behaviours one
// validator emits for one block, and decides its committee votes. Every
// strategy consumes a fixed number of draws per call from each stream it
// owns, whatever it ends up doing, so paired runs see the same numbers.
// Honest-shaped draws come from the validator's behaviour stream; attack
// decisions come from its separate adversary stream.

#ifndef POBSIM_ADVERSARIES_HPP_
#define POBSIM_ADVERSARIES_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pobsim/common.hpp"
#include "pobsim/random.hpp"
#include "pobsim/scoring.hpp"

namespace pob {

enum class StrategyKind {
  kHonest,
  kStealth,
  kSybilBurst,
  kAdaptiveSybil,
  kLongRangeFork,
  kGriefing,
};

std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy_kind(std::string_view text);

// Kind plus its parameters. Parameter values are kept as text so that
// string-valued options (fraud_kind) live next to numeric ones.
struct StrategySpec {
  StrategyKind kind = StrategyKind::kHonest;
  std::map<std::string, std::string> params;

  // Throws kConfig naming the offending key on unknown parameters or values
  // out of range.
  void validate() const;

  double number(const std::string& key) const;  // default filled in if absent
  std::string text(const std::string& key) const;

  // Every parameter the kind accepts, with defaults filled in.
  std::map<std::string, std::string> effective_params() const;

  bool operator==(const StrategySpec&) const = default;
};

// Generative constants for simulated behaviour.
struct BehaviorModel {
  std::vector<double> motivation_weights{0.5, 0.3, 0.2};
  std::vector<double> propose_intensities{0.8, 0.6, 0.4};
  std::vector<double> validate_intensities{0.6, 0.6, 0.4};
  std::vector<double> oracle_intensities{0.6, 0.8, 0.6};
  std::vector<double> fraud_intensities{0.2, 0.0, 0.0};
  std::vector<double> idle_intensities{0.1, 0.0, 0.0};
  double base_utility_low = 0.5;
  double base_utility_high = 1.5;
  double initiative_low = 0.6;
  double initiative_high = 1.0;
  double oracle_probability = 0.2;
  // Probability that an honest action goes wrong and yields a small
  // negative outcome. Zero by default.
  double error_rate = 0.0;
  double error_utility = -0.2;

  void validate() const;
  MotivationProfile profile(ActionKind kind) const;

  bool operator==(const BehaviorModel&) const = default;
};

struct ActContext {
  ValidatorId self;
  std::uint32_t epoch = 0;
  std::uint64_t height = 0;
  std::uint32_t block_in_epoch = 0;
  ValidatorId proposer;
  const BehaviorModel* model = nullptr;
};

// One honest action. Consumes exactly four draws.
BehaviorRecord honest_behavior(const ActContext& ctx, Rng& rng);

// Shared, mutable membership list of a colluding group. The trial harness
// owns it; strategies only read it.
using Coalition = std::shared_ptr<std::set<ValidatorId>>;

class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual StrategyKind kind() const = 0;

  // Behaviours for one block. `behavior_rng` and `adversary_rng` are the
  // validator's own streams.
  virtual std::vector<BehaviorRecord> act(const ActContext& ctx, Rng& behavior_rng,
                                          Rng& adversary_rng) = 0;

  // Committee vote on `behavior`. Consumes exactly one draw.
  virtual bool vote(const BehaviorRecord& behavior, double detection_accuracy,
                    Rng& rng) const;
};

std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec, Coalition coalition);

// Convenience wrappers over the strategies above, one call per block.
std::vector<BehaviorRecord> honest_policy(const ActContext& ctx, Rng& rng);

}  // namespace pob

#endif  // POBSIM_ADVERSARIES_HPP_
