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

#include "pobsim/adversaries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "pobsim/watchdog.hpp"

namespace pob {
namespace {

enum class ParamType { kReal, kCount, kFraudKind };

struct ParamDef {
  const char* name;
  const char* fallback;
  ParamType type;
  double lo;
  double hi;
  bool lo_open;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<ParamDef>& schema(StrategyKind kind) {
  static const std::vector<ParamDef> honest;
  static const std::vector<ParamDef> stealth = {
      {"fraud_rate", "0.05", ParamType::kReal, 0.0, 1.0, true},
      {"fraud_value", "10", ParamType::kReal, 0.0, kInf, true},
      {"fraud_kind", "fraud-attempt", ParamType::kFraudKind, 0, 0, false},
      {"start_epoch", "0", ParamType::kCount, 0.0, kInf, false},
  };
  static const std::vector<ParamDef> sybil_burst = {
      {"fraud_value", "1", ParamType::kReal, 0.0, kInf, true},
      {"burst_epoch", "10", ParamType::kCount, 0.0, kInf, false},
      {"burst_period", "0", ParamType::kCount, 0.0, kInf, false},
  };
  static const std::vector<ParamDef> adaptive = {
      {"fraud_value", "0.1", ParamType::kReal, 0.0, kInf, true},
      {"fraud_rate", "1", ParamType::kReal, 0.0, 1.0, false},
      {"spawn_rate", "0.1", ParamType::kReal, 0.0, 1.0, false},
      {"population_cap", "0", ParamType::kCount, 0.0, kInf, false},
      {"join_weight", "0", ParamType::kReal, 0.0, kInf, false},
  };
  static const std::vector<ParamDef> long_range = {
      {"defect_epoch", "0", ParamType::kCount, 0.0, kInf, false},
      {"fork_depth", "1000", ParamType::kCount, 0.0, kInf, false},
      {"trigger_epoch", "0", ParamType::kCount, 0.0, kInf, false},
  };
  static const std::vector<ParamDef> griefing = {
      {"start_epoch", "0", ParamType::kCount, 0.0, kInf, false},
      {"empty_block_run", "10", ParamType::kCount, 0.0, kInf, false},
      {"empty_utility", "0.001", ParamType::kReal, 0.0, kInf, false},
      {"empty_alpha", "0.05", ParamType::kReal, 0.0, 1.0, false},
  };
  switch (kind) {
    case StrategyKind::kHonest: return honest;
    case StrategyKind::kStealth: return stealth;
    case StrategyKind::kSybilBurst: return sybil_burst;
    case StrategyKind::kAdaptiveSybil: return adaptive;
    case StrategyKind::kLongRangeFork: return long_range;
    case StrategyKind::kGriefing: return griefing;
  }
  return honest;
}

const ParamDef* find_param(StrategyKind kind, const std::string& key) {
  for (const ParamDef& d : schema(kind)) {
    if (key == d.name) return &d;
  }
  return nullptr;
}

std::optional<double> to_number(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

BehaviorRecord make_record(const ActContext& ctx, ActionKind kind, double base_utility,
                           double initiative, MotivationProfile motivation) {
  BehaviorRecord r;
  r.actor = ctx.self;
  r.epoch = ctx.epoch;
  r.base_utility = base_utility;
  r.context_factor = 1.0;
  r.initiative = initiative;
  r.motivation = std::move(motivation);
  r.kind = kind;
  return r;
}

BehaviorRecord fraud_record(const ActContext& ctx, ActionKind kind, double value,
                            double initiative) {
  BehaviorRecord r =
      make_record(ctx, kind, -value, initiative, ctx.model->profile(ActionKind::kFraudAttempt));
  r.is_fraud_ground_truth = true;
  return r;
}

class HonestStrategy : public Strategy {
 public:
  StrategyKind kind() const override { return StrategyKind::kHonest; }
  std::vector<BehaviorRecord> act(const ActContext& ctx, Rng& behavior_rng, Rng&) override {
    return {honest_behavior(ctx, behavior_rng)};
  }
};

class StealthStrategy : public Strategy {
 public:
  explicit StealthStrategy(const StrategySpec& spec)
      : rate_(spec.number("fraud_rate")),
        value_(spec.number("fraud_value")),
        fraud_kind_(*parse_action_kind(spec.text("fraud_kind"))),
        start_(static_cast<std::uint32_t>(spec.number("start_epoch"))) {}

  StrategyKind kind() const override { return StrategyKind::kStealth; }
  std::vector<BehaviorRecord> act(const ActContext& ctx, Rng& behavior_rng,
                                  Rng& adversary_rng) override {
    BehaviorRecord camouflage = honest_behavior(ctx, behavior_rng);
    const bool attack = adversary_rng.bernoulli(rate_);
    if (attack && ctx.block_in_epoch == 0 && ctx.epoch >= start_) {
      return {fraud_record(ctx, fraud_kind_, value_, camouflage.initiative)};
    }
    return {camouflage};
  }

 private:
  double rate_;
  double value_;
  ActionKind fraud_kind_;
  std::uint32_t start_;
};

// Colluders acquit each other and convict everyone else.
class CoalitionStrategy : public Strategy {
 public:
  explicit CoalitionStrategy(Coalition coalition) : coalition_(std::move(coalition)) {}
  bool vote(const BehaviorRecord& behavior, double, Rng& rng) const override {
    (void)rng.uniform();
    return !coalition_->contains(behavior.actor);
  }

 protected:
  std::size_t coalition_size() const { return std::max<std::size_t>(1, coalition_->size()); }

 private:
  Coalition coalition_;
};

class SybilBurstStrategy : public CoalitionStrategy {
 public:
  SybilBurstStrategy(const StrategySpec& spec, Coalition coalition)
      : CoalitionStrategy(std::move(coalition)),
        value_(spec.number("fraud_value")),
        burst_(static_cast<std::uint32_t>(spec.number("burst_epoch"))),
        period_(static_cast<std::uint32_t>(spec.number("burst_period"))) {}

  StrategyKind kind() const override { return StrategyKind::kSybilBurst; }
  std::vector<BehaviorRecord> act(const ActContext& ctx, Rng& behavior_rng, Rng&) override {
    BehaviorRecord camouflage = honest_behavior(ctx, behavior_rng);
    if (ctx.block_in_epoch == 0 && is_burst(ctx.epoch)) {
      return {fraud_record(ctx, ActionKind::kFraudAttempt,
                           value_ / static_cast<double>(coalition_size()),
                           camouflage.initiative)};
    }
    return {camouflage};
  }

 private:
  bool is_burst(std::uint32_t epoch) const {
    if (epoch < burst_) return false;
    if (period_ == 0) return epoch == burst_;
    return (epoch - burst_) % period_ == 0;
  }

  double value_;
  std::uint32_t burst_;
  std::uint32_t period_;
};

class AdaptiveSybilStrategy : public CoalitionStrategy {
 public:
  AdaptiveSybilStrategy(const StrategySpec& spec, Coalition coalition)
      : CoalitionStrategy(std::move(coalition)),
        value_(spec.number("fraud_value")),
        rate_(spec.number("fraud_rate")) {}

  StrategyKind kind() const override { return StrategyKind::kAdaptiveSybil; }
  std::vector<BehaviorRecord> act(const ActContext& ctx, Rng& behavior_rng,
                                  Rng& adversary_rng) override {
    BehaviorRecord camouflage = honest_behavior(ctx, behavior_rng);
    const bool attack = adversary_rng.bernoulli(rate_);
    if (attack && ctx.block_in_epoch == 0) {
      return {fraud_record(ctx, ActionKind::kFraudAttempt, value_, camouflage.initiative)};
    }
    return {camouflage};
  }

 private:
  double value_;
  double rate_;
};

// Honest until the defect epoch, silent afterwards. The fork itself is
// built by the trial harness.
class LongRangeStrategy : public Strategy {
 public:
  explicit LongRangeStrategy(const StrategySpec& spec)
      : defect_(static_cast<std::uint32_t>(spec.number("defect_epoch"))) {}

  StrategyKind kind() const override { return StrategyKind::kLongRangeFork; }
  std::vector<BehaviorRecord> act(const ActContext& ctx, Rng& behavior_rng, Rng&) override {
    BehaviorRecord record = honest_behavior(ctx, behavior_rng);
    if (ctx.epoch >= defect_) return {};
    return {record};
  }

 private:
  std::uint32_t defect_;
};

// Publishes valid, nearly worthless blocks during its run and idles when
// it is not proposing. Outcomes stay non-negative, so no report fires.
class GriefingStrategy : public Strategy {
 public:
  explicit GriefingStrategy(const StrategySpec& spec)
      : start_(static_cast<std::uint32_t>(spec.number("start_epoch"))),
        run_(static_cast<std::uint32_t>(spec.number("empty_block_run"))),
        utility_(spec.number("empty_utility")),
        alpha_(spec.number("empty_alpha")) {}

  StrategyKind kind() const override { return StrategyKind::kGriefing; }
  std::vector<BehaviorRecord> act(const ActContext& ctx, Rng& behavior_rng, Rng&) override {
    BehaviorRecord record = honest_behavior(ctx, behavior_rng);
    if (run_ == 0 || ctx.epoch < start_ || ctx.epoch >= start_ + run_) return {record};
    const ActionKind kind =
        ctx.proposer == ctx.self ? ActionKind::kProposeBlock : ActionKind::kIdle;
    return {make_record(ctx, kind, utility_, alpha_, ctx.model->profile(ActionKind::kIdle))};
  }

 private:
  std::uint32_t start_;
  std::uint32_t run_;
  double utility_;
  double alpha_;
};

}  // namespace

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kHonest: return "honest";
    case StrategyKind::kStealth: return "stealth";
    case StrategyKind::kSybilBurst: return "sybil-burst";
    case StrategyKind::kAdaptiveSybil: return "adaptive-sybil";
    case StrategyKind::kLongRangeFork: return "long-range-fork";
    case StrategyKind::kGriefing: return "griefing";
  }
  return "honest";
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view text) {
  for (StrategyKind k :
       {StrategyKind::kHonest, StrategyKind::kStealth, StrategyKind::kSybilBurst,
        StrategyKind::kAdaptiveSybil, StrategyKind::kLongRangeFork, StrategyKind::kGriefing}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

void StrategySpec::validate() const {
  const std::string where = "strategy " + std::string(to_string(kind));
  for (const auto& [key, value] : params) {
    const ParamDef* def = find_param(kind, key);
    if (def == nullptr) fail(ErrorCode::kConfig, where + ": unknown parameter '" + key + "'");
    if (def->type == ParamType::kFraudKind) {
      auto k = parse_action_kind(value);
      if (!k || (*k != ActionKind::kFraudAttempt && *k != ActionKind::kDoubleSign)) {
        fail(ErrorCode::kConfig,
             where + "." + key + ": expected fraud-attempt or double-sign, got '" + value + "'");
      }
      continue;
    }
    auto v = to_number(value);
    if (!v) fail(ErrorCode::kConfig, where + "." + key + ": not a number: '" + value + "'");
    const bool low_ok = def->lo_open ? *v > def->lo : *v >= def->lo;
    if (!low_ok || *v > def->hi) {
      fail(ErrorCode::kConfig, where + "." + key + " = " + value + " outside " +
                                   (def->lo_open ? "(" : "[") + std::to_string(def->lo) +
                                   ", " + std::to_string(def->hi) + "]");
    }
    if (def->type == ParamType::kCount && std::floor(*v) != *v) {
      fail(ErrorCode::kConfig, where + "." + key + " must be a whole number");
    }
  }
}

std::map<std::string, std::string> StrategySpec::effective_params() const {
  std::map<std::string, std::string> out;
  for (const ParamDef& d : schema(kind)) {
    auto it = params.find(d.name);
    out[d.name] = it == params.end() ? d.fallback : it->second;
  }
  return out;
}

double StrategySpec::number(const std::string& key) const {
  const ParamDef* def = find_param(kind, key);
  require(def != nullptr, "no parameter '" + key + "' for " + std::string(to_string(kind)));
  auto it = params.find(key);
  auto v = to_number(it == params.end() ? std::string(def->fallback) : it->second);
  require(v.has_value(), "parameter '" + key + "' is not a number");
  return *v;
}

std::string StrategySpec::text(const std::string& key) const {
  const ParamDef* def = find_param(kind, key);
  require(def != nullptr, "no parameter '" + key + "' for " + std::string(to_string(kind)));
  auto it = params.find(key);
  return it == params.end() ? std::string(def->fallback) : it->second;
}

void BehaviorModel::validate() const {
  MotivationProfile{propose_intensities, motivation_weights}.validate();
  for (const auto* v : {&validate_intensities, &oracle_intensities, &fraud_intensities,
                        &idle_intensities}) {
    MotivationProfile{*v, motivation_weights}.validate();
  }
  require(base_utility_low <= base_utility_high, "base utility range is empty");
  require(initiative_low >= 0.0 && initiative_high <= 1.0 && initiative_low <= initiative_high,
          "initiative range must lie in [0,1]");
  require(oracle_probability >= 0.0 && oracle_probability <= 1.0,
          "oracle probability must lie in [0,1]");
  require(error_rate >= 0.0 && error_rate <= 1.0, "error rate must lie in [0,1]");
}

MotivationProfile BehaviorModel::profile(ActionKind kind) const {
  switch (kind) {
    case ActionKind::kProposeBlock: return {propose_intensities, motivation_weights};
    case ActionKind::kValidateBlock: return {validate_intensities, motivation_weights};
    case ActionKind::kOracleReport: return {oracle_intensities, motivation_weights};
    case ActionKind::kFraudAttempt:
    case ActionKind::kDoubleSign: return {fraud_intensities, motivation_weights};
    case ActionKind::kIdle: return {idle_intensities, motivation_weights};
  }
  return {idle_intensities, motivation_weights};
}

BehaviorRecord honest_behavior(const ActContext& ctx, Rng& rng) {
  require(ctx.model != nullptr, "behaviour model missing");
  const BehaviorModel& m = *ctx.model;
  const double kind_draw = rng.uniform();
  const double utility_draw = rng.uniform(m.base_utility_low, m.base_utility_high);
  const double initiative = rng.uniform(m.initiative_low, m.initiative_high);
  const bool mistake = rng.bernoulli(m.error_rate);

  ActionKind kind = ActionKind::kValidateBlock;
  if (ctx.proposer == ctx.self) {
    kind = ActionKind::kProposeBlock;
  } else if (kind_draw < m.oracle_probability) {
    kind = ActionKind::kOracleReport;
  }
  return make_record(ctx, kind, mistake ? m.error_utility : utility_draw, initiative,
                     m.profile(kind));
}

bool Strategy::vote(const BehaviorRecord& behavior, double detection_accuracy,
                    Rng& rng) const {
  return committee_vote(behavior, detection_accuracy, rng);
}

std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec, Coalition coalition) {
  spec.validate();
  if (!coalition) coalition = std::make_shared<std::set<ValidatorId>>();
  switch (spec.kind) {
    case StrategyKind::kHonest: return std::make_unique<HonestStrategy>();
    case StrategyKind::kStealth: return std::make_unique<StealthStrategy>(spec);
    case StrategyKind::kSybilBurst:
      return std::make_unique<SybilBurstStrategy>(spec, std::move(coalition));
    case StrategyKind::kAdaptiveSybil:
      return std::make_unique<AdaptiveSybilStrategy>(spec, std::move(coalition));
    case StrategyKind::kLongRangeFork: return std::make_unique<LongRangeStrategy>(spec);
    case StrategyKind::kGriefing: return std::make_unique<GriefingStrategy>(spec);
  }
  return std::make_unique<HonestStrategy>();
}

std::vector<BehaviorRecord> honest_policy(const ActContext& ctx, Rng& rng) {
  return {honest_behavior(ctx, rng)};
}

}  // namespace pob
