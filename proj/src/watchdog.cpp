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

#include "pobsim/watchdog.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace pob {

std::string_view to_string(SlashMode mode) {
  return mode == SlashMode::kAdditive ? "additive" : "multiplicative";
}

std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::kNone: return "none";
    case PenaltyKind::kAdditive: return "additive";
    case PenaltyKind::kMultiplicative: return "multiplicative";
    case PenaltyKind::kFull: return "full";
  }
  return "none";
}

void PenaltyPolicy::validate() const {
  require(base_coefficient > 0.0, "penalty base coefficient must be positive");
  require(!escalation.empty(), "escalation schedule is empty");
  require(escalation.front() == 1.0, "escalation must start at 1");
  for (std::size_t i = 1; i < escalation.size(); ++i) {
    require(escalation[i] >= escalation[i - 1], "escalation must be non-decreasing");
  }
  require(rho_p >= 0.0 && rho_p < 1.0, "rho_p must lie in [0,1)");
}

double PenaltyPolicy::escalation_at(std::uint32_t offense_count) const {
  if (escalation.empty()) return 1.0;
  return escalation[std::min<std::size_t>(offense_count, escalation.size() - 1)];
}

std::vector<ValidatorId> form_committee(std::span<const ValidatorId> validators,
                                        ValidatorId subject, std::size_t size, Rng& rng) {
  std::vector<ValidatorId> pool;
  pool.reserve(validators.size());
  for (ValidatorId id : validators) {
    if (id != subject) pool.push_back(id);
  }
  require(size <= pool.size(), "committee of " + std::to_string(size) +
                                   " exceeds the " + std::to_string(pool.size()) +
                                   " eligible validators");
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

bool committee_vote(const BehaviorRecord& behavior, double detection_accuracy, Rng& rng) {
  require(detection_accuracy >= 0.0 && detection_accuracy <= 1.0,
          "detection accuracy must lie in [0,1]");
  const bool harmful = outcome_utility(behavior) < 0.0;
  return rng.bernoulli(harmful ? detection_accuracy : 1.0 - detection_accuracy);
}

Decision decide(const std::vector<bool>& votes, const Rational& theta) {
  require(!votes.empty(), "no votes to decide on");
  Decision d;
  d.malicious_votes = std::count(votes.begin(), votes.end(), true);
  const auto total = static_cast<std::int64_t>(votes.size());
  d.phi = static_cast<double>(d.malicious_votes) / static_cast<double>(total);
  d.guilty = theta.reached_by(d.malicious_votes, total);
  return d;
}

Penalty compute_penalty(const PenaltyPolicy& policy, const BehaviorRecord& behavior,
                        std::uint32_t offense_count) {
  if (policy.full_slash_kinds.contains(behavior.kind)) return {PenaltyKind::kFull, 0.0};
  const double esc = policy.escalation_at(offense_count);
  if (policy.mode == SlashMode::kAdditive) {
    return {PenaltyKind::kAdditive,
            policy.base_coefficient * esc * std::abs(behavior.base_utility)};
  }
  return {PenaltyKind::kMultiplicative, std::pow(policy.rho_p, esc)};
}

WeightTable apply_penalty(const WeightTable& table, ValidatorId target,
                          const Penalty& penalty) {
  switch (penalty.kind) {
    case PenaltyKind::kNone: return table;
    case PenaltyKind::kAdditive: return apply_additive_slash(table, target, penalty.amount);
    case PenaltyKind::kMultiplicative:
      return apply_multiplicative_slash(table, target, penalty.amount);
    case PenaltyKind::kFull: return apply_full_slash(table, target);
  }
  return table;
}

WatchdogOutcome process_epoch_suspicions(
    std::vector<SuspicionReport> reports, std::span<const BehaviorRecord> behaviors,
    const WeightTable& table, const WatchdogParams& params,
    std::span<const ValidatorId> jurors, std::map<ValidatorId, std::uint32_t>& offense_counts,
    const CommitteeVoter& voter, Rng& rng) {
  params.policy.validate();
  std::stable_sort(reports.begin(), reports.end(),
                   [](const SuspicionReport& a, const SuspicionReport& b) {
                     return std::tie(a.epoch, a.subject, a.behavior_index) <
                            std::tie(b.epoch, b.subject, b.behavior_index);
                   });
  WatchdogOutcome out{table, {}};
  for (const SuspicionReport& report : reports) {
    require(report.behavior_index < behaviors.size(), "report names a missing behaviour");
    const BehaviorRecord& behavior = behaviors[report.behavior_index];
    require(behavior.actor == report.subject, "report subject is not the behaviour's actor");

    const std::size_t pool =
        jurors.size() - static_cast<std::size_t>(std::count(jurors.begin(), jurors.end(),
                                                            report.subject));
    const std::size_t size = std::min(params.committee_size, pool);
    Verdict v;
    v.subject = report.subject;
    v.epoch = report.epoch;
    v.behavior_index = report.behavior_index;
    v.committee = form_committee(jurors, report.subject, size, rng);
    std::vector<bool> votes;
    votes.reserve(v.committee.size());
    for (ValidatorId member : v.committee) {
      votes.push_back(voter ? voter(member, behavior, rng)
                            : committee_vote(behavior, params.detection_accuracy, rng));
    }
    const Decision d = decide(votes, params.theta);
    v.malicious_votes = d.malicious_votes;
    v.malicious_fraction = d.phi;
    v.guilty = d.guilty;
    v.offense_count = offense_counts[report.subject];
    if (v.guilty) {
      v.penalty = compute_penalty(params.policy, behavior, v.offense_count);
      const double before = out.table.weight(report.subject);
      out.table = apply_penalty(out.table, report.subject, v.penalty);
      v.penalty_applied = before - out.table.weight(report.subject);
      ++offense_counts[report.subject];
    }
    out.verdicts.push_back(std::move(v));
  }
  return out;
}

}  // namespace pob
