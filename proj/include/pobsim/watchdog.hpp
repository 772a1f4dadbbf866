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

// Peer verification of suspicious behaviour.
//
// A report convenes a committee sampled uniformly from the other validators.
// The committee's malicious fraction is compared exactly against the
// threshold theta; a guilty verdict slashes the subject according to the
// penalty policy and bumps its offense count.

#ifndef POBSIM_WATCHDOG_HPP_
#define POBSIM_WATCHDOG_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "pobsim/common.hpp"
#include "pobsim/random.hpp"
#include "pobsim/rational.hpp"
#include "pobsim/scoring.hpp"
#include "pobsim/weights.hpp"

namespace pob {

struct SuspicionReport {
  ValidatorId subject;
  std::uint32_t epoch = 0;
  std::size_t behavior_index = 0;  // index into the epoch's behaviour list
  ValidatorId reporter;
};

enum class SlashMode { kAdditive, kMultiplicative };

std::string_view to_string(SlashMode mode);

struct PenaltyPolicy {
  double base_coefficient = 1.0;
  // escalation[f] multiplies the penalty of offense number f (0-based); the
  // last entry repeats. Must start at 1 and never decrease.
  std::vector<double> escalation{1.0};
  SlashMode mode = SlashMode::kMultiplicative;
  double rho_p = 0.2;
  std::set<ActionKind> full_slash_kinds{ActionKind::kDoubleSign};

  void validate() const;
  double escalation_at(std::uint32_t offense_count) const;

  bool operator==(const PenaltyPolicy&) const = default;
};

enum class PenaltyKind { kNone, kAdditive, kMultiplicative, kFull };

std::string_view to_string(PenaltyKind kind);

struct Penalty {
  PenaltyKind kind = PenaltyKind::kNone;
  // kAdditive: weight to subtract. kMultiplicative: factor to keep.
  double amount = 0.0;

  bool operator==(const Penalty&) const = default;
};

struct Verdict {
  ValidatorId subject;
  std::uint32_t epoch = 0;
  std::size_t behavior_index = 0;
  std::vector<ValidatorId> committee;
  std::int64_t malicious_votes = 0;
  double malicious_fraction = 0.0;
  bool guilty = false;
  std::uint32_t offense_count = 0;  // prior offenses of the subject
  Penalty penalty;                  // kNone unless guilty
  double penalty_applied = 0.0;  // weight actually removed

  bool operator==(const Verdict&) const = default;
};

struct Decision {
  bool guilty = false;
  double phi = 0.0;
  std::int64_t malicious_votes = 0;
};

// Uniform sample without replacement of `size` validators other than the
// subject. Returned ids are sorted.
std::vector<ValidatorId> form_committee(std::span<const ValidatorId> validators,
                                        ValidatorId subject, std::size_t size, Rng& rng);

// Truthful vote of an honest member with the given detection accuracy.
// Consumes exactly one draw.
bool committee_vote(const BehaviorRecord& behavior, double detection_accuracy, Rng& rng);

Decision decide(const std::vector<bool>& votes, const Rational& theta);

Penalty compute_penalty(const PenaltyPolicy& policy, const BehaviorRecord& behavior,
                        std::uint32_t offense_count);

// Applies one penalty through the weights module. Returns the new table.
WeightTable apply_penalty(const WeightTable& table, ValidatorId target,
                          const Penalty& penalty);

// Vote of committee member `member` on `behavior`. Must consume exactly one
// draw from `rng` so that committee streams stay aligned.
using CommitteeVoter =
    std::function<bool(ValidatorId member, const BehaviorRecord& behavior, Rng& rng)>;

struct WatchdogParams {
  Rational theta{2, 3};
  std::size_t committee_size = 30;
  double detection_accuracy = 0.9;
  PenaltyPolicy policy;
};

struct WatchdogOutcome {
  WeightTable table;
  std::vector<Verdict> verdicts;
};

// Processes reports in (epoch, subject, behaviour index) order. `jurors` is
// the pool committees are drawn from. `offense_counts` is updated in place.
// When `voter` is empty every member votes truthfully.
WatchdogOutcome process_epoch_suspicions(
    std::vector<SuspicionReport> reports, std::span<const BehaviorRecord> behaviors,
    const WeightTable& table, const WatchdogParams& params,
    std::span<const ValidatorId> jurors, std::map<ValidatorId, std::uint32_t>& offense_counts,
    const CommitteeVoter& voter, Rng& rng);

}  // namespace pob

#endif  // POBSIM_WATCHDOG_HPP_
