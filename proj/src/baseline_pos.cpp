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

#include "pobsim/baseline_pos.hpp"

#include <algorithm>
#include <cmath>

#include "pobsim/weights.hpp"

namespace pob {

StakeTable::StakeTable(std::map<ValidatorId, double> stakes, std::uint64_t slash_delay_blocks,
                       double slash_fraction)
    : stakes_(std::move(stakes)),
      slash_delay_blocks_(slash_delay_blocks),
      slash_fraction_(slash_fraction) {
  require(slash_fraction >= 0.0 && slash_fraction <= 1.0, "slash fraction must lie in [0,1]");
  for (const auto& [id, s] : stakes_) {
    require(std::isfinite(s) && s >= 0.0, "stake must be a non-negative number");
  }
}

double StakeTable::stake(ValidatorId id) const {
  auto it = stakes_.find(id);
  if (it == stakes_.end()) fail(ErrorCode::kNotFound, "unknown validator " + to_string(id));
  return it->second;
}

double StakeTable::total() const {
  double sum = 0.0;
  for (const auto& [id, s] : stakes_) sum += s;
  return sum;
}

void StakeTable::set(ValidatorId id, double stake) {
  require(std::isfinite(stake) && stake >= 0.0, "stake must be a non-negative number");
  stakes_[id] = stake;
}

void StakeTable::erase(ValidatorId id) { stakes_.erase(id); }

std::map<ValidatorId, double> pos_election_probabilities(
    const StakeTable& stakes, std::span<const ValidatorId> eligible) {
  require(!eligible.empty(), "no eligible validators");
  double total = 0.0;
  for (ValidatorId id : eligible) total += stakes.stake(id);
  if (!(total > 0.0)) fail(ErrorCode::kDegenerateElection, "total stake is zero");
  std::map<ValidatorId, double> p;
  for (ValidatorId id : eligible) p[id] = stakes.stake(id) / total;
  return p;
}

ValidatorId pos_select_proposer(const StakeTable& stakes, Rng& rng) {
  std::vector<ValidatorId> all;
  for (const auto& [id, s] : stakes.stakes()) all.push_back(id);
  return pos_select_proposer(stakes, all, rng);
}

ValidatorId pos_select_proposer(const StakeTable& stakes,
                                std::span<const ValidatorId> eligible, Rng& rng) {
  return draw_from(pos_election_probabilities(stakes, eligible), rng);
}

StakeTable pos_slash(const StakeTable& stakes, ValidatorId offender) {
  StakeTable out = stakes;
  out.set(offender, stakes.stake(offender) * (1.0 - stakes.slash_fraction()));
  return out;
}

void SlashQueue::report(const StakeTable& stakes, ValidatorId offender,
                        std::uint64_t detection_block, std::uint32_t epoch,
                        std::size_t behavior_index) {
  for (PendingSlash& p : pending_) {
    if (p.offender == offender) {
      p.evidence.emplace_back(epoch, behavior_index);
      return;
    }
  }
  PendingSlash p;
  p.offender = offender;
  p.detection_block = detection_block;
  p.effective_block = slash_effective_block(stakes, detection_block);
  p.evidence.emplace_back(epoch, behavior_index);
  pending_.push_back(std::move(p));
}

std::vector<PendingSlash> SlashQueue::apply_due(StakeTable& stakes, std::uint64_t height) {
  std::vector<PendingSlash> due;
  auto keep = std::stable_partition(pending_.begin(), pending_.end(),
                                    [&](const PendingSlash& p) {
                                      return p.effective_block > height;
                                    });
  due.assign(std::make_move_iterator(keep), std::make_move_iterator(pending_.end()));
  pending_.erase(keep, pending_.end());
  for (const PendingSlash& p : due) {
    if (stakes.contains(p.offender)) stakes = pos_slash(stakes, p.offender);
  }
  return due;
}

std::map<ValidatorId, double> pareto_stakes(std::span<const ValidatorId> ids, double alpha,
                                            Rng& rng) {
  require(alpha > 0.0, "pareto alpha must be positive");
  std::map<ValidatorId, double> out;
  for (ValidatorId id : ids) out[id] = std::pow(1.0 - rng.uniform(), -1.0 / alpha);
  return out;
}

}  // namespace pob
