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

// Stake-weighted baseline with delayed slashing.

#ifndef POBSIM_BASELINE_POS_HPP_
#define POBSIM_BASELINE_POS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pobsim/common.hpp"
#include "pobsim/random.hpp"

namespace pob {

class StakeTable {
 public:
  StakeTable() = default;
  StakeTable(std::map<ValidatorId, double> stakes, std::uint64_t slash_delay_blocks = 100,
             double slash_fraction = 1.0);

  const std::map<ValidatorId, double>& stakes() const { return stakes_; }
  std::uint64_t slash_delay_blocks() const { return slash_delay_blocks_; }
  double slash_fraction() const { return slash_fraction_; }

  double stake(ValidatorId id) const;  // kNotFound for unknown ids
  double total() const;
  bool contains(ValidatorId id) const { return stakes_.contains(id); }
  void set(ValidatorId id, double stake);
  void erase(ValidatorId id);

  bool operator==(const StakeTable&) const = default;

 private:
  std::map<ValidatorId, double> stakes_;
  std::uint64_t slash_delay_blocks_ = 100;
  double slash_fraction_ = 1.0;
};

// Proportional lottery over stakes. One draw per call. Throws
// kDegenerateElection when the stake total is zero.
ValidatorId pos_select_proposer(const StakeTable& stakes, Rng& rng);
// Same, restricted to `eligible`.
ValidatorId pos_select_proposer(const StakeTable& stakes,
                                std::span<const ValidatorId> eligible, Rng& rng);

std::map<ValidatorId, double> pos_election_probabilities(
    const StakeTable& stakes, std::span<const ValidatorId> eligible);

// Immediate reduction of the offender's stake by the table's slash fraction.
StakeTable pos_slash(const StakeTable& stakes, ValidatorId offender);

inline std::uint64_t slash_effective_block(const StakeTable& stakes,
                                           std::uint64_t detection_block) {
  return detection_block + stakes.slash_delay_blocks();
}

struct PendingSlash {
  ValidatorId offender;
  std::uint64_t detection_block = 0;
  std::uint64_t effective_block = 0;
  // (epoch, behaviour index) pairs this slash answers for.
  std::vector<std::pair<std::uint32_t, std::size_t>> evidence;

  bool operator==(const PendingSlash&) const = default;
};

// Slashes waiting for their delay to elapse, applied in detection order.
class SlashQueue {
 public:
  // Adds evidence to the offender's pending slash, or schedules a new one.
  void report(const StakeTable& stakes, ValidatorId offender, std::uint64_t detection_block,
              std::uint32_t epoch, std::size_t behavior_index);

  // Applies every slash whose effective block is <= height and removes it.
  std::vector<PendingSlash> apply_due(StakeTable& stakes, std::uint64_t height);

  const std::vector<PendingSlash>& pending() const { return pending_; }

 private:
  std::vector<PendingSlash> pending_;
};

// Heavy-tailed stake vector: x = (1 - u)^(-1/alpha). One draw per
// validator in id order.
std::map<ValidatorId, double> pareto_stakes(std::span<const ValidatorId> ids, double alpha,
                                            Rng& rng);

}  // namespace pob

#endif  // POBSIM_BASELINE_POS_HPP_
