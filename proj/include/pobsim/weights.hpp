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

#ifndef POBSIM_WEIGHTS_HPP_
#define POBSIM_WEIGHTS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pobsim/common.hpp"
#include "pobsim/random.hpp"

namespace pob {

// Consensus weight per validator. A value type: every update returns a new
// table.
class WeightTable {
 public:
  WeightTable() = default;
  explicit WeightTable(std::map<ValidatorId, double> entries, std::uint32_t epoch = 0,
                       bool normalized = true);

  static WeightTable uniform(std::span<const ValidatorId> ids, bool normalized = true);

  const std::map<ValidatorId, double>& entries() const { return entries_; }
  std::uint32_t epoch() const { return epoch_; }
  bool normalized() const { return normalized_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(ValidatorId id) const { return entries_.contains(id); }

  // Throws kNotFound for unknown validators.
  double weight(ValidatorId id) const;
  double total() const;
  double total(std::span<const ValidatorId> ids) const;

  void set(ValidatorId id, double weight);
  void erase(ValidatorId id);
  void set_epoch(std::uint32_t epoch) { epoch_ = epoch; }

  // Rescales to unit sum in normalized mode. A table whose weights are all
  // zero is left untouched.
  void normalize();

  bool operator==(const WeightTable&) const = default;

 private:
  std::map<ValidatorId, double> entries_;
  std::uint32_t epoch_ = 0;
  bool normalized_ = true;
};

// Exponential moving average of weight towards each validator's share of
// the epoch's utility. Scores are clamped at zero for the share; a zero
// total falls back to the uniform share 1/N. Validators in the table but
// absent from `scores` count as scoring zero.
WeightTable update_weights(const WeightTable& table,
                           const std::map<ValidatorId, double>& scores, double rho);

// W <- max(0, W - delta_w). Other entries are untouched; no renormalization.
WeightTable apply_additive_slash(const WeightTable& table, ValidatorId target,
                                 double delta_w);
// W <- rho_p * W with rho_p in [0, 1).
WeightTable apply_multiplicative_slash(const WeightTable& table, ValidatorId target,
                                       double rho_p);
// W <- 0.
WeightTable apply_full_slash(const WeightTable& table, ValidatorId target);

struct LeaderElectionParams {
  double delta = 0.05;  // baseline share spread uniformly over the active set
};

// P(i) = delta / |active| + (1 - delta) * W_i / sum_{k in active} W_k.
// If every active weight is zero the proportional part is dropped, so the
// distribution is the uniform baseline (requires delta > 0).
std::map<ValidatorId, double> election_probabilities(
    const WeightTable& table, const LeaderElectionParams& params,
    std::span<const ValidatorId> active);

ValidatorId select_proposer(const WeightTable& table, const LeaderElectionParams& params,
                            std::span<const ValidatorId> active, Rng& rng);

// Draws from a discrete distribution given as (id, probability) pairs in a
// fixed order. One uniform draw per call.
ValidatorId draw_from(const std::map<ValidatorId, double>& probabilities, Rng& rng);

}  // namespace pob

#endif  // POBSIM_WEIGHTS_HPP_
