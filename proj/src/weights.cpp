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

#include "pobsim/weights.hpp"

#include <algorithm>
#include <cmath>

namespace pob {

WeightTable::WeightTable(std::map<ValidatorId, double> entries, std::uint32_t epoch,
                         bool normalized)
    : entries_(std::move(entries)), epoch_(epoch), normalized_(normalized) {
  for (const auto& [id, w] : entries_) {
    require(std::isfinite(w) && w >= 0.0, "weight of validator " + to_string(id) +
                                              " must be a non-negative number");
  }
}

WeightTable WeightTable::uniform(std::span<const ValidatorId> ids, bool normalized) {
  std::map<ValidatorId, double> entries;
  const double share = ids.empty() ? 0.0 : 1.0 / static_cast<double>(ids.size());
  for (ValidatorId id : ids) entries[id] = normalized ? share : 1.0;
  return WeightTable(std::move(entries), 0, normalized);
}

double WeightTable::weight(ValidatorId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) fail(ErrorCode::kNotFound, "unknown validator " + to_string(id));
  return it->second;
}

double WeightTable::total() const {
  double sum = 0.0;
  for (const auto& [id, w] : entries_) sum += w;
  return sum;
}

double WeightTable::total(std::span<const ValidatorId> ids) const {
  double sum = 0.0;
  for (ValidatorId id : ids) sum += weight(id);
  return sum;
}

void WeightTable::set(ValidatorId id, double weight) {
  require(std::isfinite(weight) && weight >= 0.0, "weight must be a non-negative number");
  entries_[id] = weight;
}

void WeightTable::erase(ValidatorId id) { entries_.erase(id); }

void WeightTable::normalize() {
  if (!normalized_) return;
  const double sum = total();
  if (sum <= 0.0) return;
  for (auto& [id, w] : entries_) w /= sum;
}

WeightTable update_weights(const WeightTable& table,
                           const std::map<ValidatorId, double>& scores, double rho) {
  require(rho >= 0.0 && rho <= 1.0, "rho must lie in [0,1]");
  std::map<ValidatorId, double> clamped;
  double sum = 0.0;
  for (const auto& [id, w] : table.entries()) {
    auto it = scores.find(id);
    const double u = it == scores.end() ? 0.0 : std::max(0.0, it->second);
    clamped[id] = u;
    sum += u;
  }
  const double n = static_cast<double>(table.size());
  std::map<ValidatorId, double> next;
  for (const auto& [id, w] : table.entries()) {
    const double share = sum > 0.0 ? clamped[id] / sum : 1.0 / n;
    next[id] = (1.0 - rho) * w + rho * share;
  }
  return WeightTable(std::move(next), table.epoch() + 1, table.normalized());
}

WeightTable apply_additive_slash(const WeightTable& table, ValidatorId target,
                                 double delta_w) {
  require(delta_w >= 0.0, "slash amount must be non-negative");
  WeightTable out = table;
  out.set(target, std::max(0.0, table.weight(target) - delta_w));
  return out;
}

WeightTable apply_multiplicative_slash(const WeightTable& table, ValidatorId target,
                                       double rho_p) {
  require(rho_p >= 0.0 && rho_p < 1.0, "rho_p must lie in [0,1)");
  WeightTable out = table;
  out.set(target, rho_p * table.weight(target));
  return out;
}

WeightTable apply_full_slash(const WeightTable& table, ValidatorId target) {
  WeightTable out = table;
  (void)table.weight(target);
  out.set(target, 0.0);
  return out;
}

std::map<ValidatorId, double> election_probabilities(const WeightTable& table,
                                                     const LeaderElectionParams& params,
                                                     std::span<const ValidatorId> active) {
  require(!active.empty(), "active set is empty");
  require(params.delta >= 0.0 && params.delta <= 1.0, "delta must lie in [0,1]");
  const double sum = table.total(active);
  const double n = static_cast<double>(active.size());
  std::map<ValidatorId, double> p;
  if (sum <= 0.0) {
    if (params.delta <= 0.0) {
      fail(ErrorCode::kDegenerateElection, "every active weight is zero and delta is 0");
    }
    for (ValidatorId id : active) p[id] = 1.0 / n;
    return p;
  }
  for (ValidatorId id : active) {
    p[id] = params.delta / n + (1.0 - params.delta) * table.weight(id) / sum;
  }
  return p;
}

ValidatorId select_proposer(const WeightTable& table, const LeaderElectionParams& params,
                            std::span<const ValidatorId> active, Rng& rng) {
  return draw_from(election_probabilities(table, params, active), rng);
}

ValidatorId draw_from(const std::map<ValidatorId, double>& probabilities, Rng& rng) {
  require(!probabilities.empty(), "empty distribution");
  double total = 0.0;
  for (const auto& [id, p] : probabilities) total += p;
  if (!(total > 0.0)) fail(ErrorCode::kDegenerateElection, "distribution has no mass");
  const double u = rng.uniform() * total;
  double cum = 0.0;
  ValidatorId last_positive = probabilities.begin()->first;
  for (const auto& [id, p] : probabilities) {
    if (p <= 0.0) continue;
    cum += p;
    last_positive = id;
    if (u < cum) return id;
  }
  return last_positive;
}

}  // namespace pob
