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

#include "pobsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pob {
namespace {

constexpr double kShareTolerance = 1e-12;

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

const EpochLedger* ledger_at(const TrialResult& trial, std::uint32_t epoch) {
  if (epoch < trial.ledgers.size() && trial.ledgers[epoch].epoch == epoch) {
    return &trial.ledgers[epoch];
  }
  for (const EpochLedger& l : trial.ledgers) {
    if (l.epoch == epoch) return &l;
  }
  return nullptr;
}

double value_or_zero(const std::map<ValidatorId, double>& m, ValidatorId id) {
  auto it = m.find(id);
  return it == m.end() ? 0.0 : it->second;
}

bool is_sybil(StrategyKind k) {
  return k == StrategyKind::kSybilBurst || k == StrategyKind::kAdaptiveSybil;
}

}  // namespace

std::optional<double> fraud_acceptance_rate(std::uint64_t attempted, std::uint64_t accepted) {
  require(accepted <= attempted, "accepted frauds exceed attempted frauds");
  if (attempted == 0) return std::nullopt;
  return static_cast<double>(accepted) / static_cast<double>(attempted);
}

std::optional<double> gini(std::span<const double> counts) {
  require(!counts.empty(), "gini of an empty vector");
  double sum = 0.0;
  for (double x : counts) {
    require(std::isfinite(x) && x >= 0.0, "gini needs non-negative counts");
    sum += x;
  }
  if (!(sum > 0.0)) return std::nullopt;
  // Sorted form of the pairwise sum: sum_i (2i - n - 1) x_(i).
  std::vector<double> xs(counts.begin(), counts.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    acc += (2.0 * static_cast<double>(i + 1) - n - 1.0) * xs[i];
  }
  return std::clamp(acc / (n * sum), 0.0, 1.0);
}

std::optional<std::uint64_t> adaptation_time(std::span<const double> trajectory, double target,
                                             AdaptationMode mode) {
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const bool hit =
        mode == AdaptationMode::kRise ? trajectory[i] >= target : trajectory[i] < target;
    if (hit) return i;
  }
  return std::nullopt;
}

std::set<std::pair<std::uint32_t, std::size_t>> punished_behaviors(
    const TrialResult& trial, std::uint32_t detection_window) {
  std::set<std::pair<std::uint32_t, std::size_t>> punished;
  for (const EpochLedger& l : trial.ledgers) {
    for (const Verdict& v : l.verdicts) {
      if (v.guilty && v.epoch + detection_window > l.epoch) {
        punished.emplace(v.epoch, v.behavior_index);
      }
    }
    for (const SlashRecord& s : l.slashes) {
      for (const auto& ev : s.evidence) {
        if (ev.first + detection_window > l.epoch) punished.insert(ev);
      }
    }
  }
  return punished;
}

namespace {

// Calls f(ledger, index, behaviour, accepted) for every fraud behaviour.
template <typename F>
void for_each_fraud(const TrialResult& trial, std::uint32_t window, F&& f) {
  const auto punished = punished_behaviors(trial, window);
  for (const EpochLedger& l : trial.ledgers) {
    std::map<std::uint64_t, bool> confirmed;
    for (const BlockRecord& b : l.blocks) confirmed[b.height] = b.confirmed;
    for (std::size_t i = 0; i < l.behaviors.size(); ++i) {
      const LedgerBehavior& b = l.behaviors[i];
      if (!b.record.is_fraud_ground_truth) continue;
      const bool accepted = b.included && confirmed[b.height] && !punished.contains({l.epoch, i});
      f(l, i, b, accepted);
    }
  }
}

}  // namespace

FraudTally tally_frauds(const TrialResult& trial, std::uint32_t detection_window) {
  FraudTally t;
  for_each_fraud(trial, detection_window,
                 [&](const EpochLedger&, std::size_t, const LedgerBehavior& b, bool accepted) {
                   ++t.attempted;
                   if (accepted) {
                     ++t.accepted;
                     t.accepted_value += std::abs(b.record.base_utility);
                   }
                 });
  return t;
}

double loss_averted(const TrialResult& pob, const TrialResult& pos,
                    std::uint32_t detection_window) {
  require(pob.protocol == Protocol::kPob && pos.protocol == Protocol::kPos,
          "loss averted needs one PoB and one PoS trial");
  require(pob.seed == pos.seed, "loss averted needs trials paired on one seed");
  return tally_frauds(pos, detection_window).accepted_value -
         tally_frauds(pob, detection_window).accepted_value;
}

std::vector<double> focal_round_payoffs(const TrialResult& trial, const ScenarioConfig& config,
                                        ValidatorId focal) {
  std::map<std::uint32_t, double> gains;
  for_each_fraud(trial, config.detection_window,
                 [&](const EpochLedger& l, std::size_t, const LedgerBehavior& b, bool accepted) {
                   if (accepted && b.record.actor == focal) {
                     gains[l.epoch] +=
                         config.incentive.fraud_gain_per_unit * std::abs(b.record.base_utility);
                   }
                 });
  std::vector<double> out;
  out.reserve(trial.ledgers.size());
  for (const EpochLedger& l : trial.ledgers) {
    double payoff = gains[l.epoch];
    for (const Payout& p : l.payouts) {
      if (p.validator == focal) payoff += p.total;
    }
    for (const Verdict& v : l.verdicts) {
      if (v.guilty && v.subject == focal) payoff -= config.penalty.fine;
    }
    out.push_back(payoff);
  }
  return out;
}

TrialMetrics compute_metrics(const TrialResult& trial, const ScenarioConfig& config) {
  TrialMetrics m;
  const FraudTally tally = tally_frauds(trial, config.detection_window);
  m.attempted = tally.attempted;
  m.accepted = tally.accepted;
  m.loss = tally.accepted_value;
  m.far = fraud_acceptance_rate(tally.attempted, tally.accepted);

  // Proposer counts and latency.
  std::map<ValidatorId, double> proposals;
  for (const ValidatorInfo& v : trial.validators) proposals[v.id] = 0.0;
  double latency_sum = 0.0;
  std::size_t blocks = 0;
  for (const EpochLedger& l : trial.ledgers) {
    for (const BlockRecord& b : l.blocks) {
      proposals[b.proposer] += 1.0;
      latency_sum += b.latency_ms;
      ++blocks;
    }
  }
  if (blocks > 0) {
    std::vector<double> counts;
    for (const auto& [id, c] : proposals) counts.push_back(c);
    m.proposer_gini = gini(counts);
    m.mean_latency_ms = latency_sum / static_cast<double>(blocks);

    std::vector<const ValidatorInfo*> genesis;
    for (const ValidatorInfo& v : trial.validators) {
      if (v.join_epoch == 0) genesis.push_back(&v);
    }
    std::stable_sort(genesis.begin(), genesis.end(),
                     [](const ValidatorInfo* a, const ValidatorInfo* b) {
                       if (a->initial_weight != b->initial_weight) {
                         return a->initial_weight < b->initial_weight;
                       }
                       return a->id < b->id;
                     });
    const std::size_t k = std::max<std::size_t>(1, genesis.size() / 10);
    if (!genesis.empty()) {
      double bottom = 0.0;
      for (std::size_t i = 0; i < k && i < genesis.size(); ++i) bottom += proposals[genesis[i]->id];
      m.bottom_decile_share = bottom / static_cast<double>(blocks);
    }
  }

  std::map<ValidatorId, const ValidatorInfo*> info;
  for (const ValidatorInfo& v : trial.validators) info[v.id] = &v;

  // Newcomers: honest validators joining after genesis, timed from their
  // join block until their election probability reaches the fair share.
  std::vector<double> adapt;
  for (const ValidatorInfo& v : trial.validators) {
    if (v.role != StrategyKind::kHonest || v.join_epoch == 0) continue;
    auto it = trial.election_trace.find(v.id);
    if (it == trial.election_trace.end()) continue;
    const std::vector<double>& p = it->second;
    // The trace is zero until the validator is eligible.
    const auto start = static_cast<std::uint64_t>(
        std::find_if(p.begin(), p.end(), [](double x) { return x > 0.0; }) - p.begin());
    std::vector<double> scaled;
    for (std::uint64_t h = start; h < p.size() && h < trial.active_count.size(); ++h) {
      scaled.push_back(p[h] * trial.active_count[h]);
    }
    if (auto t = adaptation_time(scaled, 1.0 - kShareTolerance, AdaptationMode::kRise)) {
      adapt.push_back(static_cast<double>(*t));
    }
  }
  m.newcomer_adaptation_blocks = mean_of(adapt);

  // Suppression: first fraud of each genesis attacker to the first block at
  // which its election probability falls under a tenth of its earlier peak.
  std::map<ValidatorId, std::uint64_t> first_fraud;
  for (const EpochLedger& l : trial.ledgers) {
    for (const LedgerBehavior& b : l.behaviors) {
      if (!b.record.is_fraud_ground_truth) continue;
      first_fraud.try_emplace(b.record.actor, b.height);
    }
  }
  std::vector<double> suppression;
  for (const auto& [id, h0] : first_fraud) {
    auto vi = info.find(id);
    if (vi == info.end() || vi->second->join_epoch != 0) continue;
    auto it = trial.election_trace.find(id);
    if (it == trial.election_trace.end() || h0 >= it->second.size()) continue;
    const std::vector<double>& p = it->second;
    const double peak = *std::max_element(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(h0) + 1);
    std::span<const double> after(p.data() + h0, p.size() - h0);
    if (auto t = adaptation_time(after, 0.1 * peak, AdaptationMode::kFall)) {
      suppression.push_back(static_cast<double>(*t));
    }
  }
  m.suppression_blocks = mean_of(suppression);

  // Verdict accounting.
  std::map<ValidatorId, bool> seen_guilty;
  std::vector<double> drops;
  for (const EpochLedger& l : trial.ledgers) {
    for (const Verdict& v : l.verdicts) {
      if (!v.guilty) continue;
      ++m.guilty_verdicts;
      const EpochLedger* src = ledger_at(trial, v.epoch);
      const bool fraud = src != nullptr && v.behavior_index < src->behaviors.size() &&
                         src->behaviors[v.behavior_index].record.is_fraud_ground_truth;
      if (!fraud) ++m.false_positives;
      auto vi = info.find(v.subject);
      if (vi != info.end() && vi->second->role == StrategyKind::kGriefing) ++m.griefer_guilty;
      if (!fraud || seen_guilty[v.subject]) continue;
      seen_guilty[v.subject] = true;
      const double before = value_or_zero(l.weights_before, v.subject);
      if (!(before > 0.0)) continue;
      double lowest = before;
      for (std::uint32_t e = l.epoch; e <= l.epoch + 2; ++e) {
        if (const EpochLedger* x = ledger_at(trial, e)) {
          lowest = std::min(lowest, value_or_zero(x->weights_after, v.subject));
        }
      }
      drops.push_back(1.0 - lowest / before);
    }
  }
  m.attacker_weight_drop = mean_of(drops);

  // Sybil share of total weight (or stake).
  bool any_sybil = false;
  for (const ValidatorInfo& v : trial.validators) any_sybil = any_sybil || is_sybil(v.role);
  if (any_sybil && !trial.ledgers.empty()) {
    double worst = 0.0;
    for (const EpochLedger& l : trial.ledgers) {
      double sybil = 0.0;
      double total = 0.0;
      for (const auto& [id, w] : l.weights_after) {
        total += w;
        auto vi = info.find(id);
        if (vi != info.end() && is_sybil(vi->second->role)) sybil += w;
      }
      if (total > 0.0) worst = std::max(worst, sybil / total);
    }
    m.max_sybil_share = worst;
  }

  // Griefers: weight at the end of the empty-block run against the start.
  const std::vector<ValidatorPlan> plans = config.resolved_roster();
  std::vector<double> grief;
  for (const ValidatorPlan& plan : plans) {
    if (plan.strategy.kind != StrategyKind::kGriefing) continue;
    const auto start = static_cast<std::uint32_t>(plan.strategy.number("start_epoch"));
    const auto run = static_cast<std::uint32_t>(plan.strategy.number("empty_block_run"));
    if (run == 0) continue;
    const EpochLedger* first = ledger_at(trial, start);
    const EpochLedger* last = ledger_at(trial, start + run - 1);
    if (first == nullptr || last == nullptr) continue;
    const double before = value_or_zero(first->weights_before, plan.id);
    if (!(before > 0.0)) continue;
    grief.push_back(1.0 - value_or_zero(last->weights_after, plan.id) / before);
  }
  m.griefer_weight_drop = mean_of(grief);

  if (trial.fork) {
    m.fork_adopted = trial.fork->adopted ? 1.0 : 0.0;
    if (trial.fork->total_weight > 0.0) {
      m.fork_compromised_share = trial.fork->fork_signer_weight / trial.fork->total_weight;
    }
  }
  return m;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "far",
      "attempted",
      "accepted",
      "loss",
      "proposer_gini",
      "mean_latency_ms",
      "newcomer_adaptation_blocks",
      "suppression_blocks",
      "bottom_decile_share",
      "false_positives",
      "guilty_verdicts",
      "max_sybil_share",
      "attacker_weight_drop",
      "griefer_weight_drop",
      "griefer_guilty",
      "fork_adopted",
      "fork_compromised_share",
  };
  return names;
}

std::vector<std::optional<double>> metric_values(const TrialMetrics& m) {
  return {
      m.far,
      static_cast<double>(m.attempted),
      static_cast<double>(m.accepted),
      m.loss,
      m.proposer_gini,
      m.mean_latency_ms,
      m.newcomer_adaptation_blocks,
      m.suppression_blocks,
      m.bottom_decile_share,
      static_cast<double>(m.false_positives),
      static_cast<double>(m.guilty_verdicts),
      m.max_sybil_share,
      m.attacker_weight_drop,
      m.griefer_weight_drop,
      static_cast<double>(m.griefer_guilty),
      m.fork_adopted,
      m.fork_compromised_share,
  };
}

Aggregate aggregate(std::span<const std::optional<double>> values) {
  Aggregate a;
  double sum = 0.0;
  for (const auto& v : values) {
    if (!v) continue;
    sum += *v;
    ++a.n;
  }
  if (a.n == 0) return a;
  const double mean = sum / static_cast<double>(a.n);
  a.mean = mean;
  if (a.n >= 2) {
    double ss = 0.0;
    for (const auto& v : values) {
      if (v) ss += (*v - mean) * (*v - mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(a.n - 1));
    a.ci_half_width = 1.96 * sd / std::sqrt(static_cast<double>(a.n));
  }
  return a;
}

}  // namespace pob
