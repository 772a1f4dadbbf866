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

#include "pobsim/netsim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pobsim/baseline_pos.hpp"
#include "pobsim/experiments.hpp"

namespace pob {

void SimClock::schedule(double delay, std::uint64_t tag) {
  require(delay >= 0.0 && std::isfinite(delay), "event delay must be non-negative");
  queue_.push({now_ + delay, next_sequence_++, tag});
}

SimClock::Event SimClock::pop() {
  require(!queue_.empty(), "pop from an empty event queue");
  Event e = queue_.top();
  queue_.pop();
  now_ = e.time;
  return e;
}

void SimClock::reset() {
  queue_ = {};
  now_ = 0.0;
  next_sequence_ = 0;
}

LatencyModel::LatencyModel(LatencyDistribution distribution, double mean_ms)
    : distribution_(distribution), mean_ms_(mean_ms) {
  require(mean_ms > 0.0 && std::isfinite(mean_ms), "mean latency must be positive");
}

double LatencyModel::sample(Rng& rng) const {
  switch (distribution_) {
    case LatencyDistribution::kExponential: return rng.exponential(mean_ms_);
    case LatencyDistribution::kFixed: (void)rng.uniform(); return mean_ms_;
    case LatencyDistribution::kUniform: return rng.uniform(0.0, 2.0 * mean_ms_);
  }
  return mean_ms_;
}

Block genesis_block() { return Block{}; }

Block extend(const Block& parent, ValidatorId proposer, std::vector<BehaviorRecord> behaviors,
             double timestamp_ms, std::vector<ValidatorId> signers) {
  Block b;
  b.height = parent.height + 1;
  b.parent = parent.height;
  b.proposer = proposer;
  b.timestamp_ms = timestamp_ms;
  b.cumulative_utility = parent.cumulative_utility;
  for (const BehaviorRecord& r : behaviors) b.cumulative_utility += total_utility(r);
  b.behaviors = std::move(behaviors);
  b.signers = std::move(signers);
  return b;
}

double signer_weight(const Block& tip, const WeightTable& table) {
  if (tip.signers.empty()) return tip.signer_weight;
  double w = 0.0;
  for (ValidatorId s : tip.signers) {
    if (table.contains(s)) w += table.weight(s);
  }
  return w;
}

bool confirm_block(const Block& block, const std::map<ValidatorId, bool>& votes,
                   const WeightTable& table, const Rational& quorum) {
  (void)block;
  double yes = 0.0;
  double total = 0.0;
  for (const auto& [id, vote] : votes) {
    const double w = table.weight(id);
    total += w;
    if (vote) yes += w;
  }
  return quorum.reached_by(yes, total);
}

const Block& fork_choice(const Block& tip_a, const Block& tip_b, const WeightTable& table) {
  const double wa = signer_weight(tip_a, table);
  const double wb = signer_weight(tip_b, table);
  if (wa != wb) return wa > wb ? tip_a : tip_b;
  if (tip_a.cumulative_utility != tip_b.cumulative_utility) {
    return tip_a.cumulative_utility > tip_b.cumulative_utility ? tip_a : tip_b;
  }
  if (tip_a.proposer != tip_b.proposer) return tip_a.proposer < tip_b.proposer ? tip_a : tip_b;
  return tip_a;
}

namespace {

using nlohmann::json;

json id_map(const std::map<ValidatorId, double>& m) {
  json out = json::object();
  for (const auto& [id, v] : m) out[to_string(id)] = v;
  return out;
}

json id_list(const std::vector<ValidatorId>& ids) {
  json out = json::array();
  for (ValidatorId id : ids) out.push_back(id.value);
  return out;
}

json record_json(const BehaviorRecord& r) {
  return {
      {"actor", r.actor.value},
      {"epoch", r.epoch},
      {"base_utility", r.base_utility},
      {"context_factor", r.context_factor},
      {"initiative", r.initiative},
      {"kind", std::string(to_string(r.kind))},
      {"motivation", {{"intensities", r.motivation.intensities}, {"weights", r.motivation.weights}}},
      {"is_fraud_ground_truth", r.is_fraud_ground_truth},
  };
}

}  // namespace

std::string ledger_to_json(const EpochLedger& l) {
  json j;
  j["epoch"] = l.epoch;
  j["protocol"] = std::string(to_string(l.protocol));
  j["blocks"] = json::array();
  for (const BlockRecord& b : l.blocks) {
    j["blocks"].push_back({{"height", b.height},
                           {"proposer", b.proposer.value},
                           {"confirmed", b.confirmed},
                           {"latency_ms", b.latency_ms}});
  }
  j["behaviors"] = json::array();
  for (const LedgerBehavior& b : l.behaviors) {
    j["behaviors"].push_back(
        {{"record", record_json(b.record)}, {"height", b.height}, {"included", b.included}});
  }
  j["reports"] = json::array();
  for (const SuspicionReport& r : l.reports) {
    j["reports"].push_back({{"subject", r.subject.value},
                            {"epoch", r.epoch},
                            {"behavior_index", r.behavior_index},
                            {"reporter", r.reporter.value}});
  }
  j["verdicts"] = json::array();
  for (const Verdict& v : l.verdicts) {
    j["verdicts"].push_back({{"subject", v.subject.value},
                             {"epoch", v.epoch},
                             {"behavior_index", v.behavior_index},
                             {"committee", id_list(v.committee)},
                             {"malicious_votes", v.malicious_votes},
                             {"malicious_fraction", v.malicious_fraction},
                             {"guilty", v.guilty},
                             {"offense_count", v.offense_count},
                             {"penalty",
                              {{"kind", std::string(to_string(v.penalty.kind))},
                               {"amount", v.penalty.amount}}},
                             {"penalty_applied", v.penalty_applied}});
  }
  j["slashes"] = json::array();
  for (const SlashRecord& s : l.slashes) {
    json ev = json::array();
    for (const auto& [e, i] : s.evidence) ev.push_back({e, i});
    j["slashes"].push_back({{"offender", s.offender.value},
                            {"detection_block", s.detection_block},
                            {"effective_block", s.effective_block},
                            {"stake_before", s.stake_before},
                            {"stake_after", s.stake_after},
                            {"evidence", ev}});
  }
  j["scores"] = id_map(l.scores);
  j["activeness"] = id_map(l.activeness);
  j["payouts"] = json::array();
  for (const Payout& p : l.payouts) {
    j["payouts"].push_back({{"validator", p.validator.value},
                            {"base", p.base},
                            {"bonus", p.bonus},
                            {"activeness_multiplier", p.activeness_multiplier},
                            {"total", p.total}});
  }
  j["weights_before"] = id_map(l.weights_before);
  j["weights_after"] = id_map(l.weights_after);
  j["joined"] = id_list(l.joined);
  j["retired"] = id_list(l.retired);
  return j.dump(2) + "\n";
}

namespace {

RewardSchedule schedule_of(const ScenarioConfig& c) {
  return {c.rewards.total_reward, c.base_reward(), c.rewards.activity_threshold,
          c.rewards.epsilon};
}

std::vector<BehaviorRecord> included_records(const std::vector<LedgerBehavior>& behaviors) {
  std::vector<BehaviorRecord> out;
  for (const LedgerBehavior& b : behaviors) {
    if (b.included) out.push_back(b.record);
  }
  return out;
}

std::map<ValidatorId, double> activeness_of(std::span<const BehaviorRecord> records,
                                            std::span<const ValidatorId> ids,
                                            const ScenarioConfig& c,
                                            std::set<ValidatorId>* flagged) {
  std::map<ValidatorId, double> out;
  for (const auto& [id, in] : activeness_inputs(records, ids, c.activeness.betas)) {
    out[id] = activeness(in);
    if (flagged != nullptr &&
        flag_anomalous(in, c.activeness.freq_threshold, c.activeness.quality_threshold)) {
      flagged->insert(id);
    }
  }
  return out;
}

std::vector<ValidatorId> keys_of(const std::map<ValidatorId, double>& m) {
  std::vector<ValidatorId> out;
  for (const auto& [id, v] : m) out.push_back(id);
  return out;
}

}  // namespace

ReplayCheck replay_epoch(const EpochLedger& ledger, const ScenarioConfig& config) {
  const std::vector<ValidatorId> ids = keys_of(ledger.weights_before);
  const std::vector<BehaviorRecord> records = included_records(ledger.behaviors);
  const auto scores = epoch_scores(records, ids);
  if (scores != ledger.scores) return {false, "scores differ"};
  const auto act = activeness_of(records, ids, config, nullptr);
  if (act != ledger.activeness) return {false, "activeness differs"};

  WeightTable table;
  if (ledger.protocol == Protocol::kPob) {
    table = WeightTable(ledger.weights_before, ledger.epoch, true);
    for (const Verdict& v : ledger.verdicts) {
      if (v.guilty) table = apply_penalty(table, v.subject, v.penalty);
    }
    table.normalize();
    table = update_weights(table, scores, config.rho);
    if (table.entries() != ledger.weights_after) return {false, "weights differ"};
  } else {
    table = WeightTable(ledger.weights_after, ledger.epoch, false);
  }
  const auto payouts = distribute(schedule_of(config), table, scores, act);
  if (payouts != ledger.payouts) return {false, "payouts differ"};
  return {};
}

namespace {

struct Member {
  ValidatorId id;
  StrategySpec spec;
  std::unique_ptr<Strategy> strategy;
  Rng behavior_rng;
  Rng adversary_rng;
  bool present = false;
};

class TrialRunner {
 public:
  TrialRunner(const ScenarioConfig& config, std::uint64_t seed, Protocol protocol,
              const BlockTrace* trace)
      : c_(config),
        seed_(seed),
        protocol_(protocol),
        latency_(config.latency.distribution, config.latency.mean_ms),
        election_rng_(substream(seed, "election")),
        committee_rng_(substream(seed, "committee")),
        latency_rng_(substream(seed, "latency")),
        observation_rng_(substream(seed, "observation")),
        coalition_(std::make_shared<std::set<ValidatorId>>()) {
    c_.validate();
    result_.protocol = protocol;
    result_.seed = seed;
    if (trace != nullptr) {
      for (const TraceEntry& e : *trace) trace_[e.height].push_back(e);
      traced_ = true;
    }
  }

  TrialResult run() {
    const std::uint32_t epochs = traced_ ? static_cast<std::uint32_t>(trace_.size()) : c_.epochs;
    const std::uint32_t bpe = traced_ ? 1 : c_.blocks_per_epoch;
    heights_ = static_cast<std::uint64_t>(epochs) * bpe;
    setup();
    result_.active_count.assign(heights_, 0);
    for (auto& [id, tr] : result_.election_trace) tr.assign(heights_, 0.0);

    auto trace_it = trace_.begin();
    for (std::uint32_t e = 0; e < epochs; ++e) {
      EpochLedger ledger;
      ledger.epoch = e;
      ledger.protocol = protocol_;
      if (e > 0) {
        admit_joiners(e, ledger);
        respawn_sybils(e, ledger);
      }
      ledger.weights_before = snapshot();
      const std::vector<TraceEntry>* height_entries = traced_ ? &trace_it->second : nullptr;
      for (std::uint32_t b = 0; b < bpe; ++b) {
        produce_block(e, b, static_cast<std::uint64_t>(e) * bpe + b, height_entries, ledger);
      }
      if (traced_) ++trace_it;
      close_epoch(e, static_cast<std::uint64_t>(e + 1) * bpe - 1, ledger);
      ledger.weights_after = snapshot();
      result_.ledgers.push_back(std::move(ledger));
      if (fork_trigger_ > 0 && e + 1 == fork_trigger_) run_fork_controller();
    }
    if (fork_trigger_ == 0 && !compromised_.empty()) run_fork_controller();
    return std::move(result_);
  }

 private:
  bool pob() const { return protocol_ == Protocol::kPob; }

  void add_member(ValidatorId id, const StrategySpec& spec, std::uint32_t join_epoch) {
    Member m;
    m.id = id;
    m.spec = spec;
    if (spec.kind == StrategyKind::kSybilBurst || spec.kind == StrategyKind::kAdaptiveSybil) {
      coalition_->insert(id);
    }
    m.strategy = make_strategy(spec, coalition_);
    m.behavior_rng = substream(seed_, "behavior", id.value);
    m.adversary_rng = substream(seed_, "adversary", id.value);
    members_.emplace(id, std::move(m));
    ValidatorInfo info;
    info.id = id;
    info.role = spec.kind;
    info.join_epoch = join_epoch;
    info_index_[id] = result_.validators.size();
    result_.validators.push_back(info);
    result_.election_trace[id].assign(heights_, 0.0);
  }

  void setup() {
    std::vector<ValidatorPlan> plans = c_.resolved_roster();
    std::vector<ValidatorId> ids;
    for (const ValidatorPlan& p : plans) ids.push_back(p.id);
    Rng stake_rng = substream(seed_, "stakes");
    if (c_.pos.stakes == StakeDistribution::kPareto) {
      base_stake_ = pareto_stakes(ids, c_.pos.pareto_alpha, stake_rng);
    } else {
      for (ValidatorId id : ids) base_stake_[id] = 1.0;
    }
    for (const ValidatorPlan& p : plans) {
      base_stake_[p.id] *= p.weight;
      const StrategySpec spec = traced_ ? StrategySpec{} : p.strategy;
      add_member(p.id, spec, traced_ ? 0 : p.join_epoch);
      plan_weight_[p.id] = p.weight;
      if (spec.kind == StrategyKind::kAdaptiveSybil && !adaptive_spec_) adaptive_spec_ = spec;
      if (spec.kind == StrategyKind::kLongRangeFork) {
        if (compromised_.empty()) {
          fork_depth_ = static_cast<std::uint64_t>(spec.number("fork_depth"));
          fork_trigger_ = static_cast<std::uint32_t>(spec.number("trigger_epoch"));
        }
        compromised_.push_back(p.id);
      }
    }
    created_ = static_cast<std::uint32_t>(plans.size());
    next_id_ = static_cast<std::uint32_t>(plans.size());

    std::map<ValidatorId, double> weights;
    std::map<ValidatorId, double> stakes;
    double raw_total = 0.0;
    for (auto& [id, m] : members_) {
      if (result_.validators[info_index_[id]].join_epoch != 0) continue;
      m.present = true;
      const double raw =
          c_.initial_weights == InitialWeights::kStake ? base_stake_[id] : plan_weight_[id];
      weights[id] = raw;
      raw_total += raw;
      stakes[id] = base_stake_[id];
    }
    if (raw_total > 0.0) {
      for (auto& [id, w] : weights) w /= raw_total;
    }
    table_ = WeightTable(weights, 0, true);
    stakes_ = StakeTable(stakes, c_.pos.slash_delay_blocks, c_.pos.slash_fraction);
    for (auto& [id, m] : members_) {
      if (!m.present) continue;
      result_.validators[info_index_[id]].initial_weight = pob() ? weights[id] : stakes[id];
    }
    refresh_present();
  }

  void refresh_present() {
    present_.clear();
    honest_present_.clear();
    for (const auto& [id, m] : members_) {
      if (!m.present) continue;
      present_.push_back(id);
      if (m.spec.kind == StrategyKind::kHonest) honest_present_.push_back(id);
    }
  }

  void enter(ValidatorId id, double weight_share, double stake, std::uint32_t epoch,
             EpochLedger& ledger) {
    members_.at(id).present = true;
    refresh_present();
    const double w = weight_share / static_cast<double>(present_.size());
    table_.set(id, w);
    if (w > 0.0) table_.normalize();
    stakes_.set(id, stake);
    ValidatorInfo& info = result_.validators[info_index_[id]];
    info.join_epoch = epoch;
    info.initial_weight = pob() ? table_.weight(id) : stake;
    ledger.joined.push_back(id);
  }

  void admit_joiners(std::uint32_t e, EpochLedger& ledger) {
    std::vector<ValidatorId> joining;
    for (const auto& [id, m] : members_) {
      if (!m.present && result_.validators[info_index_[id]].join_epoch == e &&
          !result_.validators[info_index_[id]].retire_epoch) {
        joining.push_back(id);
      }
    }
    for (ValidatorId id : joining) enter(id, plan_weight_[id], base_stake_[id], e, ledger);
  }

  void respawn_sybils(std::uint32_t e, EpochLedger& ledger) {
    if (!adaptive_spec_) return;
    std::vector<ValidatorId> retiring;
    for (ValidatorId id : present_) {
      if (members_.at(id).spec.kind != StrategyKind::kAdaptiveSybil) continue;
      if (pob() ? convicted_last_.contains(id) : ejected_.contains(id)) retiring.push_back(id);
    }
    for (ValidatorId id : retiring) {
      members_.at(id).present = false;
      table_.erase(id);
      stakes_.erase(id);
      result_.validators[info_index_[id]].retire_epoch = e;
      ledger.retired.push_back(id);
    }
    refresh_present();
    if (!retiring.empty()) table_.normalize();

    const double rate = adaptive_spec_->number("spawn_rate");
    const auto cap_param = static_cast<std::uint32_t>(adaptive_spec_->number("population_cap"));
    const std::uint32_t cap = cap_param > 0 ? cap_param : 2 * c_.n_validators;
    const auto budget =
        static_cast<std::size_t>(std::floor(rate * static_cast<double>(present_.size())));
    const std::size_t want = std::min(retiring.size(), budget);
    const double join_weight = adaptive_spec_->number("join_weight");
    for (std::size_t k = 0; k < want; ++k) {
      if (created_ >= cap) {
        if (!cap_logged_) {
          result_.events.push_back("epoch " + std::to_string(e) +
                                   ": population cap reached at " + std::to_string(cap) +
                                   " identities; spawning stopped");
          cap_logged_ = true;
        }
        break;
      }
      const ValidatorId id(next_id_++);
      ++created_;
      add_member(id, *adaptive_spec_, e);
      enter(id, join_weight, c_.pos.join_stake, e, ledger);
    }
  }

  std::map<ValidatorId, double> snapshot() const {
    return pob() ? table_.entries() : stakes_.stakes();
  }

  double voting_weight(ValidatorId id) const {
    if (pob()) return table_.weight(id);
    return stakes_.stake(id);
  }

  void produce_block(std::uint32_t e, std::uint32_t b, std::uint64_t h,
                     const std::vector<TraceEntry>* entries, EpochLedger& ledger) {
    if (!pob()) apply_due_slashes(h, ledger);

    const std::map<ValidatorId, double> probs =
        pob() ? election_probabilities(table_, {c_.delta}, present_)
              : pos_election_probabilities(stakes_, present_);
    for (const auto& [id, p] : probs) result_.election_trace[id][h] = p;
    result_.active_count[h] = static_cast<std::uint32_t>(present_.size());

    ValidatorId proposer;
    bool from_trace = false;
    if (entries != nullptr) {
      for (const TraceEntry& t : *entries) {
        if (t.kind == ActionKind::kProposeBlock && members_.contains(t.actor)) {
          proposer = t.actor;
          from_trace = true;
          break;
        }
      }
    }
    if (!from_trace) proposer = draw_from(probs, election_rng_);

    double block_utility = 0.0;
    auto add = [&](const BehaviorRecord& r) {
      const bool included = pob() || !ejected_.contains(r.actor);
      if (included) block_utility += total_utility(r);
      ledger.behaviors.push_back({r, h, included});
    };
    if (entries != nullptr) {
      for (const TraceEntry& t : *entries) {
        if (!members_.contains(t.actor) || !members_.at(t.actor).present) continue;
        BehaviorRecord r;
        r.actor = t.actor;
        r.epoch = e;
        r.base_utility = t.base_utility;
        r.context_factor = t.phi;
        r.initiative = t.alpha;
        r.kind = t.kind;
        r.motivation = c_.behavior.profile(t.kind);
        r.is_fraud_ground_truth = t.exploit;
        add(r);
      }
    } else {
      for (ValidatorId id : present_) {
        Member& m = members_.at(id);
        ActContext ctx{id, e, h, b, proposer, &c_.behavior};
        for (const BehaviorRecord& r : m.strategy->act(ctx, m.behavior_rng, m.adversary_rng)) {
          add(r);
        }
      }
    }
    cumulative_.push_back(cumulative_.back() + block_utility);
    last_proposer_ = proposer;

    // Every present validator endorses the block; it is final once the
    // arriving votes carry a quorum of weight.
    const double proposal = latency_.sample(latency_rng_);
    double total = 0.0;
    std::map<ValidatorId, bool> votes;
    clock_.reset();
    for (ValidatorId id : present_) {
      total += voting_weight(id);
      votes[id] = true;
      clock_.schedule(latency_.sample(latency_rng_), id.value);
    }
    double yes = 0.0;
    double quorum_time = 0.0;
    bool reached = c_.quorum.reached_by(0.0, total);
    while (!reached && !clock_.empty()) {
      const SimClock::Event ev = clock_.pop();
      yes += voting_weight(ValidatorId(static_cast<std::uint32_t>(ev.tag)));
      if (c_.quorum.reached_by(yes, total)) {
        reached = true;
        quorum_time = ev.time;
      }
    }
    BlockRecord rec;
    rec.height = h;
    rec.proposer = proposer;
    rec.confirmed = confirm_block(Block{}, votes,
                                  pob() ? table_ : WeightTable(stakes_.stakes(), e, false),
                                  c_.quorum);
    rec.latency_ms = proposal + quorum_time + 2.0 * c_.latency.stage_cost_ms +
                     (pob() ? c_.latency.scoring_cost_ms : 0.0);
    ledger.blocks.push_back(rec);
  }

  void apply_due_slashes(std::uint64_t h, EpochLedger& ledger) {
    if (queue_.pending().empty()) return;
    const std::map<ValidatorId, double> before = stakes_.stakes();
    for (PendingSlash& p : queue_.apply_due(stakes_, h)) {
      SlashRecord s;
      s.offender = p.offender;
      s.detection_block = p.detection_block;
      s.effective_block = p.effective_block;
      auto it = before.find(p.offender);
      s.stake_before = it == before.end() ? 0.0 : it->second;
      s.stake_after = stakes_.contains(p.offender) ? stakes_.stake(p.offender) : 0.0;
      s.evidence = std::move(p.evidence);
      if (stakes_.contains(p.offender) && s.stake_after == 0.0) ejected_.insert(p.offender);
      ledger.slashes.push_back(std::move(s));
    }
  }

  void close_epoch(std::uint32_t e, std::uint64_t last_height, EpochLedger& ledger) {
    std::vector<BehaviorRecord> all;
    all.reserve(ledger.behaviors.size());
    for (const LedgerBehavior& b : ledger.behaviors) all.push_back(b.record);
    const std::vector<BehaviorRecord> included = included_records(ledger.behaviors);
    ledger.scores = epoch_scores(included, present_);
    std::set<ValidatorId> flagged;
    ledger.activeness = activeness_of(included, present_, c_, &flagged);

    for (std::size_t i = 0; i < ledger.behaviors.size(); ++i) {
      const LedgerBehavior& b = ledger.behaviors[i];
      if (!b.included) continue;
      if (!(outcome_utility(b.record) < 0.0) && !flagged.contains(b.record.actor)) continue;
      const bool observed = observation_rng_.bernoulli(c_.watchdog.observation_probability);
      auto reporter = std::find_if(honest_present_.begin(), honest_present_.end(),
                                   [&](ValidatorId v) { return v != b.record.actor; });
      if (observed && reporter != honest_present_.end()) {
        ledger.reports.push_back({b.record.actor, e, i, *reporter});
      }
    }

    const RewardSchedule schedule = schedule_of(c_);
    if (pob()) {
      convicted_last_.clear();
      if (c_.watchdog.enabled && !ledger.reports.empty()) {
        WatchdogParams params;
        params.theta = c_.watchdog.theta;
        params.committee_size = c_.committee_size();
        params.detection_accuracy = c_.watchdog.detection_accuracy;
        params.policy = c_.penalty.policy;
        const double accuracy = c_.watchdog.detection_accuracy;
        CommitteeVoter voter = [&](ValidatorId member, const BehaviorRecord& beh, Rng& rng) {
          return members_.at(member).strategy->vote(beh, accuracy, rng);
        };
        WatchdogOutcome out = process_epoch_suspicions(ledger.reports, all, table_, params,
                                                       present_, offenses_, voter,
                                                       committee_rng_);
        table_ = std::move(out.table);
        double slowest = 0.0;
        for (const Verdict& v : out.verdicts) {
          if (v.guilty) convicted_last_.insert(v.subject);
          for (std::size_t k = 0; k < v.committee.size(); ++k) {
            slowest = std::max(slowest, latency_.sample(latency_rng_));
          }
        }
        ledger.blocks.back().latency_ms += slowest + c_.latency.stage_cost_ms;
        ledger.verdicts = std::move(out.verdicts);
      }
      table_.normalize();
      table_ = update_weights(table_, ledger.scores, c_.rho);
      ledger.payouts = distribute(schedule, table_, ledger.scores, ledger.activeness);
    } else {
      for (const SuspicionReport& r : ledger.reports) {
        queue_.report(stakes_, r.subject, last_height, e, r.behavior_index);
      }
      ledger.payouts = distribute(schedule, WeightTable(stakes_.stakes(), e, false),
                                  ledger.scores, ledger.activeness);
    }
  }

  void run_fork_controller() {
    if (result_.fork || compromised_.empty()) return;
    const std::uint64_t tip = cumulative_.size() - 1;
    if (fork_depth_ > tip) {
      fail(ErrorCode::kInvalidInput, "fork checkpoint " + std::to_string(fork_depth_) +
                                         " blocks back precedes genesis at height " +
                                         std::to_string(tip));
    }
    const WeightTable table = pob() ? table_ : WeightTable(stakes_.stakes(), 0, false);
    const std::set<ValidatorId> bad(compromised_.begin(), compromised_.end());

    Block main;
    main.height = tip;
    main.proposer = last_proposer_;
    main.cumulative_utility = cumulative_.back();
    for (ValidatorId id : present_) {
      if (!bad.contains(id)) main.signers.push_back(id);
    }

    ForkOutcome f;
    f.checkpoint = tip - fork_depth_;
    f.fork_height = tip;
    f.total_weight = table.total();
    f.main_signer_weight = signer_weight(main, table);
    f.main_utility = main.cumulative_utility;
    if (fork_depth_ == 0) {
      f.fork_signer_weight = f.main_signer_weight;
      f.fork_utility = f.main_utility;
      result_.fork = f;
      return;
    }
    // The private chain re-proposes every height since the checkpoint with
    // the compromised keys only.
    Block fork;
    fork.height = f.checkpoint;
    fork.cumulative_utility = cumulative_[f.checkpoint];
    Rng rng = substream(seed_, "fork");
    for (std::uint64_t k = 0; k < fork_depth_; ++k) {
      const ValidatorId proposer = compromised_[k % compromised_.size()];
      ActContext ctx{proposer, 0, fork.height, 0, proposer, &c_.behavior};
      fork = extend(fork, proposer, {honest_behavior(ctx, rng)}, 0.0, {});
    }
    fork.signers = compromised_;
    f.fork_signer_weight = signer_weight(fork, table);
    f.fork_utility = fork.cumulative_utility;
    f.fork_preferred = &fork_choice(main, fork, table) == &fork;
    f.adopted = f.fork_preferred && c_.quorum.reached_by(f.fork_signer_weight, f.total_weight);
    result_.events.push_back(std::string("long-range fork from height ") +
                             std::to_string(f.checkpoint) +
                             (f.adopted ? " adopted" : " rejected"));
    result_.fork = f;
  }

  ScenarioConfig c_;
  std::uint64_t seed_;
  Protocol protocol_;
  LatencyModel latency_;
  Rng election_rng_;
  Rng committee_rng_;
  Rng latency_rng_;
  Rng observation_rng_;
  Coalition coalition_;
  SimClock clock_;

  bool traced_ = false;
  std::map<std::uint64_t, std::vector<TraceEntry>> trace_;
  std::uint64_t heights_ = 0;

  std::map<ValidatorId, Member> members_;
  std::map<ValidatorId, std::size_t> info_index_;
  std::map<ValidatorId, double> base_stake_;
  std::map<ValidatorId, double> plan_weight_;
  std::vector<ValidatorId> present_;
  std::vector<ValidatorId> honest_present_;

  WeightTable table_;
  StakeTable stakes_;
  SlashQueue queue_;
  std::set<ValidatorId> ejected_;
  std::map<ValidatorId, std::uint32_t> offenses_;
  std::set<ValidatorId> convicted_last_;

  std::optional<StrategySpec> adaptive_spec_;
  std::uint32_t created_ = 0;
  std::uint32_t next_id_ = 0;
  bool cap_logged_ = false;

  std::vector<ValidatorId> compromised_;
  std::uint64_t fork_depth_ = 0;
  std::uint32_t fork_trigger_ = 0;
  std::vector<double> cumulative_{0.0};
  ValidatorId last_proposer_;

  TrialResult result_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return !s.empty() && ec == std::errc() && ptr == end;
}

}  // namespace

TrialResult run_trial(const ScenarioConfig& config, std::uint64_t seed, Protocol protocol) {
  return TrialRunner(config, seed, protocol, nullptr).run();
}

BlockTrace parse_trace(std::string_view text, std::uint32_t n_validators) {
  BlockTrace out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    auto bad = [&](const std::string& what) -> void {
      fail(ErrorCode::kParse, "trace line " + std::to_string(line_no) + ": " + what);
    };
    std::vector<std::string_view> fields;
    for (std::size_t start = 0;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) bad("expected 7 fields, got " + std::to_string(fields.size()));
    TraceEntry e;
    std::uint32_t actor = 0;
    int exploit = 0;
    if (!parse_number(fields[0], e.height)) bad("bad height");
    if (!parse_number(fields[1], actor) || actor >= n_validators) bad("bad validator id");
    e.actor = ValidatorId(actor);
    auto kind = parse_action_kind(fields[2]);
    if (!kind) bad("unknown action kind '" + std::string(fields[2]) + "'");
    e.kind = *kind;
    if (!parse_number(fields[3], e.base_utility) || !std::isfinite(e.base_utility)) {
      bad("bad base utility");
    }
    if (!parse_number(fields[4], e.phi) || e.phi < 0.0 || e.phi > 1.0) bad("phi must lie in [0, 1]");
    if (!parse_number(fields[5], e.alpha) || e.alpha < 0.0 || e.alpha > 1.0) {
      bad("alpha must lie in [0, 1]");
    }
    if (!parse_number(fields[6], exploit) || (exploit != 0 && exploit != 1)) {
      bad("exploit flag must be 0 or 1");
    }
    e.exploit = exploit == 1;
    if (e.exploit) {
      if (e.kind != ActionKind::kDoubleSign) e.kind = ActionKind::kFraudAttempt;
      e.base_utility = -std::abs(e.base_utility);
    }
    out.push_back(e);
  }
  return out;
}

BlockTrace load_trace(const std::string& path, std::uint32_t n_validators) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read trace '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str(), n_validators);
}

std::string generate_synthetic_trace(const TraceConfig& trace, std::uint32_t n_validators) {
  require(n_validators > 0, "synthetic trace needs validators");
  Rng rng(trace.seed);
  std::ostringstream o;
  o << "# height,proposer_id,kind,base_utility,phi,alpha,is_exploit\n";
  o << "# synthetic: " << n_validators << " validators, " << trace.blocks
    << " blocks, exploit by " << trace.culprit << " at " << trace.exploit_height << "\n";
  for (std::uint64_t h = 0; h < trace.blocks; ++h) {
    const std::uint32_t proposer = static_cast<std::uint32_t>(h % n_validators);
    for (std::uint32_t v = 0; v < n_validators; ++v) {
      const double kind_draw = rng.uniform();
      const double utility = rng.uniform(0.5, 1.5);
      const double alpha = rng.uniform(0.6, 1.0);
      ActionKind kind = ActionKind::kValidateBlock;
      if (v == proposer) kind = ActionKind::kProposeBlock;
      else if (kind_draw < 0.2) kind = ActionKind::kOracleReport;
      const bool exploit = v == trace.culprit && h == trace.exploit_height;
      if (exploit) kind = ActionKind::kFraudAttempt;
      o << h << ',' << v << ',' << to_string(kind) << ','
        << format_double(exploit ? -trace.exploit_value : utility) << ",1,"
        << format_double(alpha) << ',' << (exploit ? 1 : 0) << '\n';
    }
  }
  return o.str();
}

TrialResult replay_trace(const BlockTrace& trace, const ScenarioConfig& config,
                         std::uint64_t seed, Protocol protocol) {
  return TrialRunner(config, seed, protocol, &trace).run();
}

}  // namespace pob
