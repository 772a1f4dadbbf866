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

// Discrete-event trial loop.
//
// One trial runs `epochs` epochs of `blocks_per_epoch` blocks. Per block the
// proposer is elected, every present validator acts, and the block is
// confirmed by weighted votes whose arrival times come from the latency
// model. At the end of each epoch the protocol scores behaviour, runs the
// watchdog, updates weights and pays rewards (PoB), or schedules delayed
// slashes and pays by stake (PoS). Each epoch leaves an EpochLedger behind.

#ifndef POBSIM_NETSIM_HPP_
#define POBSIM_NETSIM_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pobsim/adversaries.hpp"
#include "pobsim/common.hpp"
#include "pobsim/config.hpp"
#include "pobsim/random.hpp"
#include "pobsim/rational.hpp"
#include "pobsim/rewards.hpp"
#include "pobsim/scoring.hpp"
#include "pobsim/watchdog.hpp"
#include "pobsim/weights.hpp"

namespace pob {

// Event queue ordered by (time, insertion sequence).
class SimClock {
 public:
  struct Event {
    double time = 0.0;
    std::uint64_t sequence = 0;
    std::uint64_t tag = 0;
  };

  double now() const { return now_; }
  bool empty() const { return queue_.empty(); }
  std::size_t size() const { return queue_.size(); }

  // Schedules `tag` at now() + delay. Negative delays are rejected.
  void schedule(double delay, std::uint64_t tag);
  // Pops the earliest event and advances the clock to its time.
  Event pop();
  void reset();

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  double now_ = 0.0;
  std::uint64_t next_sequence_ = 0;
};

class LatencyModel {
 public:
  LatencyModel(LatencyDistribution distribution, double mean_ms);

  // One draw per call for every distribution, fixed included.
  double sample(Rng& rng) const;
  double mean_ms() const { return mean_ms_; }

 private:
  LatencyDistribution distribution_;
  double mean_ms_;
};

struct Block {
  std::uint64_t height = 0;
  ValidatorId proposer;
  std::vector<BehaviorRecord> behaviors;
  std::optional<std::uint64_t> parent;  // parent height; empty for genesis
  double timestamp_ms = 0.0;
  double cumulative_utility = 0.0;
  std::vector<ValidatorId> signers;
  double signer_weight = 0.0;  // used when `signers` is empty
};

Block genesis_block();
// Appends a child, maintaining the height and cumulative-utility invariants.
Block extend(const Block& parent, ValidatorId proposer, std::vector<BehaviorRecord> behaviors,
             double timestamp_ms, std::vector<ValidatorId> signers);

// Current weight behind a tip: the table weight of its signers, or the
// stored signer_weight when the block lists none.
double signer_weight(const Block& tip, const WeightTable& table);

// Yes-weight >= quorum * weight of every voter, compared exactly.
bool confirm_block(const Block& block, const std::map<ValidatorId, bool>& votes,
                   const WeightTable& table, const Rational& quorum);

// Greater signer weight wins; then greater cumulative utility; then the
// lower proposer id; identical tips return `tip_a`.
const Block& fork_choice(const Block& tip_a, const Block& tip_b, const WeightTable& table);

struct LedgerBehavior {
  BehaviorRecord record;
  std::uint64_t height = 0;
  bool included = true;

  bool operator==(const LedgerBehavior&) const = default;
};

struct BlockRecord {
  std::uint64_t height = 0;
  ValidatorId proposer;
  bool confirmed = true;
  double latency_ms = 0.0;

  bool operator==(const BlockRecord&) const = default;
};

struct SlashRecord {
  ValidatorId offender;
  std::uint64_t detection_block = 0;
  std::uint64_t effective_block = 0;
  double stake_before = 0.0;
  double stake_after = 0.0;
  std::vector<std::pair<std::uint32_t, std::size_t>> evidence;

  bool operator==(const SlashRecord&) const = default;
};

struct EpochLedger {
  std::uint32_t epoch = 0;
  Protocol protocol = Protocol::kPob;
  std::vector<BlockRecord> blocks;
  std::vector<LedgerBehavior> behaviors;
  std::vector<SuspicionReport> reports;
  std::vector<Verdict> verdicts;
  std::vector<SlashRecord> slashes;  // PoS only
  std::map<ValidatorId, double> scores;
  std::map<ValidatorId, double> activeness;
  std::vector<Payout> payouts;
  std::map<ValidatorId, double> weights_before;
  std::map<ValidatorId, double> weights_after;
  std::vector<ValidatorId> joined;
  std::vector<ValidatorId> retired;
};

// Canonical JSON: sorted keys, shortest round-trip floats.
std::string ledger_to_json(const EpochLedger& ledger);

struct ReplayCheck {
  bool ok = true;
  std::string mismatch;
};

// Recomputes a PoB epoch's scores, penalties, weight update and payouts from
// its recorded behaviours and verdicts and compares with the recorded
// after-state bit for bit.
ReplayCheck replay_epoch(const EpochLedger& ledger, const ScenarioConfig& config);

struct ValidatorInfo {
  ValidatorId id;
  StrategyKind role = StrategyKind::kHonest;
  std::uint32_t join_epoch = 0;
  std::optional<std::uint32_t> retire_epoch;
  double initial_weight = 0.0;  // genesis weight (PoB) or stake (PoS)
};

struct ForkOutcome {
  std::uint64_t checkpoint = 0;
  std::uint64_t fork_height = 0;
  double fork_signer_weight = 0.0;
  double main_signer_weight = 0.0;
  double total_weight = 0.0;
  double fork_utility = 0.0;
  double main_utility = 0.0;
  bool fork_preferred = false;
  bool adopted = false;
};

struct TrialResult {
  Protocol protocol = Protocol::kPob;
  std::uint64_t seed = 0;
  std::vector<EpochLedger> ledgers;
  std::vector<ValidatorInfo> validators;
  // Election probability of every validator per block height; zero while
  // it is not present.
  std::map<ValidatorId, std::vector<double>> election_trace;
  std::vector<std::uint32_t> active_count;  // per block height
  std::vector<std::string> events;
  std::optional<ForkOutcome> fork;
};

TrialResult run_trial(const ScenarioConfig& config, std::uint64_t seed, Protocol protocol);

struct TraceEntry {
  std::uint64_t height = 0;
  ValidatorId actor;
  ActionKind kind = ActionKind::kValidateBlock;
  double base_utility = 0.0;
  double phi = 1.0;
  double alpha = 1.0;
  bool exploit = false;

  bool operator==(const TraceEntry&) const = default;
};

using BlockTrace = std::vector<TraceEntry>;

// Parses `height,proposer_id,kind,base_utility,phi,alpha,is_exploit` lines.
// Throws Error(kParse) with the line number on any malformed line.
BlockTrace parse_trace(std::string_view text, std::uint32_t n_validators);
BlockTrace load_trace(const std::string& path, std::uint32_t n_validators);

// Deterministic synthetic trace: one line per validator per block, proposer
// chosen round-robin, one exploit by `culprit` at `exploit_height`.
std::string generate_synthetic_trace(const TraceConfig& trace, std::uint32_t n_validators);

// Drives the trial loop with behaviours taken from the trace; one trace
// height per epoch.
TrialResult replay_trace(const BlockTrace& trace, const ScenarioConfig& config,
                         std::uint64_t seed, Protocol protocol);

}  // namespace pob

#endif  // POBSIM_NETSIM_HPP_
