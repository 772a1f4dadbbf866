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

#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pobsim/config.hpp"
#include "pobsim/experiments.hpp"
#include "pobsim/metrics.hpp"
#include "pobsim/netsim.hpp"

using namespace pob;

namespace {

ScenarioConfig small(std::uint32_t n = 20, std::uint32_t epochs = 30) {
  ScenarioConfig c = parse_config("n_validators: " + std::to_string(n) + "\n");
  c.epochs = epochs;
  c.trials = 1;
  return c;
}

std::string serialize(const TrialResult& r) {
  std::string out;
  for (const EpochLedger& l : r.ledgers) out += ledger_to_json(l);
  return out;
}

std::uint64_t guilty(const TrialResult& r) {
  std::uint64_t n = 0;
  for (const EpochLedger& l : r.ledgers) {
    for (const Verdict& v : l.verdicts) n += v.guilty;
  }
  return n;
}

}  // namespace

TEST_CASE("event queue orders by time then insertion") {
  SimClock clock;
  clock.schedule(5.0, 1);
  clock.schedule(1.0, 2);
  clock.schedule(5.0, 3);
  clock.schedule(0.0, 4);
  CHECK(clock.pop().tag == 4);
  CHECK(clock.pop().tag == 2);
  CHECK(clock.pop().tag == 1);
  CHECK(clock.now() == 5.0);
  CHECK(clock.pop().tag == 3);
  CHECK(clock.empty());
  CHECK_THROWS_AS(clock.schedule(-1.0, 0), Error);
}

TEST_CASE("latency samples match the configured mean") {
  for (LatencyDistribution d : {LatencyDistribution::kExponential, LatencyDistribution::kFixed,
                                LatencyDistribution::kUniform}) {
    const LatencyModel m(d, 50.0);
    Rng rng(101);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double x = m.sample(rng);
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(std::abs(sum / n - 50.0) <= 0.05 * 50.0);
  }
}

TEST_CASE("weighted confirmation") {
  const ValidatorId a(0), b(1), c(2);
  const Block blk = genesis_block();
  const WeightTable w({{a, 0.5}, {b, 0.25}, {c, 0.25}});
  CHECK(confirm_block(blk, {{a, true}, {b, true}, {c, true}}, w, Rational(2, 3)));
  CHECK_FALSE(confirm_block(blk, {{a, true}, {b, false}, {c, false}}, w, Rational(2, 3)));
  const WeightTable thirds({{a, 1}, {b, 1}, {c, 1}}, 0, false);
  CHECK(confirm_block(blk, {{a, true}, {b, true}, {c, false}}, thirds, Rational(2, 3)));
  CHECK_FALSE(confirm_block(blk, {{a, true}, {b, true}, {c, false}}, thirds, Rational::parse("0.67")));
}

TEST_CASE("fork choice") {
  const ValidatorId a(0), b(1), c(2);
  const WeightTable w({{a, 0.5}, {b, 0.5}, {c, 0.0}});
  Block g = genesis_block();
  Block x = extend(g, a, {}, 0, {a});
  Block y = extend(g, b, {}, 0, {b});
  x.cumulative_utility = 10;
  y.cumulative_utility = 5;
  CHECK(&fork_choice(x, y, w) == &x);
  CHECK(&fork_choice(y, x, w) == &x);

  Block slashed = extend(g, c, {}, 0, {c});
  slashed.cumulative_utility = 1000;
  CHECK(&fork_choice(x, slashed, w) == &x);

  Block x2 = x;
  CHECK(&fork_choice(x, x2, w) == &x);
  y.cumulative_utility = 10;
  CHECK(&fork_choice(y, x, w) == &x);  // lower proposer id
}

TEST_CASE("block invariants") {
  BehaviorRecord r;
  r.base_utility = 2.0;
  r.motivation = {{1.0}, {1.0}};
  const Block g = genesis_block();
  const Block b1 = extend(g, ValidatorId(3), {r, r}, 1.0, {});
  CHECK(b1.height == g.height + 1);
  CHECK(b1.parent == g.height);
  CHECK(b1.cumulative_utility == g.cumulative_utility + 2 * total_utility(r));
}

TEST_CASE("zero epochs yield no ledgers") {
  ScenarioConfig c = small(10, 0);
  CHECK(run_trial(c, 1, Protocol::kPob).ledgers.empty());
  CHECK(run_trial(c, 1, Protocol::kPos).ledgers.empty());
}

TEST_CASE("trials are deterministic") {
  ScenarioConfig c = builtin_preset("case-a-stealth");
  c.epochs = 60;
  for (Protocol p : {Protocol::kPob, Protocol::kPos}) {
    CHECK(serialize(run_trial(c, 7, p)) == serialize(run_trial(c, 7, p)));
  }
  CHECK(serialize(run_trial(c, 7, Protocol::kPob)) != serialize(run_trial(c, 8, Protocol::kPob)));
}

TEST_CASE("an honest network convicts nobody and rotates fairly") {
  ScenarioConfig c = small(100, 50);
  c.blocks_per_epoch = 40;
  c.delta = 0.1;
  const TrialResult r = run_trial(c, 3, Protocol::kPob);
  REQUIRE(r.ledgers.size() == 50);
  CHECK(guilty(r) == 0);
  const TrialMetrics m = compute_metrics(r, c);
  REQUIRE(m.proposer_gini);
  CHECK(*m.proposer_gini < 0.2);
}

TEST_CASE("recorded epochs replay exactly") {
  ScenarioConfig c = builtin_preset("case-a-sybil");
  c.epochs = 80;
  c.penalty.policy.mode = SlashMode::kAdditive;
  const TrialResult r = run_trial(c, 5, Protocol::kPob);
  REQUIRE(guilty(r) > 0);
  for (const EpochLedger& l : r.ledgers) {
    const ReplayCheck check = replay_epoch(l, c);
    CAPTURE(l.epoch);
    CAPTURE(check.mismatch);
    CHECK(check.ok);
  }
  const ScenarioConfig d = builtin_preset("case-d-adaptive-sybil");
  const TrialResult s = run_trial(d, 6, Protocol::kPob);
  for (const EpochLedger& l : s.ledgers) CHECK(replay_epoch(l, d).ok);
}

TEST_CASE("tampered ledgers fail replay") {
  ScenarioConfig c = builtin_preset("case-a-stealth");
  c.epochs = 40;
  TrialResult r = run_trial(c, 5, Protocol::kPob);
  EpochLedger l = r.ledgers[10];
  l.weights_after.begin()->second += 1e-12;
  CHECK_FALSE(replay_epoch(l, c).ok);
}

TEST_CASE("payouts conserve the pool") {
  ScenarioConfig c = builtin_preset("case-a-stealth");
  c.epochs = 60;
  for (Protocol p : {Protocol::kPob, Protocol::kPos}) {
    const TrialResult r = run_trial(c, 9, p);
    for (const EpochLedger& l : r.ledgers) {
      if (l.payouts.empty()) continue;
      double sum = 0.0;
      for (const Payout& x : l.payouts) sum += x.total;
      CHECK(std::abs(sum - c.rewards.total_reward) <= 1e-9);
    }
  }
}

TEST_CASE("ledger json is canonical") {
  ScenarioConfig c = small(5, 3);
  const TrialResult r = run_trial(c, 1, Protocol::kPob);
  const std::string j = ledger_to_json(r.ledgers[1]);
  CHECK(j.find("\"epoch\": 1") != std::string::npos);
  CHECK(j.find("\"weights_after\"") != std::string::npos);
  CHECK(j.find("\"activeness\"") < j.find("\"behaviors\""));
}

TEST_CASE("trace parsing") {
  const BlockTrace t = parse_trace(
      "# comment\n0,1,propose-block,1.0,1,0.8,0\n0,2,validate-block,0.5,1,1,0\n\n"
      "1,2,fraud-attempt,10,1,1,1  # exploit\n",
      4);
  REQUIRE(t.size() == 3);
  CHECK(t[0].kind == ActionKind::kProposeBlock);
  CHECK(t[2].exploit);
  CHECK(t[2].base_utility == -10.0);
  CHECK(parse_trace("", 4).empty());

  for (const char* bad : {"0,1,propose-block,1,1,1,0,9\n", "0,1,propose-block,1,1,1\n",
                          "0,9,propose-block,1,1,1,0\n", "0,1,plant-tree,1,1,1,0\n",
                          "0,1,propose-block,1,2,1,0\n", "0,1,propose-block,x,1,1,0\n",
                          "0,1,propose-block,1,1,1,2\n"}) {
    CAPTURE(bad);
    try {
      parse_trace(std::string("# header\n") + bad, 4);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("trace replay") {
  ScenarioConfig c = builtin_preset("case-c-replay");
  CHECK(replay_trace({}, c, 1, Protocol::kPob).ledgers.empty());

  TraceConfig honest = c.trace;
  honest.blocks = 100;
  honest.exploit_height = 1000;  // beyond the trace
  const BlockTrace clean = parse_trace(generate_synthetic_trace(honest, c.n_validators), c.n_validators);
  c.watchdog.detection_accuracy = 1.0;
  const TrialResult r = replay_trace(clean, c, 1, Protocol::kPob);
  CHECK(r.ledgers.size() == 100);
  CHECK(guilty(r) == 0);

  const ScenarioConfig d = builtin_preset("case-c-replay");
  const BlockTrace full = parse_trace(generate_synthetic_trace(d.trace, d.n_validators), d.n_validators);
  const TrialResult x = replay_trace(full, d, 2, Protocol::kPob);
  REQUIRE(x.ledgers.size() == 1000);
  const ValidatorId culprit(d.trace.culprit);
  const double before = x.ledgers[500].weights_before.at(culprit);
  const double after = x.ledgers[500].weights_after.at(culprit);
  CHECK(1.0 - after / before >= 0.8);
}

TEST_CASE("bundled trace matches the generator") {
  const ScenarioConfig c = builtin_preset("case-c-replay");
  std::ifstream in(std::string(POBSIM_SOURCE_DIR) + "/data/case_c_trace.csv", std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == generate_synthetic_trace(c.trace, c.n_validators));
}

TEST_CASE("long-range fork outcomes") {
  ScenarioConfig c = builtin_preset("case-d-long-range");
  c.epochs = 60;
  c.roster[0].strategy.params["defect_epoch"] = "20";
  c.roster[0].strategy.params["fork_depth"] = "200";
  const TrialResult pob = run_trial(c, 1, Protocol::kPob);
  REQUIRE(pob.fork);
  CHECK_FALSE(pob.fork->adopted);
  CHECK(pob.fork->fork_signer_weight < 1e-6);

  // A coalition with most of the current weight breaks the assumption.
  ScenarioConfig heavy = c;
  heavy.rho = 0.001;
  heavy.roster[0].weight = 40;
  heavy.roster[0].strategy.params["defect_epoch"] = "1000";
  const TrialResult adopted = run_trial(heavy, 1, Protocol::kPob);
  REQUIRE(adopted.fork);
  CHECK(adopted.fork->fork_signer_weight > 2.0 / 3.0 * adopted.fork->total_weight);
  CHECK(adopted.fork->adopted);

  ScenarioConfig none = c;
  none.roster[0].strategy.params["fork_depth"] = "0";
  const TrialResult noop = run_trial(none, 1, Protocol::kPob);
  REQUIRE(noop.fork);
  CHECK_FALSE(noop.fork->adopted);
  CHECK(noop.fork->checkpoint == noop.fork->fork_height);

  ScenarioConfig deep = c;
  deep.roster[0].strategy.params["fork_depth"] = "100000";
  CHECK_THROWS_AS(run_trial(deep, 1, Protocol::kPob), Error);
}

TEST_CASE("delayed slashing keeps the offender electable") {
  ScenarioConfig c = builtin_preset("case-a-stealth");
  c.roster[0].strategy.params["fraud_rate"] = "1";
  c.roster[0].strategy.params["start_epoch"] = "10";
  c.epochs = 150;
  const TrialResult r = run_trial(c, 4, Protocol::kPos);
  const ValidatorId attacker(c.n_validators - 1);
  const auto& trace = r.election_trace.at(attacker);
  CHECK(trace[10] > 0.0);
  CHECK(trace[10 + 99] == trace[10]);  // unchanged until the delay ends
  CHECK(trace[10 + 101] == 0.0);
}
