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
#include <memory>

#include "doctest.h"
#include "pobsim/adversaries.hpp"
#include "pobsim/random.hpp"
#include "pobsim/watchdog.hpp"

using namespace pob;

namespace {

const BehaviorModel kModel;

ActContext context(std::uint32_t self, std::uint32_t epoch, std::uint32_t proposer = 99) {
  ActContext c;
  c.self = ValidatorId(self);
  c.epoch = epoch;
  c.height = epoch;
  c.proposer = ValidatorId(proposer);
  c.model = &kModel;
  return c;
}

StrategySpec spec(StrategyKind kind, std::map<std::string, std::string> params = {}) {
  StrategySpec s;
  s.kind = kind;
  s.params = std::move(params);
  s.validate();
  return s;
}

Coalition coalition_of(std::initializer_list<std::uint32_t> ids) {
  auto c = std::make_shared<std::set<ValidatorId>>();
  for (auto i : ids) c->insert(ValidatorId(i));
  return c;
}

}  // namespace

TEST_CASE("honest policy emits one positive, non-fraud behaviour") {
  Rng rng(71);
  for (std::uint32_t e = 0; e < 10000; ++e) {
    const auto bs = honest_policy(context(0, e), rng);
    REQUIRE(bs.size() == 1);
    CHECK(bs[0].base_utility > 0.0);
    CHECK(bs[0].kind != ActionKind::kFraudAttempt);
    CHECK(bs[0].kind != ActionKind::kDoubleSign);
    CHECK_FALSE(bs[0].is_fraud_ground_truth);
    CHECK(bs[0].initiative >= 0.6);
    CHECK(bs[0].initiative <= 1.0);
  }
  auto s = make_strategy(spec(StrategyKind::kHonest), nullptr);
  BehaviorRecord harmful = honest_policy(context(0, 0), rng)[0];
  harmful.base_utility = -1;
  CHECK(s->vote(harmful, 1.0, rng));
}

TEST_CASE("honest behaviour consumes exactly four draws") {
  Rng a(72), b(72);
  honest_behavior(context(0, 0), a);
  for (int i = 0; i < 4; ++i) b.next();
  CHECK(a.next() == b.next());
}

TEST_CASE("stealth attack frequency") {
  Rng br(73), ar(74);
  auto always = make_strategy(spec(StrategyKind::kStealth, {{"fraud_rate", "1"}}), nullptr);
  for (std::uint32_t e = 0; e < 100; ++e) {
    const auto bs = always->act(context(0, e), br, ar);
    REQUIRE(bs.size() == 1);
    CHECK(bs[0].is_fraud_ground_truth);
    CHECK(bs[0].base_utility == -10.0);
  }
  auto rare = make_strategy(spec(StrategyKind::kStealth, {{"fraud_rate", "0.05"}}), nullptr);
  int frauds = 0;
  for (std::uint32_t e = 0; e < 10000; ++e) {
    const auto bs = rare->act(context(0, e), br, ar);
    if (bs[0].is_fraud_ground_truth) {
      ++frauds;
    } else {
      CHECK(bs[0].base_utility > 0.0);
    }
  }
  CHECK(std::abs(frauds / 10000.0 - 0.05) <= 0.005);
}

TEST_CASE("sybil burst splits its value across the coalition") {
  Coalition group = std::make_shared<std::set<ValidatorId>>();
  for (std::uint32_t i = 0; i < 10; ++i) group->insert(ValidatorId(i));
  std::vector<std::unique_ptr<Strategy>> sybils;
  for (std::uint32_t i = 0; i < 10; ++i) {
    sybils.push_back(make_strategy(
        spec(StrategyKind::kSybilBurst, {{"fraud_value", "1.0"}, {"burst_epoch", "5"}}), group));
  }
  Rng br(75), ar(76);
  for (std::uint32_t e = 0; e < 8; ++e) {
    for (std::uint32_t i = 0; i < 10; ++i) {
      const auto bs = sybils[i]->act(context(i, e), br, ar);
      REQUIRE(bs.size() == 1);
      if (e == 5) {
        CHECK(bs[0].is_fraud_ground_truth);
        CHECK(bs[0].base_utility == doctest::Approx(-0.1));
      } else {
        CHECK_FALSE(bs[0].is_fraud_ground_truth);
      }
    }
  }
}

TEST_CASE("colluders acquit members and frame everyone else") {
  Coalition group = coalition_of({0, 1, 2});
  auto s = make_strategy(spec(StrategyKind::kSybilBurst), group);
  Rng rng(77);
  BehaviorRecord member = honest_policy(context(1, 0), rng)[0];
  member.base_utility = -1;
  BehaviorRecord outsider = honest_policy(context(5, 0), rng)[0];
  CHECK_FALSE(s->vote(member, 1.0, rng));
  CHECK(s->vote(outsider, 1.0, rng));

  // Nine honest jurors and one colluder judging a coalition fraud.
  std::vector<bool> votes;
  for (int i = 0; i < 9; ++i) votes.push_back(committee_vote(member, 1.0, rng));
  votes.push_back(s->vote(member, 1.0, rng));
  CHECK(decide(votes, Rational(2, 3)).guilty);
}

TEST_CASE("votes consume one draw") {
  Coalition group = coalition_of({0});
  Rng rng(78);
  const BehaviorRecord b = honest_policy(context(3, 0), rng)[0];
  for (StrategyKind k : {StrategyKind::kHonest, StrategyKind::kSybilBurst,
                         StrategyKind::kAdaptiveSybil, StrategyKind::kStealth}) {
    auto s = make_strategy(spec(k), group);
    Rng x(79), y(79);
    s->vote(b, 0.9, x);
    y.next();
    CHECK(x.next() == y.next());
  }
}

TEST_CASE("long-range validator goes silent at the defect epoch") {
  auto s = make_strategy(spec(StrategyKind::kLongRangeFork, {{"defect_epoch", "3"}}), nullptr);
  Rng br(80), ar(81);
  for (std::uint32_t e = 0; e < 6; ++e) CHECK(s->act(context(0, e), br, ar).size() == (e < 3 ? 1u : 0u));
}

TEST_CASE("griefer stays valid") {
  auto s = make_strategy(
      spec(StrategyKind::kGriefing, {{"start_epoch", "2"}, {"empty_block_run", "10"}}), nullptr);
  Rng br(82), ar(83);
  for (std::uint32_t e = 0; e < 20; ++e) {
    const auto bs = s->act(context(0, e, e % 2 == 0 ? 0 : 1), br, ar);
    REQUIRE(bs.size() == 1);
    CHECK(bs[0].base_utility >= 0.0);
    CHECK_FALSE(bs[0].is_fraud_ground_truth);
    if (e >= 2 && e < 12) {
      CHECK(bs[0].base_utility < 0.01);
      CHECK(bs[0].kind == (e % 2 == 0 ? ActionKind::kProposeBlock : ActionKind::kIdle));
    } else {
      CHECK(bs[0].base_utility >= 0.5);
    }
  }
  auto off = make_strategy(spec(StrategyKind::kGriefing, {{"empty_block_run", "0"}}), nullptr);
  for (std::uint32_t e = 0; e < 5; ++e) CHECK(off->act(context(0, e, 0), br, ar)[0].base_utility >= 0.5);
}

TEST_CASE("identical specs yield identical behaviour") {
  for (StrategyKind k : {StrategyKind::kHonest, StrategyKind::kStealth, StrategyKind::kSybilBurst,
                         StrategyKind::kAdaptiveSybil, StrategyKind::kLongRangeFork,
                         StrategyKind::kGriefing}) {
    auto a = make_strategy(spec(k), coalition_of({0}));
    auto b = make_strategy(spec(k), coalition_of({0}));
    Rng b1(84), a1(85), b2(84), a2(85);
    for (std::uint32_t e = 0; e < 200; ++e) {
      CHECK(a->act(context(0, e, e % 3), b1, a1) == b->act(context(0, e, e % 3), b2, a2));
    }
  }
}

TEST_CASE("spec validation") {
  StrategySpec s;
  s.kind = StrategyKind::kStealth;
  s.params = {{"fraud_rate", "1.5"}};
  CHECK_THROWS_AS(s.validate(), Error);
  s.params = {{"bogus", "1"}};
  CHECK_THROWS_AS(s.validate(), Error);
  s.params = {{"fraud_kind", "idle"}};
  CHECK_THROWS_AS(s.validate(), Error);
  s.params = {{"fraud_kind", "double-sign"}};
  CHECK_NOTHROW(s.validate());
  CHECK(s.effective_params().at("fraud_rate") == "0.05");
  CHECK(parse_strategy_kind("adaptive-sybil") == StrategyKind::kAdaptiveSybil);
  CHECK_FALSE(parse_strategy_kind("miner").has_value());
}
