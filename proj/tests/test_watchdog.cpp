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

#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "pobsim/random.hpp"
#include "pobsim/watchdog.hpp"

using namespace pob;

namespace {

std::vector<ValidatorId> ids(std::uint32_t n) {
  std::vector<ValidatorId> v;
  for (std::uint32_t i = 0; i < n; ++i) v.emplace_back(i);
  return v;
}

BehaviorRecord behavior(std::uint32_t actor, double ub,
                        ActionKind kind = ActionKind::kFraudAttempt) {
  BehaviorRecord b;
  b.actor = ValidatorId(actor);
  b.base_utility = ub;
  b.motivation = {{0.0}, {1.0}};
  b.kind = kind;
  return b;
}

WeightTable uniform_table(std::uint32_t n) {
  const auto v = ids(n);
  return WeightTable::uniform(v);
}

}  // namespace

TEST_CASE("committee formation") {
  Rng rng(41);
  const auto four = ids(4);
  const auto c = form_committee(four, ValidatorId(0), 3, rng);
  CHECK(c == std::vector<ValidatorId>{ValidatorId(1), ValidatorId(2), ValidatorId(3)});
  CHECK(form_committee(four, ValidatorId(0), 0, rng).empty());
  CHECK_THROWS_AS(form_committee(four, ValidatorId(0), 4, rng), Error);

  const auto hundred = ids(100);
  for (int i = 0; i < 10000; ++i) {
    const ValidatorId subject(static_cast<std::uint32_t>(rng.below(100)));
    const auto m = form_committee(hundred, subject, 30, rng);
    REQUIRE(m.size() == 30);
    CHECK(std::find(m.begin(), m.end(), subject) == m.end());
    CHECK(std::set<ValidatorId>(m.begin(), m.end()).size() == 30);
    CHECK(std::is_sorted(m.begin(), m.end()));
  }
}

TEST_CASE("committee membership is uniform over the other validators") {
  Rng rng(42);
  const auto ten = ids(10);
  std::vector<int> hits(10, 0);
  const int draws = 90000;
  for (int i = 0; i < draws; ++i) {
    for (ValidatorId m : form_committee(ten, ValidatorId(0), 3, rng)) ++hits[m.value];
  }
  CHECK(hits[0] == 0);
  for (int v = 1; v < 10; ++v) CHECK(hits[v] / double(draws) == doctest::Approx(1.0 / 3).epsilon(0.03));
}

TEST_CASE("truthful votes") {
  Rng rng(43);
  CHECK(committee_vote(behavior(0, -1), 1.0, rng));
  CHECK_FALSE(committee_vote(behavior(0, 1), 1.0, rng));
  int yes = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) yes += committee_vote(behavior(0, -1), 0.9, rng);
  CHECK(std::abs(yes / double(draws) - 0.9) <= 0.01);
  CHECK_THROWS_AS(committee_vote(behavior(0, 1), 1.5, rng), Error);
}

TEST_CASE("decisions use the exact threshold") {
  const Rational decimal = Rational::parse("0.67");
  const Decision d = decide({true, true, false}, decimal);
  CHECK_FALSE(d.guilty);
  CHECK(d.phi == doctest::Approx(2.0 / 3));
  CHECK(decide({true, true, false}, Rational(2, 3)).guilty);
  const Decision all = decide({true, true, true}, decimal);
  CHECK(all.guilty);
  CHECK(all.phi == 1.0);
  const Decision none = decide({false, false, false}, Rational(1, 100));
  CHECK_FALSE(none.guilty);
  CHECK(none.phi == 0.0);
  CHECK_THROWS_AS(decide({}, Rational(2, 3)), Error);
}

TEST_CASE("penalty examples") {
  PenaltyPolicy p;
  p.mode = SlashMode::kAdditive;
  p.base_coefficient = 1.0;
  Penalty pen = compute_penalty(p, behavior(0, -0.1), 0);
  CHECK(pen.kind == PenaltyKind::kAdditive);
  CHECK(pen.amount == doctest::Approx(0.1));
  p.base_coefficient = 1.5;
  CHECK(compute_penalty(p, behavior(0, -0.1), 0).amount == doctest::Approx(0.15));
  CHECK(compute_penalty(p, behavior(0, -0.1, ActionKind::kDoubleSign), 0).kind ==
        PenaltyKind::kFull);

  PenaltyPolicy m;
  m.escalation = {1, 2, 3};
  const Penalty first = compute_penalty(m, behavior(0, -5), 0);
  CHECK(first.kind == PenaltyKind::kMultiplicative);
  CHECK(first.amount == doctest::Approx(0.2));
  CHECK(compute_penalty(m, behavior(0, -5), 1).amount == doctest::Approx(0.04));
  CHECK(compute_penalty(m, behavior(0, -5), 7).amount == doctest::Approx(0.008));
  CHECK(m.escalation_at(99) == 3);
}

TEST_CASE("escalation never lowers the penalty") {
  Rng rng(44);
  for (int i = 0; i < 10000; ++i) {
    PenaltyPolicy p;
    p.mode = rng.bernoulli(0.5) ? SlashMode::kAdditive : SlashMode::kMultiplicative;
    p.base_coefficient = rng.uniform(0.1, 3.0);
    p.rho_p = rng.uniform(0.0, 0.99);
    p.escalation = {1.0};
    for (std::uint64_t k = rng.below(5); k > 0; --k) {
      p.escalation.push_back(p.escalation.back() + rng.uniform());
    }
    const BehaviorRecord b = behavior(0, -rng.uniform(0.01, 10.0));
    const auto f = static_cast<std::uint32_t>(rng.below(8));
    const WeightTable t({{ValidatorId(0), 0.5}, {ValidatorId(1), 0.5}});
    const double a = apply_penalty(t, ValidatorId(0), compute_penalty(p, b, f)).weight(ValidatorId(0));
    const double c = apply_penalty(t, ValidatorId(0), compute_penalty(p, b, f + 1)).weight(ValidatorId(0));
    CHECK(c <= a + 1e-15);
  }
}

TEST_CASE("epoch processing examples") {
  std::map<ValidatorId, std::uint32_t> offenses;
  Rng rng(45);
  const auto pool = ids(10);
  std::map<ValidatorId, double> w;
  w[ValidatorId(0)] = 0.4;
  for (std::uint32_t i = 1; i < 10; ++i) w[ValidatorId(i)] = 0.6 / 9;
  const WeightTable table(w);
  WatchdogParams params;
  params.committee_size = 9;
  params.detection_accuracy = 1.0;
  params.policy.mode = SlashMode::kAdditive;

  const std::vector<BehaviorRecord> none;
  const WatchdogOutcome empty =
      process_epoch_suspicions({}, none, table, params, pool, offenses, {}, rng);
  CHECK(empty.table == table);
  CHECK(empty.verdicts.empty());

  const std::vector<BehaviorRecord> bad = {behavior(0, -0.1)};
  const WatchdogOutcome guilty = process_epoch_suspicions(
      {{ValidatorId(0), 0, 0, ValidatorId(1)}}, bad, table, params, pool, offenses, {}, rng);
  REQUIRE(guilty.verdicts.size() == 1);
  CHECK(guilty.verdicts[0].guilty);
  CHECK(guilty.table.weight(ValidatorId(0)) == doctest::Approx(0.3));
  CHECK(guilty.verdicts[0].penalty_applied == doctest::Approx(0.1));
  CHECK(offenses[ValidatorId(0)] == 1);

  const std::vector<BehaviorRecord> good = {behavior(0, 1.0, ActionKind::kValidateBlock)};
  const WatchdogOutcome acquit = process_epoch_suspicions(
      {{ValidatorId(0), 0, 0, ValidatorId(1)}}, good, table, params, pool, offenses, {}, rng);
  REQUIRE(acquit.verdicts.size() == 1);
  CHECK_FALSE(acquit.verdicts[0].guilty);
  CHECK(acquit.verdicts[0].penalty_applied == 0.0);
  CHECK(acquit.table == table);
  CHECK(offenses[ValidatorId(0)] == 1);
}

TEST_CASE("perfect honest committees convict exactly the harmful behaviours") {
  Rng rng(46);
  const auto pool = ids(40);
  WatchdogParams params;
  params.committee_size = 30;
  params.detection_accuracy = 1.0;
  params.theta = Rational(2, 3);
  for (int round = 0; round < 200; ++round) {
    std::vector<BehaviorRecord> bs;
    std::vector<SuspicionReport> reports;
    for (std::uint32_t i = 0; i < 40; ++i) {
      if (!rng.bernoulli(0.3)) continue;
      const double ub = rng.uniform(-2.0, 2.0);
      bs.push_back(behavior(i, ub, ub < 0 ? ActionKind::kFraudAttempt : ActionKind::kValidateBlock));
      reports.push_back({ValidatorId(i), 0, bs.size() - 1, ValidatorId((i + 1) % 40)});
    }
    std::map<ValidatorId, std::uint32_t> offenses;
    const auto out = process_epoch_suspicions(reports, bs, uniform_table(40), params, pool,
                                              offenses, {}, rng);
    REQUIRE(out.verdicts.size() == reports.size());
    for (const Verdict& v : out.verdicts) {
      const bool harmful = outcome_utility(bs[v.behavior_index]) < 0;
      CHECK(v.guilty == harmful);
      CHECK(std::find(v.committee.begin(), v.committee.end(), v.subject) == v.committee.end());
      if (!v.guilty) CHECK(v.penalty_applied == 0.0);
    }
  }
}

TEST_CASE("a minority coalition cannot frame an honest validator") {
  // Every committee of size 1..9 and every split of its seats between honest
  // members and colluders, for several thresholds.
  const std::vector<Rational> thetas = {Rational(1, 2), Rational(2, 3), Rational(3, 4),
                                        Rational::parse("0.67"), Rational(9, 10), Rational(1, 1)};
  const BehaviorRecord honest = behavior(0, 1.0, ActionKind::kValidateBlock);
  Rng rng(47);
  int checked = 0;
  for (const Rational& theta : thetas) {
    for (int k = 1; k <= 9; ++k) {
      for (unsigned mask = 0; mask < (1u << k); ++mask) {
        std::vector<bool> votes;
        int honest_members = 0;
        for (int s = 0; s < k; ++s) {
          const bool colluder = (mask >> s) & 1u;
          votes.push_back(colluder ? true : committee_vote(honest, 1.0, rng));
          honest_members += colluder ? 0 : 1;
        }
        // h > 1 - theta, i.e. honest/k > (den - num)/den.
        const bool honest_enough =
            static_cast<std::int64_t>(honest_members) * theta.denominator() >
            static_cast<std::int64_t>(k) * (theta.denominator() - theta.numerator());
        if (!honest_enough) continue;
        CHECK_FALSE(decide(votes, theta).guilty);
        ++checked;
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("offense counts never decrease") {
  Rng rng(48);
  const auto pool = ids(12);
  WatchdogParams params;
  params.committee_size = 11;
  std::map<ValidatorId, std::uint32_t> offenses;
  WeightTable table = uniform_table(12);
  for (int epoch = 0; epoch < 50; ++epoch) {
    const auto before = offenses;
    std::vector<BehaviorRecord> bs;
    std::vector<SuspicionReport> reports;
    for (std::uint32_t i = 0; i < 12; ++i) {
      if (!rng.bernoulli(0.5)) continue;
      bs.push_back(behavior(i, rng.uniform(-1.0, 1.0)));
      reports.push_back({ValidatorId(i), static_cast<std::uint32_t>(epoch), bs.size() - 1,
                         ValidatorId((i + 1) % 12)});
    }
    auto out = process_epoch_suspicions(reports, bs, table, params, pool, offenses, {}, rng);
    table = out.table;
    for (const auto& [id, c] : before) CHECK(offenses[id] >= c);
  }
}

TEST_CASE("policy validation") {
  PenaltyPolicy p;
  p.escalation = {2.0};
  CHECK_THROWS_AS(p.validate(), Error);
  p.escalation = {1.0, 0.5};
  CHECK_THROWS_AS(p.validate(), Error);
  p.escalation = {1.0};
  p.rho_p = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.rho_p = 0.2;
  p.base_coefficient = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}
