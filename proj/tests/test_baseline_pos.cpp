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
#include <vector>

#include "doctest.h"
#include "pobsim/baseline_pos.hpp"
#include "pobsim/random.hpp"

using namespace pob;

namespace {
const ValidatorId a(0), b(1), c(2);
}

TEST_CASE("proportional lottery") {
  Rng rng(91);
  const StakeTable one({{a, 1}, {b, 0}});
  for (int i = 0; i < 1000; ++i) CHECK(pos_select_proposer(one, rng) == a);

  const StakeTable tilted({{a, 3}, {b, 1}});
  int hits = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) hits += pos_select_proposer(tilted, rng) == a;
  CHECK(std::abs(hits / double(draws) - 0.75) <= 0.01);

  const StakeTable flat({{a, 2}, {b, 2}, {c, 2}});
  std::vector<int> counts(3, 0);
  for (int i = 0; i < draws; ++i) ++counts[pos_select_proposer(flat, rng).value];
  double stat = 0.0;
  for (int n : counts) stat += (n - draws / 3.0) * (n - draws / 3.0) / (draws / 3.0);
  CHECK(stat < 13.8);  // chi-square, 2 dof, upper 0.001 point

  const StakeTable zero({{a, 0}, {b, 0}});
  try {
    pos_select_proposer(zero, rng);
    FAIL("expected a degenerate election");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateElection);
  }
}

TEST_CASE("eligibility restricts the lottery") {
  const StakeTable s({{a, 3}, {b, 1}, {c, 4}});
  const std::vector<ValidatorId> eligible = {a, b};
  const auto p = pos_election_probabilities(s, eligible);
  CHECK(p.at(a) == 0.75);
  CHECK(p.at(b) == 0.25);
  CHECK_FALSE(p.contains(c));
}

TEST_CASE("slashing takes effect after the delay") {
  const StakeTable s({{a, 2}, {b, 2}}, 100, 1.0);
  SlashQueue q;
  q.report(s, a, 10, 0, 0);
  CHECK(slash_effective_block(s, 10) == 110);
  StakeTable live = s;
  for (std::uint64_t h = 10; h < 110; ++h) {
    CHECK(q.apply_due(live, h).empty());
    CHECK(live.stake(a) == 2.0);
  }
  const auto applied = q.apply_due(live, 110);
  REQUIRE(applied.size() == 1);
  CHECK(live.stake(a) == 0.0);
  CHECK(live.stake(b) == 2.0);
  CHECK(q.pending().empty());

  CHECK(pos_slash(StakeTable({{a, 2}}, 0, 0.5), a).stake(a) == 1.0);
  CHECK(pos_slash(StakeTable({{a, 2}}, 0, 1.0), a).stake(a) == 0.0);
}

TEST_CASE("repeat evidence joins the pending slash") {
  const StakeTable s({{a, 1}, {b, 1}}, 5, 1.0);
  SlashQueue q;
  q.report(s, a, 1, 0, 0);
  q.report(s, a, 3, 2, 0);
  REQUIRE(q.pending().size() == 1);
  CHECK(q.pending()[0].evidence.size() == 2);
  CHECK(q.pending()[0].effective_block == 6);
}

TEST_CASE("stakes stay static without slashing") {
  Rng rng(92);
  std::vector<ValidatorId> ids;
  for (std::uint32_t i = 0; i < 50; ++i) ids.emplace_back(i);
  const StakeTable s(pareto_stakes(ids, 1.5, rng));
  const auto early = pos_election_probabilities(s, ids);
  SlashQueue q;
  StakeTable live = s;
  for (std::uint64_t h = 0; h < 1000; ++h) q.apply_due(live, h);
  CHECK(pos_election_probabilities(live, ids) == early);
}

TEST_CASE("pareto stakes are heavy tailed and at least one") {
  Rng rng(93);
  std::vector<ValidatorId> ids;
  for (std::uint32_t i = 0; i < 10000; ++i) ids.emplace_back(i);
  const auto s = pareto_stakes(ids, 2.0, rng);
  double sum = 0.0;
  for (const auto& [id, x] : s) {
    CHECK(x >= 1.0);
    sum += x;
  }
  // Mean of a Pareto(alpha = 2, x_m = 1) is 2.
  CHECK(sum / 10000 == doctest::Approx(2.0).epsilon(0.1));
}
