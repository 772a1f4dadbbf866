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

#include "doctest.h"
#include "pobsim/random.hpp"
#include "pobsim/rewards.hpp"

using namespace pob;

namespace {
const ValidatorId a(0), b(1), c(2);
}

TEST_CASE("active set is strict") {
  CHECK(active_set({{a, 1}, {b, 0}}, 0.0) == std::set<ValidatorId>{a});
  CHECK(active_set({{a, -5}}, 0.0).empty());
  CHECK(active_set({{a, 0.5}, {b, 0.6}, {c, 0.4}}, 0.45) == std::set<ValidatorId>{a, b});
}

TEST_CASE("distribution examples") {
  RewardSchedule s;
  s.total_reward = 100;
  s.base_reward = 10;
  const WeightTable w({{a, 0.75}, {b, 0.25}});
  const auto pays = distribute(s, w, {{a, 1}, {b, 1}}, {});
  REQUIRE(pays.size() == 2);
  CHECK(pays[0].total == doctest::Approx(70));
  CHECK(pays[1].total == doctest::Approx(30));

  const auto solo = distribute(s, w, {{a, 1}, {b, 0}}, {});
  REQUIRE(solo.size() == 1);
  CHECK(solo[0].total == doctest::Approx(100));

  CHECK(distribute(s, w, {{a, 0}, {b, -1}}, {}).empty());

  s.base_reward = 60;
  try {
    distribute(s, w, {{a, 1}, {b, 1}}, {});
    FAIL("expected an insufficient pool");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientPool);
  }
}

TEST_CASE("zero active weight splits the bonus evenly") {
  RewardSchedule s;
  s.total_reward = 10;
  s.base_reward = 1;
  const WeightTable w({{a, 0.0}, {b, 0.0}, {c, 1.0}}, 0, false);
  const auto pays = distribute(s, w, {{a, 1}, {b, 1}}, {});
  REQUIRE(pays.size() == 2);
  CHECK(pays[0].total == doctest::Approx(5));
  CHECK(pays[1].total == doctest::Approx(5));
}

TEST_CASE("activeness multiplier") {
  RewardSchedule s;
  s.total_reward = 100;
  s.base_reward = 10;
  s.activeness_epsilon = 0.5;
  const WeightTable w({{a, 0.75}, {b, 0.25}});
  const auto pays = distribute(s, w, {{a, 1}, {b, 1}}, {{a, 1.0}});
  CHECK(pays[0].activeness_multiplier == 1.5);
  CHECK(pays[0].total == doctest::Approx(105));
  CHECK(pays[1].activeness_multiplier == 1.0);
  CHECK(pays[1].total == doctest::Approx(30));
}

TEST_CASE("conservation, monotonicity and floor") {
  Rng rng(51);
  for (int i = 0; i < 10000; ++i) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng.below(10));
    std::map<ValidatorId, double> w, scores, act;
    for (std::uint32_t k = 0; k < n; ++k) {
      w[ValidatorId(k)] = rng.bernoulli(0.1) ? 0.0 : rng.uniform();
      scores[ValidatorId(k)] = rng.uniform(-1.0, 2.0);
      act[ValidatorId(k)] = 0.5;
    }
    WeightTable t(w, 0, false);
    RewardSchedule s;
    s.total_reward = rng.uniform(10, 200);
    s.base_reward = rng.uniform(0, s.total_reward / n);
    s.activity_threshold = rng.uniform(-0.5, 0.5);
    s.activeness_epsilon = rng.bernoulli(0.5) ? 0.0 : rng.uniform();
    const auto pays = distribute(s, t, scores, act);
    const auto active = active_set(scores, s.activity_threshold);
    CHECK(pays.size() == active.size());
    double pre = 0.0;
    for (const Payout& p : pays) {
      CHECK(active.contains(p.validator));
      CHECK(p.total == doctest::Approx((p.base + p.bonus) * p.activeness_multiplier));
      CHECK(p.total >= s.base_reward * (1 + s.activeness_epsilon * 0.5) - 1e-9);
      pre += p.base + p.bonus;
      for (const Payout& q : pays) {
        if (t.weight(p.validator) > t.weight(q.validator)) CHECK(p.total >= q.total);
      }
      if (s.activeness_epsilon == 0.0 && t.weight(p.validator) == 0.0 && pays.size() > 1) {
        double active_w = 0.0;
        for (ValidatorId id : active) active_w += t.weight(id);
        if (active_w > 0.0) CHECK(p.total == doctest::Approx(s.base_reward));
      }
    }
    if (!pays.empty()) CHECK(std::abs(pre - s.total_reward) <= 1e-9 * s.total_reward);
  }
}
