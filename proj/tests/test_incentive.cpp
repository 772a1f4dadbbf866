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

#include "doctest.h"
#include "pobsim/config.hpp"
#include "pobsim/experiments.hpp"
#include "pobsim/incentive.hpp"
#include "pobsim/random.hpp"

using namespace pob;

namespace {

IncentiveParams params(double discount, double penalty, double rho_p, double reward,
                       double gain = 0.0) {
  IncentiveParams p;
  p.discount = discount;
  p.immediate_penalty = penalty;
  p.slash_factor = rho_p;
  p.expected_honest_reward = reward;
  p.deviation_gain = gain;
  return p;
}

}  // namespace

TEST_CASE("future loss examples") {
  CHECK(future_loss(params(0.5, 0, 0, 1)) == 2.0);
  CHECK(future_loss(params(0.9, 10, 0.2, 3)) == doctest::Approx(34.0).epsilon(1e-14));
  CHECK(future_loss(params(0.9, 5, 1.0 - 1e-12, 3)) == doctest::Approx(5.0).epsilon(1e-9));
  CHECK_THROWS_AS(future_loss(params(1.0, 0, 0, 1)), Error);
  CHECK_THROWS_AS(future_loss(params(0.5, 0, 1.0, 1)), Error);
}

TEST_CASE("check_ic examples") {
  const IcCheck a = check_ic(params(0.9, 10, 0.2, 3, 5));
  CHECK(a.holds);
  CHECK(a.margin == doctest::Approx(29.0));
  IncentiveParams edge = params(0.9, 10, 0.2, 3);
  edge.deviation_gain = future_loss(edge);
  const IcCheck b = check_ic(edge);
  CHECK_FALSE(b.holds);
  CHECK(b.margin == 0.0);
  CHECK(check_ic(params(0.5, 0, 0.5, 1, 0)).holds);
}

TEST_CASE("future loss monotonicity and scale consistency") {
  Rng rng(61);
  for (int i = 0; i < 10000; ++i) {
    const IncentiveParams p = params(rng.uniform(0.01, 0.98), rng.uniform(0, 10),
                                     rng.uniform(0, 0.98), rng.uniform(0, 10),
                                     rng.uniform(0, 50));
    const double l = future_loss(p);
    IncentiveParams q = p;
    q.slash_factor = rng.uniform(p.slash_factor, 0.99);
    CHECK(future_loss(q) <= l + 1e-12);
    q = p;
    q.expected_honest_reward += rng.uniform();
    CHECK(future_loss(q) >= l);
    q = p;
    q.immediate_penalty += rng.uniform();
    CHECK(future_loss(q) >= l);
    q = p;
    q.discount = rng.uniform(p.discount, 0.99);
    CHECK(future_loss(q) >= l - 1e-12);

    const double c = rng.uniform(0.1, 10.0);
    q = p;
    q.immediate_penalty *= c;
    q.expected_honest_reward *= c;
    q.deviation_gain *= c;
    const double margin = check_ic(p).margin;
    if (std::abs(margin) > 1e-9 * (1 + l)) CHECK(check_ic(q).holds == check_ic(p).holds);
  }
}

TEST_CASE("honest focal validator earns the same in both arms") {
  ScenarioConfig c = builtin_preset("ic-check");
  c.epochs = 60;
  c.trials = 2;
  c.roster[0].strategy = StrategySpec{};
  c.incentive.focal = c.n_validators - 1;
  const IcReport r = empirical_ic(c);
  REQUIRE(r.trials.size() == 2);
  for (const IcTrial& t : r.trials) CHECK(t.honest_payoff == t.deviating_payoff);
  CHECK(r.measured.deviation_gain == 0.0);
}

TEST_CASE("deviation loses with punishment and pays without it") {
  ScenarioConfig c = builtin_preset("ic-check");
  c.epochs = 120;
  c.trials = 3;
  const IcReport on = empirical_ic(c);
  CHECK(on.deviating_payoff < on.honest_payoff);
  CHECK(on.consistent);
  c.watchdog.enabled = false;
  const IcReport off = empirical_ic(c);
  CHECK(off.deviation_favorable);
  CHECK(off.measured.deviation_gain > 0.0);
}
