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

#include "pobsim/incentive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pobsim/common.hpp"
#include "pobsim/config.hpp"
#include "pobsim/experiments.hpp"
#include "pobsim/metrics.hpp"
#include "pobsim/netsim.hpp"

namespace pob {

void IncentiveParams::validate() const {
  require(discount > 0.0 && discount < 1.0, "discount must lie in (0,1)");
  require(immediate_penalty >= 0.0, "immediate penalty must be non-negative");
  require(slash_factor >= 0.0 && slash_factor < 1.0, "slash factor must lie in [0,1)");
  require(expected_honest_reward >= 0.0, "expected honest reward must be non-negative");
  require(deviation_gain >= 0.0, "deviation gain must be non-negative");
}

double future_loss(const IncentiveParams& p) {
  p.validate();
  return p.immediate_penalty +
         (1.0 - p.slash_factor) * p.expected_honest_reward / (1.0 - p.discount);
}

IcCheck check_ic(const IncentiveParams& p) {
  const double loss = future_loss(p);
  return {loss > p.deviation_gain, loss - p.deviation_gain};
}

namespace {

double discounted(const std::vector<double>& payoffs, double discount) {
  double sum = 0.0;
  double factor = 1.0;
  for (double x : payoffs) {
    sum += factor * x;
    factor *= discount;
  }
  return sum;
}

ValidatorId focal_of(const ScenarioConfig& config) {
  if (config.incentive.focal) return ValidatorId(*config.incentive.focal);
  for (const ValidatorPlan& plan : config.resolved_roster()) {
    if (plan.strategy.kind != StrategyKind::kHonest) return plan.id;
  }
  fail(ErrorCode::kConfig, "incentive.focal: no deviating validator in the roster");
}

}  // namespace

IcReport empirical_ic(const ScenarioConfig& config, std::uint32_t rounds,
                      std::uint32_t trials) {
  ScenarioConfig deviating = config;
  if (rounds > 0) deviating.epochs = rounds;
  const ValidatorId focal = focal_of(deviating);

  // The honest arm replaces the focal validator's roster line only.
  ScenarioConfig honest = deviating;
  RosterEntry line;
  line.first = focal.value;
  line.last = focal.value;
  line.strategy = StrategySpec{};
  for (const ValidatorPlan& plan : deviating.resolved_roster()) {
    if (plan.id == focal) {
      line.weight = plan.weight;
      line.join_epoch = plan.join_epoch;
    }
  }
  honest.roster.push_back(line);

  const std::uint32_t n = trials > 0 ? trials : config.trials;
  IcReport report;
  double honest_reward_sum = 0.0;
  std::size_t honest_rounds = 0;
  double max_gain = 0.0;
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::uint64_t seed = trial_seed(config.seed, k);
    const TrialResult h = run_trial(honest, seed, config.protocol);
    const TrialResult d = run_trial(deviating, seed, config.protocol);
    const std::vector<double> hp = focal_round_payoffs(h, honest, focal);
    const std::vector<double> dp = focal_round_payoffs(d, deviating, focal);
    IcTrial t;
    t.seed = seed;
    t.honest_payoff = discounted(hp, config.incentive.discount);
    t.deviating_payoff = discounted(dp, config.incentive.discount);
    double trial_reward = 0.0;
    for (std::size_t r = 0; r < hp.size(); ++r) {
      t.max_round_gain = std::max(t.max_round_gain, dp[r] - hp[r]);
      trial_reward += hp[r];
    }
    t.mean_honest_reward = hp.empty() ? 0.0 : trial_reward / static_cast<double>(hp.size());
    honest_reward_sum += trial_reward;
    honest_rounds += hp.size();
    max_gain = std::max(max_gain, t.max_round_gain);
    report.honest_payoff += t.honest_payoff;
    report.deviating_payoff += t.deviating_payoff;
    report.trials.push_back(t);
  }
  if (n > 0) {
    report.honest_payoff /= n;
    report.deviating_payoff /= n;
  }
  report.measured.discount = config.incentive.discount;
  report.measured.immediate_penalty = config.penalty.fine;
  report.measured.slash_factor = config.penalty.policy.rho_p;
  report.measured.expected_honest_reward =
      honest_rounds == 0 ? 0.0 : std::max(0.0, honest_reward_sum / honest_rounds);
  report.measured.deviation_gain = max_gain;
  report.check = check_ic(report.measured);
  report.deviation_favorable = report.deviating_payoff >= report.honest_payoff;
  report.consistent = !report.check.holds || !report.deviation_favorable;
  return report;
}

}  // namespace pob
