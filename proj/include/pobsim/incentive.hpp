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

// Incentive compatibility of honest play.
//
// A one-round deviation gains at most deviation_gain. Getting caught costs
// the immediate penalty plus the discounted stream of honest rewards lost to
// the weight cut. Honesty is a strict equilibrium when the loss dominates.

#ifndef POBSIM_INCENTIVE_HPP_
#define POBSIM_INCENTIVE_HPP_

#include <cstdint>
#include <vector>

namespace pob {

struct ScenarioConfig;

struct IncentiveParams {
  double discount = 0.9;  // per-round discount, in (0, 1)
  double immediate_penalty = 0.0;
  double slash_factor = 0.2;  // rho_p, in [0, 1)
  double expected_honest_reward = 0.0;
  double deviation_gain = 0.0;

  void validate() const;
};

struct IcCheck {
  bool holds = false;
  double margin = 0.0;
};

double future_loss(const IncentiveParams& p);
IcCheck check_ic(const IncentiveParams& p);

struct IcTrial {
  std::uint64_t seed = 0;
  double honest_payoff = 0.0;     // discounted
  double deviating_payoff = 0.0;  // discounted
  double max_round_gain = 0.0;
  double mean_honest_reward = 0.0;
};

struct IcReport {
  std::vector<IcTrial> trials;
  double honest_payoff = 0.0;  // means over trials
  double deviating_payoff = 0.0;
  IncentiveParams measured;  // deviation gain and E[R] from the runs
  IcCheck check;
  bool deviation_favorable = false;  // deviating_payoff >= honest_payoff
  // check.holds implies deviating_payoff < honest_payoff.
  bool consistent = true;
};

// Paired runs: the focal validator plays honest in one arm and its rostered
// strategy in the other, all else equal. `rounds` overrides the epoch count
// when non-zero; `trials` overrides the trial count when non-zero.
IcReport empirical_ic(const ScenarioConfig& config, std::uint32_t rounds = 0,
                      std::uint32_t trials = 0);

}  // namespace pob

#endif  // POBSIM_INCENTIVE_HPP_
