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

#include "pobsim/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "pobsim/experiments.hpp"

namespace pob {
namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) +
         ")";
}

[[noreturn]] void bad(const std::string& path, const YAML::Node& node, const std::string& what) {
  fail(ErrorCode::kConfig, path + ": " + what + where(node));
}

std::string scalar(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) bad(path, node, "expected a scalar value");
  return node.Scalar();
}

double to_real(const YAML::Node& node, const std::string& path) {
  const std::string s = scalar(node, path);
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    bad(path, node, "expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t to_count(const YAML::Node& node, const std::string& path) {
  const std::string s = scalar(node, path);
  std::uint64_t v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    bad(path, node, "expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::int64_t to_int(const YAML::Node& node, const std::string& path) {
  const std::string s = scalar(node, path);
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) {
    bad(path, node, "expected an integer, got '" + s + "'");
  }
  return v;
}

std::uint32_t to_u32(const YAML::Node& node, const std::string& path) {
  const std::uint64_t v = to_count(node, path);
  if (v > 0xffffffffULL) bad(path, node, "value too large");
  return static_cast<std::uint32_t>(v);
}

bool to_bool(const YAML::Node& node, const std::string& path) {
  const std::string s = scalar(node, path);
  if (s == "true") return true;
  if (s == "false") return false;
  bad(path, node, "expected true or false, got '" + s + "'");
}

Rational to_rational(const YAML::Node& node, const std::string& path) {
  const std::string s = scalar(node, path);
  try {
    return Rational::parse(s);
  } catch (const Error&) {
    bad(path, node, "expected a fraction such as 2/3 or 0.67, got '" + s + "'");
  }
}

std::vector<double> to_reals(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) bad(path, node, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(to_real(node[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

bool is_auto(const YAML::Node& node) { return node.IsScalar() && node.Scalar() == "auto"; }

// Visits the keys of one mapping and rejects any key nobody asked for.
class MapReader {
 public:
  MapReader(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) bad(path_.empty() ? "config" : path_, node_, "expected a mapping");
  }

  void field(const char* key, const std::function<void(const YAML::Node&, const std::string&)>& f) {
    seen_.insert(key);
    const YAML::Node child = node_[key];
    if (child.IsDefined() && !child.IsNull()) f(child, join(key));
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const std::string key = it->first.Scalar();
      if (!seen_.contains(key)) bad(join(key), it->first, "unknown key");
    }
  }

  std::string join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T>
std::function<void(const YAML::Node&, const std::string&)> into(T& target,
                                                               T (*conv)(const YAML::Node&,
                                                                         const std::string&)) {
  return [&target, conv](const YAML::Node& n, const std::string& p) { target = conv(n, p); };
}

void read_section(const YAML::Node& root, const char* key, MapReader& parent,
                  const std::function<void(MapReader&)>& body) {
  parent.field(key, [&](const YAML::Node& n, const std::string& p) {
    MapReader r(n, p);
    body(r);
    r.finish();
  });
  (void)root;
}

StrategySpec read_strategy(const YAML::Node& kind_node, const YAML::Node& params,
                           const std::string& path) {
  StrategySpec spec;
  const std::string kind = scalar(kind_node, path + ".strategy");
  auto k = parse_strategy_kind(kind);
  if (!k) {
    bad(path + ".strategy", kind_node,
        "unknown strategy '" + kind +
            "' (honest, stealth, sybil-burst, adaptive-sybil, long-range-fork, griefing)");
  }
  spec.kind = *k;
  if (params.IsDefined() && !params.IsNull()) {
    if (!params.IsMap()) bad(path + ".params", params, "expected a mapping");
    for (auto it = params.begin(); it != params.end(); ++it) {
      spec.params[it->first.Scalar()] =
          scalar(it->second, path + ".params." + it->first.Scalar());
    }
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, path + ": " + e.what() + where(params.IsDefined() ? params : kind_node));
  }
  spec.params = spec.effective_params();
  return spec;
}

ScenarioConfig from_node(const YAML::Node& root) {
  ScenarioConfig c;
  if (root.IsNull()) fail(ErrorCode::kConfig, "config: document is empty");
  MapReader top(root, "");
  top.field("name", [&](const YAML::Node& n, const std::string& p) { c.name = scalar(n, p); });
  top.field("protocol", [&](const YAML::Node& n, const std::string& p) {
    auto v = parse_protocol(scalar(n, p));
    if (!v) bad(p, n, "expected pob or pos");
    c.protocol = *v;
  });
  top.field("compare_pos", into(c.compare_pos, to_bool));
  top.field("n_validators", into(c.n_validators, to_u32));
  top.field("epochs", into(c.epochs, to_u32));
  top.field("blocks_per_epoch", into(c.blocks_per_epoch, to_u32));
  top.field("trials", into(c.trials, to_u32));
  top.field("seed", into(c.seed, to_count));
  top.field("detection_window", into(c.detection_window, to_u32));
  top.field("rho", into(c.rho, to_real));
  top.field("delta", into(c.delta, to_real));
  top.field("quorum", into(c.quorum, to_rational));
  top.field("initial_weights", [&](const YAML::Node& n, const std::string& p) {
    const std::string s = scalar(n, p);
    if (s == "uniform") c.initial_weights = InitialWeights::kUniform;
    else if (s == "stake") c.initial_weights = InitialWeights::kStake;
    else bad(p, n, "expected uniform or stake");
  });

  read_section(root, "watchdog", top, [&](MapReader& r) {
    r.field("enabled", into(c.watchdog.enabled, to_bool));
    r.field("theta", into(c.watchdog.theta, to_rational));
    r.field("committee_size", [&](const YAML::Node& n, const std::string& p) {
      if (is_auto(n)) c.watchdog.committee_size.reset();
      else c.watchdog.committee_size = to_u32(n, p);
    });
    r.field("detection_accuracy", into(c.watchdog.detection_accuracy, to_real));
    r.field("observation_probability", into(c.watchdog.observation_probability, to_real));
  });

  read_section(root, "penalty", top, [&](MapReader& r) {
    PenaltyPolicy& pol = c.penalty.policy;
    r.field("mode", [&](const YAML::Node& n, const std::string& p) {
      const std::string s = scalar(n, p);
      if (s == "additive") pol.mode = SlashMode::kAdditive;
      else if (s == "multiplicative") pol.mode = SlashMode::kMultiplicative;
      else bad(p, n, "expected additive or multiplicative");
    });
    r.field("base_coefficient", into(pol.base_coefficient, to_real));
    r.field("rho_p", into(pol.rho_p, to_real));
    r.field("escalation", into(pol.escalation, to_reals));
    r.field("full_slash_kinds", [&](const YAML::Node& n, const std::string& p) {
      if (!n.IsSequence()) bad(p, n, "expected a list of action kinds");
      pol.full_slash_kinds.clear();
      for (std::size_t i = 0; i < n.size(); ++i) {
        const std::string s = scalar(n[i], p);
        auto k = parse_action_kind(s);
        if (!k) bad(p, n[i], "unknown action kind '" + s + "'");
        pol.full_slash_kinds.insert(*k);
      }
    });
    r.field("fine", into(c.penalty.fine, to_real));
  });
  // An empty flow sequence parses as a null-free empty list; keep it.
  if (root["penalty"].IsMap() && root["penalty"]["full_slash_kinds"].IsSequence() &&
      root["penalty"]["full_slash_kinds"].size() == 0) {
    c.penalty.policy.full_slash_kinds.clear();
  }

  read_section(root, "rewards", top, [&](MapReader& r) {
    r.field("total_reward", into(c.rewards.total_reward, to_real));
    r.field("base_reward", [&](const YAML::Node& n, const std::string& p) {
      if (is_auto(n)) c.rewards.base_reward.reset();
      else c.rewards.base_reward = to_real(n, p);
    });
    r.field("activity_threshold", into(c.rewards.activity_threshold, to_real));
    r.field("epsilon", into(c.rewards.epsilon, to_real));
  });

  read_section(root, "activeness", top, [&](MapReader& r) {
    r.field("betas", [&](const YAML::Node& n, const std::string& p) {
      const std::vector<double> b = to_reals(n, p);
      if (b.size() != 3) bad(p, n, "expected three betas");
      c.activeness.betas = {b[0], b[1], b[2]};
    });
    r.field("freq_threshold", into(c.activeness.freq_threshold, to_real));
    r.field("quality_threshold", into(c.activeness.quality_threshold, to_real));
  });

  read_section(root, "latency", top, [&](MapReader& r) {
    r.field("distribution", [&](const YAML::Node& n, const std::string& p) {
      const std::string s = scalar(n, p);
      if (s == "exponential") c.latency.distribution = LatencyDistribution::kExponential;
      else if (s == "fixed") c.latency.distribution = LatencyDistribution::kFixed;
      else if (s == "uniform") c.latency.distribution = LatencyDistribution::kUniform;
      else bad(p, n, "expected exponential, fixed or uniform");
    });
    r.field("mean_ms", into(c.latency.mean_ms, to_real));
    r.field("stage_cost_ms", into(c.latency.stage_cost_ms, to_real));
    r.field("scoring_cost_ms", into(c.latency.scoring_cost_ms, to_real));
  });

  read_section(root, "pos", top, [&](MapReader& r) {
    r.field("slash_delay_blocks", into(c.pos.slash_delay_blocks, to_count));
    r.field("slash_fraction", into(c.pos.slash_fraction, to_real));
    r.field("stakes", [&](const YAML::Node& n, const std::string& p) {
      const std::string s = scalar(n, p);
      if (s == "uniform") c.pos.stakes = StakeDistribution::kUniform;
      else if (s == "pareto") c.pos.stakes = StakeDistribution::kPareto;
      else bad(p, n, "expected uniform or pareto");
    });
    r.field("pareto_alpha", into(c.pos.pareto_alpha, to_real));
    r.field("join_stake", into(c.pos.join_stake, to_real));
  });

  read_section(root, "behavior", top, [&](MapReader& r) {
    BehaviorModel& m = c.behavior;
    r.field("motivation_weights", into(m.motivation_weights, to_reals));
    r.field("propose_intensities", into(m.propose_intensities, to_reals));
    r.field("validate_intensities", into(m.validate_intensities, to_reals));
    r.field("oracle_intensities", into(m.oracle_intensities, to_reals));
    r.field("fraud_intensities", into(m.fraud_intensities, to_reals));
    r.field("idle_intensities", into(m.idle_intensities, to_reals));
    r.field("base_utility_low", into(m.base_utility_low, to_real));
    r.field("base_utility_high", into(m.base_utility_high, to_real));
    r.field("initiative_low", into(m.initiative_low, to_real));
    r.field("initiative_high", into(m.initiative_high, to_real));
    r.field("oracle_probability", into(m.oracle_probability, to_real));
    r.field("error_rate", into(m.error_rate, to_real));
    r.field("error_utility", into(m.error_utility, to_real));
  });

  read_section(root, "incentive", top, [&](MapReader& r) {
    r.field("focal", [&](const YAML::Node& n, const std::string& p) {
      if (is_auto(n)) c.incentive.focal.reset();
      else c.incentive.focal = to_u32(n, p);
    });
    r.field("discount", into(c.incentive.discount, to_real));
    r.field("fraud_gain_per_unit", into(c.incentive.fraud_gain_per_unit, to_real));
  });

  read_section(root, "trace", top, [&](MapReader& r) {
    r.field("path", [&](const YAML::Node& n, const std::string& p) { c.trace.path = scalar(n, p); });
    r.field("synthetic", into(c.trace.synthetic, to_bool));
    r.field("blocks", into(c.trace.blocks, to_count));
    r.field("exploit_height", into(c.trace.exploit_height, to_count));
    r.field("culprit", into(c.trace.culprit, to_u32));
    r.field("exploit_value", into(c.trace.exploit_value, to_real));
    r.field("seed", into(c.trace.seed, to_count));
  });

  read_section(root, "report", top, [&](MapReader& r) {
    r.field("dollars_per_unit", into(c.dollars_per_unit, to_real));
  });

  top.field("roster", [&](const YAML::Node& n, const std::string& p) {
    if (!n.IsSequence()) bad(p, n, "expected a list of roster entries");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string ep = p + "[" + std::to_string(i) + "]";
      MapReader r(n[i], ep);
      RosterEntry e;
      r.field("range", [&](const YAML::Node& rn, const std::string& rp) {
        if (rn.IsScalar()) {
          e.first = e.last = to_int(rn, rp);
        } else if (rn.IsSequence() && rn.size() == 2) {
          e.first = to_int(rn[0], rp);
          e.last = to_int(rn[1], rp);
        } else {
          bad(rp, rn, "expected an index or [first, last]");
        }
      });
      std::optional<YAML::Node> kind_node;
      YAML::Node params_node;
      r.field("strategy", [&](const YAML::Node& sn, const std::string&) { kind_node = sn; });
      r.field("params", [&](const YAML::Node& pn, const std::string&) { params_node = pn; });
      r.field("weight", into(e.weight, to_real));
      r.field("join_epoch", into(e.join_epoch, to_u32));
      r.finish();
      if (kind_node) e.strategy = read_strategy(*kind_node, params_node, ep);
      else if (params_node.IsDefined()) bad(ep + ".params", params_node, "params without a strategy");
      c.roster.push_back(std::move(e));
    }
  });

  top.field("sweep", [&](const YAML::Node& n, const std::string& p) {
    if (!n.IsSequence()) bad(p, n, "expected a list of sweep axes");
    for (std::size_t i = 0; i < n.size(); ++i) {
      const std::string ap = p + "[" + std::to_string(i) + "]";
      MapReader r(n[i], ap);
      SweepAxis axis;
      r.field("path", [&](const YAML::Node& x, const std::string& xp) { axis.path = scalar(x, xp); });
      r.field("values", [&](const YAML::Node& x, const std::string& xp) {
        if (!x.IsSequence()) bad(xp, x, "expected a list of values");
        for (std::size_t j = 0; j < x.size(); ++j) axis.values.push_back(scalar(x[j], xp));
      });
      r.finish();
      if (axis.path.empty()) bad(ap + ".path", n[i], "missing");
      if (axis.values.empty()) bad(ap + ".values", n[i], "must not be empty");
      c.sweep.push_back(std::move(axis));
    }
  });
  top.finish();
  return c;
}

[[noreturn]] void out_of_range(const std::string& path, const std::string& range) {
  fail(ErrorCode::kConfig, path + ": must lie in " + range);
}

void check(bool ok, const std::string& path, const std::string& range) {
  if (!ok) out_of_range(path, range);
}

void check_unit(double v, const std::string& path) { check(v >= 0.0 && v <= 1.0, path, "[0, 1]"); }

std::int64_t resolve_index(std::int64_t i, std::uint32_t n) { return i < 0 ? n + i : i; }

// Shortest round-trip form, always with a decimal point or exponent so YAML
// readers keep it a number.
std::string num(double v) { return format_double(v); }

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + num(v[i]);
  return out + "]";
}

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::kParse, "config: " + std::string(e.msg) + " (line " +
                                std::to_string(e.mark.line + 1) + ", column " +
                                std::to_string(e.mark.column + 1) + ")");
  }
}

}  // namespace

std::string_view to_string(LatencyDistribution d) {
  switch (d) {
    case LatencyDistribution::kExponential: return "exponential";
    case LatencyDistribution::kFixed: return "fixed";
    case LatencyDistribution::kUniform: return "uniform";
  }
  return "exponential";
}

std::string_view to_string(StakeDistribution d) {
  return d == StakeDistribution::kUniform ? "uniform" : "pareto";
}

std::string_view to_string(InitialWeights w) {
  return w == InitialWeights::kUniform ? "uniform" : "stake";
}

std::uint32_t ScenarioConfig::committee_size() const {
  if (watchdog.committee_size) return *watchdog.committee_size;
  return n_validators == 0 ? 0 : std::min<std::uint32_t>(30, n_validators - 1);
}

double ScenarioConfig::base_reward() const {
  if (rewards.base_reward) return *rewards.base_reward;
  return n_validators == 0 ? 0.0 : rewards.total_reward / (2.0 * n_validators);
}

std::vector<ValidatorPlan> ScenarioConfig::resolved_roster() const {
  std::vector<ValidatorPlan> plans(n_validators);
  for (std::uint32_t i = 0; i < n_validators; ++i) plans[i].id = ValidatorId(i);
  for (const RosterEntry& e : roster) {
    const std::int64_t first = resolve_index(e.first, n_validators);
    const std::int64_t last = resolve_index(e.last, n_validators);
    for (std::int64_t i = std::max<std::int64_t>(first, 0);
         i <= last && i < static_cast<std::int64_t>(n_validators); ++i) {
      plans[i].strategy = e.strategy;
      plans[i].weight = e.weight;
      plans[i].join_epoch = e.join_epoch;
    }
  }
  return plans;
}

void ScenarioConfig::validate() const {
  check(n_validators >= 2, "n_validators", "[2, inf)");
  check(blocks_per_epoch >= 1, "blocks_per_epoch", "[1, inf)");
  check(trials >= 1, "trials", "[1, inf)");
  check(detection_window >= 1, "detection_window", "[1, inf)");
  check_unit(rho, "rho");
  check_unit(delta, "delta");
  check(quorum.numerator() > 0 && quorum <= Rational(1, 1), "quorum", "(0, 1]");

  check(watchdog.theta.numerator() > 0 && watchdog.theta <= Rational(1, 1), "watchdog.theta",
        "(0, 1]");
  if (watchdog.committee_size) {
    check(*watchdog.committee_size >= 1 && *watchdog.committee_size <= n_validators - 1,
          "watchdog.committee_size", "[1, n_validators - 1]");
  }
  check_unit(watchdog.detection_accuracy, "watchdog.detection_accuracy");
  check_unit(watchdog.observation_probability, "watchdog.observation_probability");

  const PenaltyPolicy& pol = penalty.policy;
  check(pol.base_coefficient > 0.0, "penalty.base_coefficient", "(0, inf)");
  check(pol.rho_p >= 0.0 && pol.rho_p < 1.0, "penalty.rho_p", "[0, 1)");
  check(!pol.escalation.empty() && pol.escalation.front() == 1.0, "penalty.escalation",
        "a non-decreasing list starting at 1");
  for (std::size_t i = 1; i < pol.escalation.size(); ++i) {
    check(pol.escalation[i] >= pol.escalation[i - 1], "penalty.escalation",
          "a non-decreasing list starting at 1");
  }
  check(penalty.fine >= 0.0, "penalty.fine", "[0, inf)");

  check(rewards.total_reward >= 0.0, "rewards.total_reward", "[0, inf)");
  check(base_reward() >= 0.0 && base_reward() * n_validators <= rewards.total_reward,
        "rewards.base_reward", "[0, total_reward / n_validators]");
  check(rewards.epsilon >= 0.0, "rewards.epsilon", "[0, inf)");

  for (std::size_t i = 0; i < 3; ++i) {
    check_unit(activeness.betas[i], "activeness.betas[" + std::to_string(i) + "]");
  }
  check(std::abs(activeness.betas[0] + activeness.betas[1] + activeness.betas[2] - 1.0) <= 1e-9,
        "activeness.betas", "values summing to 1");
  check(activeness.freq_threshold > 0.0, "activeness.freq_threshold", "(0, inf)");
  check(activeness.quality_threshold > 0.0, "activeness.quality_threshold", "(0, inf)");

  check(latency.mean_ms > 0.0, "latency.mean_ms", "(0, inf)");
  check(latency.stage_cost_ms >= 0.0, "latency.stage_cost_ms", "[0, inf)");
  check(latency.scoring_cost_ms >= 0.0, "latency.scoring_cost_ms", "[0, inf)");

  check_unit(pos.slash_fraction, "pos.slash_fraction");
  check(pos.pareto_alpha > 0.0, "pos.pareto_alpha", "(0, inf)");
  check(pos.join_stake >= 0.0, "pos.join_stake", "[0, inf)");

  try {
    behavior.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, std::string("behavior: ") + e.what());
  }

  check(incentive.discount > 0.0 && incentive.discount < 1.0, "incentive.discount", "(0, 1)");
  if (incentive.focal) check(*incentive.focal < n_validators, "incentive.focal", "[0, n_validators)");
  check(incentive.fraud_gain_per_unit >= 0.0, "incentive.fraud_gain_per_unit", "[0, inf)");

  if (trace.synthetic) {
    check(trace.culprit < n_validators, "trace.culprit", "[0, n_validators)");
    check(trace.exploit_height < trace.blocks, "trace.exploit_height", "[0, trace.blocks)");
    check(trace.exploit_value > 0.0, "trace.exploit_value", "(0, inf)");
  }
  check(dollars_per_unit > 0.0, "report.dollars_per_unit", "(0, inf)");

  for (std::size_t i = 0; i < roster.size(); ++i) {
    const RosterEntry& e = roster[i];
    const std::string p = "roster[" + std::to_string(i) + "]";
    const std::int64_t first = resolve_index(e.first, n_validators);
    const std::int64_t last = resolve_index(e.last, n_validators);
    check(first >= 0 && last < static_cast<std::int64_t>(n_validators) && first <= last,
          p + ".range", "ids within [0, n_validators) with first <= last");
    check(e.weight >= 0.0 && std::isfinite(e.weight), p + ".weight", "[0, inf)");
    check(e.join_epoch == 0 || e.join_epoch < std::max<std::uint32_t>(epochs, 1),
          p + ".join_epoch", "[0, epochs)");
    try {
      e.strategy.validate();
    } catch (const Error& err) {
      fail(ErrorCode::kConfig, p + ": " + err.what());
    }
  }
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    check(!sweep[i].path.empty() && !sweep[i].values.empty(),
          "sweep[" + std::to_string(i) + "]", "a path with at least one value");
  }
}

ScenarioConfig parse_config(const std::string& yaml_text) {
  ScenarioConfig c = from_node(load_yaml(yaml_text));
  c.validate();
  if (!c.sweep.empty()) {
    ScenarioConfig probe = c;
    probe.sweep.clear();
    for (const SweepAxis& axis : c.sweep) {
      for (const std::string& v : axis.values) (void)with_override(probe, axis.path, v);
    }
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string echo_config(const ScenarioConfig& c) {
  std::ostringstream o;
  o << "name: " << quoted(c.name) << "\n";
  o << "protocol: " << to_string(c.protocol) << "\n";
  o << "compare_pos: " << (c.compare_pos ? "true" : "false") << "\n";
  o << "n_validators: " << c.n_validators << "\n";
  o << "epochs: " << c.epochs << "\n";
  o << "blocks_per_epoch: " << c.blocks_per_epoch << "\n";
  o << "trials: " << c.trials << "\n";
  o << "seed: " << c.seed << "\n";
  o << "detection_window: " << c.detection_window << "\n";
  o << "rho: " << num(c.rho) << "\n";
  o << "delta: " << num(c.delta) << "\n";
  o << "quorum: " << c.quorum.str() << "\n";
  o << "initial_weights: " << to_string(c.initial_weights) << "\n";

  o << "watchdog:\n";
  o << "  enabled: " << (c.watchdog.enabled ? "true" : "false") << "\n";
  o << "  theta: " << c.watchdog.theta.str() << "\n";
  if (c.watchdog.committee_size) {
    o << "  committee_size: " << *c.watchdog.committee_size << "\n";
  } else {
    o << "  committee_size: auto  # = " << c.committee_size() << "\n";
  }
  o << "  detection_accuracy: " << num(c.watchdog.detection_accuracy) << "\n";
  o << "  observation_probability: " << num(c.watchdog.observation_probability) << "\n";

  const PenaltyPolicy& pol = c.penalty.policy;
  o << "penalty:\n";
  o << "  mode: " << to_string(pol.mode) << "\n";
  o << "  base_coefficient: " << num(pol.base_coefficient) << "\n";
  o << "  rho_p: " << num(pol.rho_p) << "\n";
  o << "  escalation: " << list(pol.escalation) << "\n";
  o << "  full_slash_kinds: [";
  bool first = true;
  for (ActionKind k : pol.full_slash_kinds) {
    o << (first ? "" : ", ") << to_string(k);
    first = false;
  }
  o << "]\n";
  o << "  fine: " << num(c.penalty.fine) << "\n";

  o << "rewards:\n";
  o << "  total_reward: " << num(c.rewards.total_reward) << "\n";
  if (c.rewards.base_reward) {
    o << "  base_reward: " << num(*c.rewards.base_reward) << "\n";
  } else {
    o << "  base_reward: auto  # = " << num(c.base_reward()) << "\n";
  }
  o << "  activity_threshold: " << num(c.rewards.activity_threshold) << "\n";
  o << "  epsilon: " << num(c.rewards.epsilon) << "\n";

  o << "activeness:\n";
  o << "  betas: "
    << list({c.activeness.betas[0], c.activeness.betas[1], c.activeness.betas[2]}) << "\n";
  o << "  freq_threshold: " << num(c.activeness.freq_threshold) << "\n";
  o << "  quality_threshold: " << num(c.activeness.quality_threshold) << "\n";

  o << "latency:\n";
  o << "  distribution: " << to_string(c.latency.distribution) << "\n";
  o << "  mean_ms: " << num(c.latency.mean_ms) << "\n";
  o << "  stage_cost_ms: " << num(c.latency.stage_cost_ms) << "\n";
  o << "  scoring_cost_ms: " << num(c.latency.scoring_cost_ms) << "\n";

  o << "pos:\n";
  o << "  slash_delay_blocks: " << c.pos.slash_delay_blocks << "\n";
  o << "  slash_fraction: " << num(c.pos.slash_fraction) << "\n";
  o << "  stakes: " << to_string(c.pos.stakes) << "\n";
  o << "  pareto_alpha: " << num(c.pos.pareto_alpha) << "\n";
  o << "  join_stake: " << num(c.pos.join_stake) << "\n";

  const BehaviorModel& m = c.behavior;
  o << "behavior:\n";
  o << "  motivation_weights: " << list(m.motivation_weights) << "\n";
  o << "  propose_intensities: " << list(m.propose_intensities) << "\n";
  o << "  validate_intensities: " << list(m.validate_intensities) << "\n";
  o << "  oracle_intensities: " << list(m.oracle_intensities) << "\n";
  o << "  fraud_intensities: " << list(m.fraud_intensities) << "\n";
  o << "  idle_intensities: " << list(m.idle_intensities) << "\n";
  o << "  base_utility_low: " << num(m.base_utility_low) << "\n";
  o << "  base_utility_high: " << num(m.base_utility_high) << "\n";
  o << "  initiative_low: " << num(m.initiative_low) << "\n";
  o << "  initiative_high: " << num(m.initiative_high) << "\n";
  o << "  oracle_probability: " << num(m.oracle_probability) << "\n";
  o << "  error_rate: " << num(m.error_rate) << "\n";
  o << "  error_utility: " << num(m.error_utility) << "\n";

  o << "incentive:\n";
  if (c.incentive.focal) {
    o << "  focal: " << *c.incentive.focal << "\n";
  } else {
    o << "  focal: auto\n";
  }
  o << "  discount: " << num(c.incentive.discount) << "\n";
  o << "  fraud_gain_per_unit: " << num(c.incentive.fraud_gain_per_unit) << "\n";

  o << "trace:\n";
  o << "  path: " << quoted(c.trace.path) << "\n";
  o << "  synthetic: " << (c.trace.synthetic ? "true" : "false") << "\n";
  o << "  blocks: " << c.trace.blocks << "\n";
  o << "  exploit_height: " << c.trace.exploit_height << "\n";
  o << "  culprit: " << c.trace.culprit << "\n";
  o << "  exploit_value: " << num(c.trace.exploit_value) << "\n";
  o << "  seed: " << c.trace.seed << "\n";

  o << "report:\n";
  o << "  dollars_per_unit: " << num(c.dollars_per_unit) << "\n";

  if (c.roster.empty()) {
    o << "roster: []\n";
  } else {
    o << "roster:\n";
    for (const RosterEntry& e : c.roster) {
      o << "  - range: [" << e.first << ", " << e.last << "]\n";
      o << "    strategy: " << to_string(e.strategy.kind) << "\n";
      o << "    weight: " << num(e.weight) << "\n";
      o << "    join_epoch: " << e.join_epoch << "\n";
      const auto params = e.strategy.effective_params();
      if (params.empty()) {
        o << "    params: {}\n";
      } else {
        o << "    params:\n";
        for (const auto& [k, v] : params) o << "      " << k << ": " << quoted(v) << "\n";
      }
    }
  }
  if (c.sweep.empty()) {
    o << "sweep: []\n";
  } else {
    o << "sweep:\n";
    for (const SweepAxis& a : c.sweep) {
      o << "  - path: " << quoted(a.path) << "\n";
      o << "    values: [";
      for (std::size_t i = 0; i < a.values.size(); ++i) {
        o << (i ? ", " : "") << quoted(a.values[i]);
      }
      o << "]\n";
    }
  }
  return o.str();
}

ScenarioConfig with_override(const ScenarioConfig& config, const std::string& path,
                             const std::string& value) {
  YAML::Node root = load_yaml(echo_config(config));
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  if (parts.empty()) fail(ErrorCode::kConfig, "override: empty path");

  YAML::Node node = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (node.IsSequence()) {
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), idx);
      if (ec != std::errc() || idx >= node.size()) {
        fail(ErrorCode::kConfig, "override: no such field '" + path + "'");
      }
      node.reset(node[idx]);
    } else if (node.IsMap() && node[parts[i]].IsDefined()) {
      node.reset(node[parts[i]]);
    } else {
      fail(ErrorCode::kConfig, "override: no such field '" + path + "'");
    }
  }
  const std::string& leaf = parts.back();
  YAML::Node replacement = load_yaml(value);
  if (node.IsSequence()) {
    std::size_t idx = 0;
    auto [ptr, ec] = std::from_chars(leaf.data(), leaf.data() + leaf.size(), idx);
    if (ec != std::errc() || idx >= node.size()) {
      fail(ErrorCode::kConfig, "override: no such field '" + path + "'");
    }
    node[idx] = replacement;
  } else if (node.IsMap() && (node[leaf].IsDefined() ||
                              (parts.size() >= 2 && parts[parts.size() - 2] == "params"))) {
    node[leaf] = replacement;
  } else {
    fail(ErrorCode::kConfig, "override: no such field '" + path + "'");
  }
  YAML::Emitter out;
  out << root;
  return parse_config(out.c_str());
}

}  // namespace pob
