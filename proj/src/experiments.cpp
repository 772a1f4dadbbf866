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

#include "pobsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pobsim/random.hpp"

namespace pob {
namespace {

struct Preset {
  std::string name;
  std::string source;
};

// Stealth attacker shared by the Case A, ic-check and sweep presets.
constexpr const char* kStealthRoster = R"(roster:
  - range: [-1, -1]
    strategy: stealth
    params: {fraud_rate: 0.04, fraud_value: 10, start_epoch: 20}
)";

std::string fairness(std::uint32_t n) {
  return "name: case-b-fairness-" + std::to_string(n) + R"(
n_validators: )" + std::to_string(n) + R"(
epochs: 200
blocks_per_epoch: 10
trials: 5
seed: 202
pos:
  stakes: pareto
  pareto_alpha: 1.2
roster:
  - range: [-5, -1]
    strategy: honest
    weight: 0
    join_epoch: 50
)";
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"case-a-stealth", std::string(R"(name: case-a-stealth
n_validators: 100
epochs: 200
trials: 5
seed: 101
)") + kStealthRoster},
      {"case-a-sybil", R"(name: case-a-sybil
n_validators: 100
epochs: 200
trials: 5
seed: 111
roster:
  - range: [90, 99]
    strategy: sybil-burst
    weight: 0.1
    params: {fraud_value: 1, burst_epoch: 50, burst_period: 10}
)"},
      {"case-b-fairness-100", fairness(100)},
      {"case-b-fairness-1000", fairness(1000)},
      {"case-c-replay", R"(name: case-c-replay
n_validators: 16
trials: 5
seed: 303
trace:
  synthetic: true
  blocks: 1000
  exploit_height: 500
  culprit: 7
  exploit_value: 10
)"},
      {"case-d-adaptive-sybil", R"(name: case-d-adaptive-sybil
n_validators: 100
epochs: 100
trials: 5
seed: 404
roster:
  - range: [95, 99]
    strategy: adaptive-sybil
    params: {fraud_value: 0.1, spawn_rate: 0.1, join_weight: 0}
)"},
      {"case-d-long-range", R"(name: case-d-long-range
n_validators: 100
epochs: 250
blocks_per_epoch: 5
trials: 5
seed: 414
roster:
  - range: [0, 19]
    strategy: long-range-fork
    weight: 3
    params: {defect_epoch: 50, fork_depth: 1000}
)"},
      {"case-d-griefing", R"(name: case-d-griefing
n_validators: 100
epochs: 100
trials: 5
seed: 424
roster:
  - range: [0, 0]
    strategy: griefing
    params: {start_epoch: 20, empty_block_run: 10}
)"},
      {"case-e-sweep", std::string(R"(name: case-e-sweep
n_validators: 100
epochs: 200
trials: 5
seed: 505
penalty:
  mode: additive
behavior:
  error_rate: 0.01
)") + kStealthRoster + R"(  - range: [0, 4]
    strategy: honest
    weight: 0
    join_epoch: 50
sweep:
  - path: penalty.base_coefficient
    values: ["1.0", "1.5"]
  - path: watchdog.theta
    values: ["0.5", "0.7", "0.9"]
  - path: rho
    values: ["0.5", "0.9", "0.99"]
)"},
      {"ic-check", std::string(R"(name: ic-check
n_validators: 100
epochs: 200
trials: 5
seed: 606
incentive:
  focal: auto
  discount: 0.9
  fraud_gain_per_unit: 1
)") + kStealthRoster},
  };
  return all;
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::json aggregate_json(const Aggregate& a) {
  nlohmann::json j;
  j["n"] = a.n;
  j["mean"] = a.mean ? nlohmann::json(*a.mean) : nlohmann::json(nullptr);
  j["ci_half_width"] = a.ci_half_width ? nlohmann::json(*a.ci_half_width) : nlohmann::json(nullptr);
  return j;
}

bool is_traced(const ScenarioConfig& c) { return c.trace.synthetic || !c.trace.path.empty(); }

BlockTrace scenario_trace(const ScenarioConfig& c) {
  if (!c.trace.path.empty()) return load_trace(c.trace.path, c.n_validators);
  return parse_trace(generate_synthetic_trace(c.trace, c.n_validators), c.n_validators);
}

// Runs f(k) for k in [0, n) on up to `workers` threads, rethrowing the first
// failure by trial order.
template <typename F>
void parallel_for(std::uint32_t n, std::uint32_t workers, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  const std::uint32_t threads = std::max<std::uint32_t>(1, std::min(workers, n));
  if (threads <= 1) {
    for (std::uint32_t k = 0; k < n; ++k) f(k);
    return;
  }
  std::atomic<std::uint32_t> next{0};
  std::vector<std::thread> pool;
  for (std::uint32_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::uint32_t k = next++; k < n; k = next++) {
        try {
          f(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string trials_csv(const std::vector<PairedTrial>& trials) {
  std::ostringstream o;
  const auto cols = trial_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) o << (i ? "," : "") << cols[i];
  o << "\n";
  for (const PairedTrial& t : trials) {
    const auto row = trial_row(t);
    for (std::size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << csv_cell(row[i]);
    o << "\n";
  }
  return o.str();
}

std::map<std::string, Aggregate> summarize(const std::vector<PairedTrial>& trials) {
  std::map<std::string, Aggregate> out;
  const auto cols = trial_columns();
  for (std::size_t c = 2; c < cols.size(); ++c) {
    std::vector<std::optional<double>> column;
    for (const PairedTrial& t : trials) column.push_back(trial_row(t)[c]);
    out[cols[c]] = aggregate(column);
  }
  return out;
}

std::string summary_json(const ScenarioOutput& s) {
  nlohmann::json j;
  j["scenario"] = s.config.name;
  j["trials"] = s.trials.size();
  j["dollars_per_unit"] = s.config.dollars_per_unit;
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [k, a] : s.summary) metrics[k] = aggregate_json(a);
  j["metrics"] = metrics;
  auto it = s.summary.find("loss_averted");
  if (it != s.summary.end() && it->second.mean) {
    j["loss_averted_dollars"] = *it->second.mean * s.config.dollars_per_unit;
  }
  return j.dump(2) + "\n";
}

std::string ic_json(const IcReport& r) {
  nlohmann::json j;
  j["honest_payoff"] = r.honest_payoff;
  j["deviating_payoff"] = r.deviating_payoff;
  j["deviation_favorable"] = r.deviation_favorable;
  j["consistent"] = r.consistent;
  j["holds"] = r.check.holds;
  j["margin"] = r.check.margin;
  j["future_loss"] = future_loss(r.measured);
  j["measured"] = {{"discount", r.measured.discount},
                   {"immediate_penalty", r.measured.immediate_penalty},
                   {"slash_factor", r.measured.slash_factor},
                   {"expected_honest_reward", r.measured.expected_honest_reward},
                   {"deviation_gain", r.measured.deviation_gain}};
  j["trials"] = nlohmann::json::array();
  for (const IcTrial& t : r.trials) {
    j["trials"].push_back({{"seed", t.seed},
                           {"honest_payoff", t.honest_payoff},
                           {"deviating_payoff", t.deviating_payoff},
                           {"max_round_gain", t.max_round_gain},
                           {"mean_honest_reward", t.mean_honest_reward}});
  }
  return j.dump(2) + "\n";
}

// Per-trial FAR of both protocols, read straight from trials.csv.
std::string plot_script() {
  const auto cols = trial_columns();
  auto column = [&](const std::string& name) {
    return std::to_string(std::find(cols.begin(), cols.end(), name) - cols.begin() + 1);
  };
  return "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'trial'\n"
         "set ylabel 'fraud acceptance rate'\n"
         "set yrange [0:1]\n"
         "plot 'trials.csv' using 1:" + column("pob_far") + " with linespoints, \\\n"
         "     'trials.csv' using 1:" + column("pos_far") + " with linespoints\n";
}

std::string pad(std::uint64_t v, int width) {
  std::string s = std::to_string(v);
  return std::string(s.size() < static_cast<std::size_t>(width) ? width - s.size() : 0, '0') + s;
}

ScenarioOutput run_with_trace(const ScenarioConfig& input, const RunOptions& options,
                              const BlockTrace* trace) {
  ScenarioConfig config = input;
  if (options.trials) config.trials = *options.trials;
  if (options.seed) config.seed = *options.seed;
  config.validate();

  ScenarioOutput out;
  out.config = config;
  const bool run_pob = config.protocol == Protocol::kPob || config.compare_pos;
  const bool run_pos = config.protocol == Protocol::kPos || config.compare_pos;
  out.trials.resize(config.trials);
  std::vector<std::vector<OutputFile>> ledger_files(config.trials);

  parallel_for(config.trials, options.workers, [&](std::uint32_t k) {
    PairedTrial& t = out.trials[k];
    t.index = k;
    t.seed = trial_seed(config.seed, k);
    auto simulate = [&](Protocol p) {
      return trace != nullptr ? replay_trace(*trace, config, t.seed, p)
                              : run_trial(config, t.seed, p);
    };
    std::optional<TrialResult> pob_r;
    std::optional<TrialResult> pos_r;
    if (run_pob) pob_r = simulate(Protocol::kPob);
    if (run_pos) pos_r = simulate(Protocol::kPos);
    if (pob_r) t.pob = compute_metrics(*pob_r, config);
    if (pos_r) t.pos = compute_metrics(*pos_r, config);
    if (pob_r && pos_r) {
      t.loss_averted = loss_averted(*pob_r, *pos_r, config.detection_window);
      if (t.pob->mean_latency_ms && t.pos->mean_latency_ms && *t.pos->mean_latency_ms > 0.0) {
        t.latency_overhead = *t.pob->mean_latency_ms / *t.pos->mean_latency_ms - 1.0;
      }
    }
    if (options.keep_ledgers) {
      for (const auto* r : {&pob_r, &pos_r}) {
        if (!*r) continue;
        const std::string dir = "ledgers/trial-" + pad(k, 3) + "/" +
                                std::string(to_string((*r)->protocol)) + "/";
        for (const EpochLedger& l : (*r)->ledgers) {
          ledger_files[k].push_back({dir + "epoch-" + pad(l.epoch, 4) + ".json",
                                     ledger_to_json(l)});
        }
      }
    }
    if (options.keep_results) {
      t.pob_result = std::move(pob_r);
      t.pos_result = std::move(pos_r);
    }
  });

  out.summary = summarize(out.trials);
  out.files.push_back({"config.echo", echo_config(config)});
  out.files.push_back({"trials.csv", trials_csv(out.trials)});
  out.files.push_back({"summary.json", summary_json(out)});
  out.files.push_back({"plot.gp", plot_script()});
  for (auto& files : ledger_files) {
    for (auto& f : files) out.files.push_back(std::move(f));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const Preset& p : presets()) v.push_back(p.name);
    return v;
  }();
  return names;
}

const std::string& preset_source(std::string_view name) {
  for (const Preset& p : presets()) {
    if (p.name == name) return p.source;
  }
  fail(ErrorCode::kNotFound, "unknown preset '" + std::string(name) + "'");
}

ScenarioConfig builtin_preset(std::string_view name) { return parse_config(preset_source(name)); }

std::uint64_t trial_seed(std::uint64_t root, std::uint32_t k) {
  return derive_seed(root, "trial", k);
}

std::vector<std::string> trial_columns() {
  std::vector<std::string> cols = {"trial", "seed"};
  for (const char* prefix : {"pob_", "pos_"}) {
    for (const std::string& m : metric_names()) cols.push_back(prefix + m);
  }
  cols.push_back("loss_averted");
  cols.push_back("latency_overhead");
  return cols;
}

std::vector<std::optional<double>> trial_row(const PairedTrial& t) {
  std::vector<std::optional<double>> row = {static_cast<double>(t.index),
                                            static_cast<double>(t.seed)};
  for (const auto* m : {&t.pob, &t.pos}) {
    if (*m) {
      for (const auto& v : metric_values(**m)) row.push_back(v);
    } else {
      row.resize(row.size() + metric_names().size());
    }
  }
  row.push_back(t.loss_averted);
  row.push_back(t.latency_overhead);
  return row;
}

ScenarioOutput run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  if (is_traced(config)) {
    const BlockTrace trace = scenario_trace(config);
    return run_with_trace(config, options, &trace);
  }
  return run_with_trace(config, options, nullptr);
}

SweepOutput run_sweep(const ScenarioConfig& config, const RunOptions& options) {
  if (config.sweep.empty()) fail(ErrorCode::kConfig, "sweep: no axes configured");
  ScenarioConfig base = config;
  base.sweep.clear();

  std::vector<std::vector<std::pair<std::string, std::string>>> grid{{}};
  for (const SweepAxis& axis : config.sweep) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& partial : grid) {
      for (const std::string& v : axis.values) {
        auto a = partial;
        a.emplace_back(axis.path, v);
        next.push_back(std::move(a));
      }
    }
    grid = std::move(next);
  }

  SweepOutput out;
  std::ostringstream csv;
  for (const SweepAxis& axis : config.sweep) csv << csv_text(axis.path) << ",";
  const auto cols = trial_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
  csv << "\n";
  nlohmann::json summary = nlohmann::json::array();

  for (std::size_t p = 0; p < grid.size(); ++p) {
    ScenarioConfig point = base;
    for (const auto& [path, value] : grid[p]) point = with_override(point, path, value);
    SweepPoint sp;
    sp.assignment = grid[p];
    sp.output = run_scenario(point, options);
    for (const PairedTrial& t : sp.output.trials) {
      for (const auto& [path, value] : grid[p]) csv << csv_text(value) << ",";
      const auto row = trial_row(t);
      for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << csv_cell(row[i]);
      csv << "\n";
    }
    nlohmann::json entry;
    for (const auto& [path, value] : grid[p]) entry["assignment"][path] = value;
    for (const auto& [k, a] : sp.output.summary) entry["metrics"][k] = aggregate_json(a);
    summary.push_back(entry);
    const std::string dir = "points/point-" + pad(p, 3) + "/";
    for (const OutputFile& f : sp.output.files) out.files.push_back({dir + f.name, f.content});
    out.points.push_back(std::move(sp));
  }
  out.files.insert(out.files.begin(), {"sweep_summary.json", summary.dump(2) + "\n"});
  out.files.insert(out.files.begin(), {"sweep.csv", csv.str()});
  out.files.insert(out.files.begin(), {"config.echo", echo_config(config)});
  return out;
}

ScenarioOutput run_ic_check(const ScenarioConfig& input, const RunOptions& options) {
  ScenarioConfig config = input;
  if (options.trials) config.trials = *options.trials;
  if (options.seed) config.seed = *options.seed;
  config.validate();
  ScenarioOutput out;
  out.config = config;
  out.ic = empirical_ic(config);
  out.files.push_back({"config.echo", echo_config(config)});
  out.files.push_back({"ic.json", ic_json(*out.ic)});
  return out;
}

ScenarioOutput run_replay(const std::string& trace_path, const ScenarioConfig& config,
                          const RunOptions& options) {
  ScenarioConfig c = config;
  c.trace.path = trace_path;
  c.trace.synthetic = false;
  const BlockTrace trace = load_trace(trace_path, c.n_validators);
  return run_with_trace(c, options, &trace);
}

void write_outputs(const std::vector<OutputFile>& files, const std::string& dir) {
  namespace fs = std::filesystem;
  try {
    for (const OutputFile& f : files) {
      const fs::path path = fs::path(dir) / f.name;
      fs::create_directories(path.parent_path());
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
      out << f.content;
      if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
    }
  } catch (const fs::filesystem_error& e) {
    fail(ErrorCode::kIo, e.what());
  }
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

}  // namespace pob
