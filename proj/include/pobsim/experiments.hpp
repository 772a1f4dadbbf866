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

// Monte-Carlo runner, sweeps and the preset scenario library.

#ifndef POBSIM_EXPERIMENTS_HPP_
#define POBSIM_EXPERIMENTS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pobsim/config.hpp"
#include "pobsim/incentive.hpp"
#include "pobsim/metrics.hpp"
#include "pobsim/netsim.hpp"

namespace pob {

const std::vector<std::string>& preset_names();
// YAML source of a preset. Throws kNotFound for unknown names.
const std::string& preset_source(std::string_view name);
ScenarioConfig builtin_preset(std::string_view name);

// Seed of trial k under a root seed. Both protocols of a pair share it.
std::uint64_t trial_seed(std::uint64_t root, std::uint32_t k);

struct RunOptions {
  std::optional<std::uint32_t> trials;
  std::optional<std::uint64_t> seed;
  std::uint32_t workers = 1;
  bool keep_ledgers = false;  // serialize ledgers into the output
  bool keep_results = false;  // keep full TrialResults in memory
};

struct PairedTrial {
  std::uint32_t index = 0;
  std::uint64_t seed = 0;
  std::optional<TrialMetrics> pob;
  std::optional<TrialMetrics> pos;
  std::optional<double> loss_averted;
  std::optional<double> latency_overhead;  // mean PoB latency / PoS - 1
  std::optional<TrialResult> pob_result;   // only with keep_results
  std::optional<TrialResult> pos_result;
};

struct OutputFile {
  std::string name;  // relative path, e.g. "trials.csv"
  std::string content;
};

struct ScenarioOutput {
  ScenarioConfig config;
  std::vector<PairedTrial> trials;
  std::map<std::string, Aggregate> summary;  // keyed by trials.csv column
  std::optional<IcReport> ic;
  std::vector<OutputFile> files;
};

// Runs every trial of the scenario. Trials may run on several workers; the
// results are ordered by trial index either way.
ScenarioOutput run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

struct SweepPoint {
  std::vector<std::pair<std::string, std::string>> assignment;
  ScenarioOutput output;
};

struct SweepOutput {
  std::vector<SweepPoint> points;
  std::vector<OutputFile> files;
};

// Cartesian product over config.sweep, first axis slowest.
SweepOutput run_sweep(const ScenarioConfig& config, const RunOptions& options = {});

ScenarioOutput run_ic_check(const ScenarioConfig& config, const RunOptions& options = {});

// Replays a trace file under the config.
ScenarioOutput run_replay(const std::string& trace_path, const ScenarioConfig& config,
                          const RunOptions& options = {});

// Column header and rows of trials.csv.
std::vector<std::string> trial_columns();
std::vector<std::optional<double>> trial_row(const PairedTrial& trial);

// Writes every file under `dir`, creating directories as needed.
void write_outputs(const std::vector<OutputFile>& files, const std::string& dir);

// Shortest round-trip decimal.
std::string format_double(double value);

}  // namespace pob

#endif  // POBSIM_EXPERIMENTS_HPP_
