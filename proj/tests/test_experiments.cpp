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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pobsim/experiments.hpp"

using namespace pob;

namespace {

const std::string& file(const std::vector<OutputFile>& files, const std::string& name) {
  for (const OutputFile& f : files) {
    if (f.name == name) return f.content;
  }
  FAIL("missing output " << name);
  static const std::string empty;
  return empty;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

ScenarioConfig quick(const std::string& preset, std::uint32_t epochs = 40) {
  ScenarioConfig c = builtin_preset(preset);
  c.epochs = epochs;
  c.trials = 3;
  return c;
}

}  // namespace

TEST_CASE("ten presets") {
  CHECK(preset_names().size() == 10);
  for (const char* n : {"case-a-stealth", "case-a-sybil", "case-b-fairness-100",
                        "case-b-fairness-1000", "case-c-replay", "case-d-adaptive-sybil",
                        "case-d-long-range", "case-d-griefing", "case-e-sweep", "ic-check"}) {
    CAPTURE(n);
    CHECK(std::find(preset_names().begin(), preset_names().end(), n) != preset_names().end());
    CHECK(builtin_preset(n).name == n);
  }
  CHECK_THROWS_AS(builtin_preset("case-z"), Error);
}

TEST_CASE("trial seeds are derived from the root") {
  CHECK(trial_seed(1, 0) == trial_seed(1, 0));
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
}

TEST_CASE("identical runs produce identical files") {
  const ScenarioConfig c = quick("case-a-stealth");
  const ScenarioOutput a = run_scenario(c);
  const ScenarioOutput b = run_scenario(c);
  CHECK(file(a.files, "trials.csv") == file(b.files, "trials.csv"));
  CHECK(file(a.files, "summary.json") == file(b.files, "summary.json"));
  CHECK(lines(file(a.files, "trials.csv")) == 4);
}

TEST_CASE("parallel and serial runs agree") {
  const ScenarioConfig c = quick("case-a-sybil");
  RunOptions serial;
  RunOptions parallel;
  parallel.workers = 3;
  parallel.keep_ledgers = true;
  serial.keep_ledgers = true;
  const ScenarioOutput a = run_scenario(c, serial);
  const ScenarioOutput b = run_scenario(c, parallel);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].name == b.files[i].name);
    CHECK(a.files[i].content == b.files[i].content);
  }
}

TEST_CASE("a single trial has no confidence interval") {
  RunOptions o;
  o.trials = 1;
  const ScenarioOutput out = run_scenario(quick("case-d-griefing"), o);
  CHECK(out.trials.size() == 1);
  CHECK(lines(file(out.files, "trials.csv")) == 2);
  const auto j = nlohmann::json::parse(file(out.files, "summary.json"));
  CHECK(j["metrics"]["pob_proposer_gini"]["ci_half_width"].is_null());
  CHECK(j["metrics"]["pob_proposer_gini"]["n"] == 1);
}

TEST_CASE("headers are stable across presets") {
  const std::string header = first_line(file(run_scenario(quick("case-d-griefing", 5)).files, "trials.csv"));
  CHECK(first_line(file(run_scenario(quick("case-a-stealth", 5)).files, "trials.csv")) == header);
  std::string expected;
  for (const std::string& col : trial_columns()) expected += (expected.empty() ? "" : ",") + col;
  CHECK(header == expected);
}

TEST_CASE("outputs include the echo and optional ledgers") {
  ScenarioConfig c = quick("case-a-stealth", 4);
  RunOptions o;
  o.trials = 2;
  o.keep_ledgers = true;
  const ScenarioOutput out = run_scenario(c, o);
  CHECK(parse_config(file(out.files, "config.echo")) == out.config);
  CHECK_FALSE(file(out.files, "ledgers/trial-001/pos/epoch-0003.json").empty());
  CHECK_FALSE(file(out.files, "plot.gp").empty());

  const auto dir = std::filesystem::temp_directory_path() / "pobsim-test-out";
  std::filesystem::remove_all(dir);
  write_outputs(out.files, dir.string());
  CHECK(std::filesystem::exists(dir / "ledgers/trial-000/pob/epoch-0000.json"));
  std::ifstream in(dir / "trials.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == file(out.files, "trials.csv"));
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(write_outputs(out.files, "/proc/pobsim-no-such-dir"), Error);
}

TEST_CASE("single-point sweep matches a plain run") {
  ScenarioConfig c = quick("case-a-stealth");
  c.sweep = {{"rho", {"0.9"}}};
  const SweepOutput s = run_sweep(c);
  REQUIRE(s.points.size() == 1);
  ScenarioConfig plain = c;
  plain.sweep.clear();
  const ScenarioOutput r = run_scenario(plain);
  CHECK(file(s.points[0].output.files, "trials.csv") == file(r.files, "trials.csv"));
}

TEST_CASE("sweeps form the cartesian product") {
  ScenarioConfig c = quick("case-e-sweep", 60);
  c.trials = 2;
  const SweepOutput s = run_sweep(c);
  CHECK(s.points.size() == 18);
  CHECK(s.points.front().assignment[0] == std::make_pair(std::string("penalty.base_coefficient"), std::string("1.0")));
  CHECK(s.points.back().assignment[2] == std::make_pair(std::string("rho"), std::string("0.99")));
  const std::string& csv = file(s.files, "sweep.csv");
  CHECK(first_line(csv).rfind("penalty.base_coefficient,watchdog.theta,rho,trial,seed,", 0) == 0);
  CHECK(lines(csv) == 1 + 18 * 2);
  ScenarioConfig none = c;
  none.sweep.clear();
  CHECK_THROWS_AS(run_sweep(none), Error);
}

TEST_CASE("paired trials compare latency and loss") {
  const ScenarioOutput out = run_scenario(quick("case-a-stealth", 60));
  for (const PairedTrial& t : out.trials) {
    REQUIRE(t.pob);
    REQUIRE(t.pos);
    REQUIRE(t.loss_averted);
    CHECK(*t.loss_averted == doctest::Approx(t.pos->loss - t.pob->loss));
    REQUIRE(t.latency_overhead);
  }
}

TEST_CASE("replay runs from a trace file") {
  const ScenarioConfig c = builtin_preset("case-c-replay");
  RunOptions o;
  o.trials = 1;
  const ScenarioOutput a = run_replay(std::string(POBSIM_SOURCE_DIR) + "/data/case_c_trace.csv", c, o);
  const ScenarioOutput b = run_scenario(c, o);
  CHECK(file(a.files, "trials.csv") == file(b.files, "trials.csv"));
  CHECK_THROWS_AS(run_replay("/nonexistent/trace.csv", c, o), Error);
}

TEST_CASE("ic check writes its report") {
  ScenarioConfig c = builtin_preset("ic-check");
  c.epochs = 60;
  c.trials = 2;
  const ScenarioOutput out = run_ic_check(c);
  REQUIRE(out.ic);
  const auto j = nlohmann::json::parse(file(out.files, "ic.json"));
  CHECK(j["trials"].size() == 2);
  CHECK(j.contains("future_loss"));
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
