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


// Command-line front end. Talks to the simulator only through the C API.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pobsim/pobsim.h"

namespace {

struct ConfigDeleter {
  void operator()(pobsim_config* c) const { pobsim_config_free(c); }
};
struct OutputDeleter {
  void operator()(pobsim_output* o) const { pobsim_output_free(o); }
};
using ConfigPtr = std::unique_ptr<pobsim_config, ConfigDeleter>;
using OutputPtr = std::unique_ptr<pobsim_output, OutputDeleter>;

class Failure {
 public:
  explicit Failure(pobsim_status s) : status(s) {}
  pobsim_status status;
};

void check(pobsim_status s) {
  if (s != POBSIM_OK) throw Failure(s);
}

struct Flags {
  std::string out;
  long long trials = 0;
  long long seed = -1;
  unsigned workers = 1;
  bool ledgers = false;
  std::vector<std::string> overrides;
};

std::string default_out_dir() {
  const char* env = std::getenv("POBSIM_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "pobsim-out";
}

// A config argument names a file when one exists there, otherwise a preset.
ConfigPtr load(const std::string& spec, const std::vector<std::string>& overrides) {
  pobsim_config* raw = nullptr;
  if (std::filesystem::exists(spec)) {
    check(pobsim_config_load(spec.c_str(), &raw));
  } else {
    check(pobsim_config_preset(spec.c_str(), &raw));
  }
  ConfigPtr config(raw);
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "error: --set expects PATH=VALUE, got '" << o << "'\n";
      throw Failure(POBSIM_CONFIG_ERROR);
    }
    check(pobsim_config_override(config.get(), o.substr(0, eq).c_str(),
                                 o.substr(eq + 1).c_str()));
  }
  return config;
}

pobsim_run_options options_of(const Flags& f) {
  pobsim_run_options o;
  pobsim_run_options_init(&o);
  o.trials = f.trials;
  o.seed = f.seed;
  o.workers = f.workers;
  o.keep_ledgers = f.ledgers ? 1 : 0;
  return o;
}

void finish(OutputPtr output, const Flags& f) {
  const std::string dir = f.out.empty() ? default_out_dir() : f.out;
  check(pobsim_output_write(output.get(), dir.c_str()));
  const size_t n = pobsim_output_file_count(output.get());
  std::cout << "wrote " << n << " file" << (n == 1 ? "" : "s") << " to " << dir << "\n";
  for (const char* column : {"pob_far", "pos_far", "loss_averted"}) {
    double mean = 0.0;
    if (pobsim_output_summary_mean(output.get(), column, &mean) == POBSIM_OK) {
      std::cout << "  " << column << " mean " << mean << "\n";
    }
  }
}

enum class Mode { kRun, kSweep, kIc };

void execute(Mode mode, const pobsim_config* config, const Flags& f) {
  const pobsim_run_options o = options_of(f);
  pobsim_output* raw = nullptr;
  switch (mode) {
    case Mode::kRun: check(pobsim_run(config, &o, &raw)); break;
    case Mode::kSweep: check(pobsim_sweep(config, &o, &raw)); break;
    case Mode::kIc: check(pobsim_ic_check(config, &o, &raw)); break;
  }
  finish(OutputPtr(raw), f);
}

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out, "Output directory (default: $POBSIM_OUT_DIR or pobsim-out)");
  cmd->add_option("--trials", f.trials, "Override the trial count")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Override the root seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--ledgers", f.ledgers, "Write per-epoch ledgers");
  cmd->add_option("--set", f.overrides, "Override a config field, PATH=VALUE");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behaviour-weighted consensus simulator"};
  app.require_subcommand(1);

  Flags flags;
  std::string config_arg;
  std::string trace_arg;
  std::string name_arg;
  std::string out_file;

  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("config", config_arg, "Config file or preset name")->required();
  add_run_flags(run, flags);

  auto* preset = app.add_subcommand("preset", "Run a built-in preset");
  preset->add_option("name", name_arg)->required();
  add_run_flags(preset, flags);

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("config", config_arg, "Config file or preset name")->required();
  add_run_flags(sweep, flags);

  auto* ic = app.add_subcommand("ic-check", "Empirical incentive-compatibility check");
  ic->add_option("config", config_arg, "Config file or preset name")->required();
  add_run_flags(ic, flags);

  auto* replay = app.add_subcommand("replay", "Replay a block trace");
  replay->add_option("trace", trace_arg)->required()->check(CLI::ExistingFile);
  replay->add_option("config", config_arg, "Config file or preset name")->required();
  add_run_flags(replay, flags);

  auto* list = app.add_subcommand("list-presets", "List built-in presets");

  auto* echo = app.add_subcommand("echo-preset", "Print the effective config of a preset");
  echo->add_option("name", name_arg)->required();

  auto* gen = app.add_subcommand("gen-trace", "Write the synthetic trace of a config");
  gen->add_option("config", config_arg, "Config file or preset name")->required();
  gen->add_option("--out", out_file, "Output file (default: stdout)");
  gen->add_option("--set", flags.overrides, "Override a config field, PATH=VALUE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (list->parsed()) {
      for (size_t i = 0; i < pobsim_preset_count(); ++i) {
        std::cout << pobsim_preset_name(i) << "\n";
      }
    } else if (echo->parsed()) {
      ConfigPtr c = load(name_arg, {});
      char* text = nullptr;
      check(pobsim_config_echo(c.get(), &text));
      std::cout << text;
      pobsim_string_free(text);
    } else if (gen->parsed()) {
      ConfigPtr c = load(config_arg, flags.overrides);
      char* text = nullptr;
      check(pobsim_generate_trace(c.get(), &text));
      std::unique_ptr<char, void (*)(char*)> guard(text, pobsim_string_free);
      if (out_file.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out_file, std::ios::binary | std::ios::trunc);
        f << text;
        if (!f) {
          std::cerr << "error: cannot write '" << out_file << "'\n";
          return 2;
        }
      }
    } else if (run->parsed()) {
      execute(Mode::kRun, load(config_arg, flags.overrides).get(), flags);
    } else if (sweep->parsed()) {
      execute(Mode::kSweep, load(config_arg, flags.overrides).get(), flags);
    } else if (ic->parsed()) {
      execute(Mode::kIc, load(config_arg, flags.overrides).get(), flags);
    } else if (preset->parsed()) {
      ConfigPtr c = load(name_arg, flags.overrides);
      Mode mode = Mode::kRun;
      if (name_arg == "ic-check") mode = Mode::kIc;
      if (pobsim_config_sweep_axes(c.get()) > 0) mode = Mode::kSweep;
      execute(mode, c.get(), flags);
    } else if (replay->parsed()) {
      ConfigPtr c = load(config_arg, flags.overrides);
      const pobsim_run_options o = options_of(flags);
      pobsim_output* raw = nullptr;
      check(pobsim_replay(trace_arg.c_str(), c.get(), &o, &raw));
      finish(OutputPtr(raw), flags);
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << pobsim_status_name(f.status) << "): " << pobsim_last_error()
              << "\n";
    return pobsim_exit_code(f.status);
  }
  return 0;
}
