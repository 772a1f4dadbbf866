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


#include "pobsim/pobsim.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "pobsim/config.hpp"
#include "pobsim/experiments.hpp"
#include "pobsim/netsim.hpp"

struct pobsim_config {
  pob::ScenarioConfig value;
};

struct pobsim_output {
  std::vector<pob::OutputFile> files;
  std::map<std::string, pob::Aggregate> summary;
};

namespace {

thread_local std::string last_error;

pobsim_status status_of(pob::ErrorCode code) {
  switch (code) {
    case pob::ErrorCode::kInvalidInput: return POBSIM_INVALID_INPUT;
    case pob::ErrorCode::kNotFound: return POBSIM_NOT_FOUND;
    case pob::ErrorCode::kDegenerateElection: return POBSIM_DEGENERATE_ELECTION;
    case pob::ErrorCode::kInsufficientPool: return POBSIM_INSUFFICIENT_POOL;
    case pob::ErrorCode::kParse: return POBSIM_PARSE_ERROR;
    case pob::ErrorCode::kConfig: return POBSIM_CONFIG_ERROR;
    case pob::ErrorCode::kIo: return POBSIM_IO_ERROR;
    case pob::ErrorCode::kRuntime: return POBSIM_RUNTIME_ERROR;
  }
  return POBSIM_RUNTIME_ERROR;
}

template <typename F>
pobsim_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return POBSIM_OK;
  } catch (const pob::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return POBSIM_RUNTIME_ERROR;
}

pobsim_status null_argument(const char* name) {
  last_error = std::string("argument '") + name + "' is null";
  return POBSIM_INVALID_INPUT;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pob::RunOptions to_options(const pobsim_run_options* o) {
  pob::RunOptions r;
  if (o == nullptr) return r;
  if (o->trials > 0) r.trials = static_cast<std::uint32_t>(o->trials);
  if (o->seed >= 0) r.seed = static_cast<std::uint64_t>(o->seed);
  r.workers = o->workers == 0 ? 1 : o->workers;
  r.keep_ledgers = o->keep_ledgers != 0;
  return r;
}

pobsim_output* wrap(pob::ScenarioOutput&& s) {
  auto* out = new pobsim_output;
  out->files = std::move(s.files);
  out->summary = std::move(s.summary);
  return out;
}

}  // namespace

extern "C" {

void pobsim_run_options_init(pobsim_run_options* options) {
  if (options == nullptr) return;
  options->trials = 0;
  options->seed = -1;
  options->workers = 1;
  options->keep_ledgers = 0;
}

const char* pobsim_last_error(void) { return last_error.c_str(); }

const char* pobsim_status_name(pobsim_status status) {
  switch (status) {
    case POBSIM_OK: return "ok";
    case POBSIM_INVALID_INPUT: return "invalid_input";
    case POBSIM_NOT_FOUND: return "not_found";
    case POBSIM_DEGENERATE_ELECTION: return "degenerate_election";
    case POBSIM_INSUFFICIENT_POOL: return "insufficient_pool";
    case POBSIM_PARSE_ERROR: return "parse_error";
    case POBSIM_CONFIG_ERROR: return "config_error";
    case POBSIM_IO_ERROR: return "io_error";
    case POBSIM_RUNTIME_ERROR: return "runtime_error";
  }
  return "unknown";
}

int pobsim_exit_code(pobsim_status status) {
  if (status == POBSIM_OK) return 0;
  if (status == POBSIM_PARSE_ERROR || status == POBSIM_CONFIG_ERROR) return 1;
  return 2;
}

void pobsim_string_free(char* text) { delete[] text; }

size_t pobsim_preset_count(void) { return pob::preset_names().size(); }

const char* pobsim_preset_name(size_t index) {
  const auto& names = pob::preset_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

pobsim_status pobsim_preset_source(const char* name, char** out_text) {
  if (name == nullptr) return null_argument("name");
  if (out_text == nullptr) return null_argument("out_text");
  return guarded([&] { *out_text = copy_string(pob::preset_source(name)); });
}

pobsim_status pobsim_config_load(const char* path, pobsim_config** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = new pobsim_config{pob::load_config(path)}; });
}

pobsim_status pobsim_config_parse(const char* text, pobsim_config** out) {
  if (text == nullptr) return null_argument("text");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = new pobsim_config{pob::parse_config(text)}; });
}

pobsim_status pobsim_config_preset(const char* name, pobsim_config** out) {
  if (name == nullptr) return null_argument("name");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = new pobsim_config{pob::builtin_preset(name)}; });
}

pobsim_status pobsim_config_override(pobsim_config* config, const char* path,
                                     const char* value) {
  if (config == nullptr) return null_argument("config");
  if (path == nullptr) return null_argument("path");
  if (value == nullptr) return null_argument("value");
  return guarded([&] { config->value = pob::with_override(config->value, path, value); });
}

pobsim_status pobsim_config_echo(const pobsim_config* config, char** out_text) {
  if (config == nullptr) return null_argument("config");
  if (out_text == nullptr) return null_argument("out_text");
  return guarded([&] { *out_text = copy_string(pob::echo_config(config->value)); });
}

size_t pobsim_config_sweep_axes(const pobsim_config* config) {
  return config == nullptr ? 0 : config->value.sweep.size();
}

void pobsim_config_free(pobsim_config* config) { delete config; }

pobsim_status pobsim_generate_trace(const pobsim_config* config, char** out_text) {
  if (config == nullptr) return null_argument("config");
  if (out_text == nullptr) return null_argument("out_text");
  return guarded([&] {
    *out_text = copy_string(
        pob::generate_synthetic_trace(config->value.trace, config->value.n_validators));
  });
}

pobsim_status pobsim_run(const pobsim_config* config, const pobsim_run_options* options,
                         pobsim_output** out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = wrap(pob::run_scenario(config->value, to_options(options))); });
}

pobsim_status pobsim_sweep(const pobsim_config* config, const pobsim_run_options* options,
                           pobsim_output** out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    pob::SweepOutput s = pob::run_sweep(config->value, to_options(options));
    auto* o = new pobsim_output;
    o->files = std::move(s.files);
    *out = o;
  });
}

pobsim_status pobsim_ic_check(const pobsim_config* config, const pobsim_run_options* options,
                              pobsim_output** out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = wrap(pob::run_ic_check(config->value, to_options(options))); });
}

pobsim_status pobsim_replay(const char* trace_path, const pobsim_config* config,
                            const pobsim_run_options* options, pobsim_output** out) {
  if (trace_path == nullptr) return null_argument("trace_path");
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = wrap(pob::run_replay(trace_path, config->value, to_options(options)));
  });
}

size_t pobsim_output_file_count(const pobsim_output* output) {
  return output == nullptr ? 0 : output->files.size();
}

const char* pobsim_output_file_name(const pobsim_output* output, size_t index) {
  if (output == nullptr || index >= output->files.size()) return nullptr;
  return output->files[index].name.c_str();
}

const char* pobsim_output_file_content(const pobsim_output* output, size_t index,
                                       size_t* length) {
  if (output == nullptr || index >= output->files.size()) return nullptr;
  if (length != nullptr) *length = output->files[index].content.size();
  return output->files[index].content.c_str();
}

pobsim_status pobsim_output_summary_mean(const pobsim_output* output, const char* column,
                                         double* mean) {
  if (output == nullptr) return null_argument("output");
  if (column == nullptr) return null_argument("column");
  if (mean == nullptr) return null_argument("mean");
  auto it = output->summary.find(column);
  if (it == output->summary.end() || !it->second.mean) {
    last_error = std::string("no defined summary value for '") + column + "'";
    return POBSIM_NOT_FOUND;
  }
  *mean = *it->second.mean;
  last_error.clear();
  return POBSIM_OK;
}

pobsim_status pobsim_output_write(const pobsim_output* output, const char* dir) {
  if (output == nullptr) return null_argument("output");
  if (dir == nullptr) return null_argument("dir");
  return guarded([&] { pob::write_outputs(output->files, dir); });
}

void pobsim_output_free(pobsim_output* output) { delete output; }

}  // extern "C"
