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


// C interface to the simulator. Every call returns a pobsim_status; on
// failure pobsim_last_error() describes the problem for the calling thread.
// Strings handed out by the library are released with pobsim_string_free.

#ifndef POBSIM_POBSIM_H_
#define POBSIM_POBSIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define POBSIM_API __declspec(dllexport)
#else
#define POBSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pobsim_status {
  POBSIM_OK = 0,
  POBSIM_INVALID_INPUT = 1,
  POBSIM_NOT_FOUND = 2,
  POBSIM_DEGENERATE_ELECTION = 3,
  POBSIM_INSUFFICIENT_POOL = 4,
  POBSIM_PARSE_ERROR = 5,
  POBSIM_CONFIG_ERROR = 6,
  POBSIM_IO_ERROR = 7,
  POBSIM_RUNTIME_ERROR = 8,
} pobsim_status;

typedef struct pobsim_config pobsim_config;
typedef struct pobsim_output pobsim_output;

typedef struct pobsim_run_options {
  int64_t trials;  // <= 0 keeps the configured count
  int64_t seed;    // < 0 keeps the configured seed
  uint32_t workers;
  int keep_ledgers;
} pobsim_run_options;

POBSIM_API void pobsim_run_options_init(pobsim_run_options* options);

// Message for the most recent failure on this thread; "" after success.
POBSIM_API const char* pobsim_last_error(void);
POBSIM_API const char* pobsim_status_name(pobsim_status status);
// 0 for success, 1 for parse and configuration errors, 2 otherwise.
POBSIM_API int pobsim_exit_code(pobsim_status status);
POBSIM_API void pobsim_string_free(char* text);

POBSIM_API size_t pobsim_preset_count(void);
POBSIM_API const char* pobsim_preset_name(size_t index);  // NULL when out of range
POBSIM_API pobsim_status pobsim_preset_source(const char* name, char** out_text);

POBSIM_API pobsim_status pobsim_config_load(const char* path, pobsim_config** out);
POBSIM_API pobsim_status pobsim_config_parse(const char* text, pobsim_config** out);
POBSIM_API pobsim_status pobsim_config_preset(const char* name, pobsim_config** out);
POBSIM_API pobsim_status pobsim_config_override(pobsim_config* config, const char* path,
                                                const char* value);
POBSIM_API pobsim_status pobsim_config_echo(const pobsim_config* config, char** out_text);
// Number of sweep axes configured; 0 for a plain scenario.
POBSIM_API size_t pobsim_config_sweep_axes(const pobsim_config* config);
POBSIM_API void pobsim_config_free(pobsim_config* config);

// Synthetic replay trace described by the config's trace section.
POBSIM_API pobsim_status pobsim_generate_trace(const pobsim_config* config, char** out_text);

POBSIM_API pobsim_status pobsim_run(const pobsim_config* config,
                                    const pobsim_run_options* options, pobsim_output** out);
POBSIM_API pobsim_status pobsim_sweep(const pobsim_config* config,
                                      const pobsim_run_options* options, pobsim_output** out);
POBSIM_API pobsim_status pobsim_ic_check(const pobsim_config* config,
                                         const pobsim_run_options* options, pobsim_output** out);
POBSIM_API pobsim_status pobsim_replay(const char* trace_path, const pobsim_config* config,
                                       const pobsim_run_options* options, pobsim_output** out);

POBSIM_API size_t pobsim_output_file_count(const pobsim_output* output);
POBSIM_API const char* pobsim_output_file_name(const pobsim_output* output, size_t index);
POBSIM_API const char* pobsim_output_file_content(const pobsim_output* output, size_t index,
                                                  size_t* length);
// Mean of a summary column, e.g. "pob_far". Returns POBSIM_NOT_FOUND when
// the column is unknown or has no defined value.
POBSIM_API pobsim_status pobsim_output_summary_mean(const pobsim_output* output,
                                                    const char* column, double* mean);
POBSIM_API pobsim_status pobsim_output_write(const pobsim_output* output, const char* dir);
POBSIM_API void pobsim_output_free(pobsim_output* output);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // POBSIM_POBSIM_H_
