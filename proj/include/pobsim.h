/* Copyright 2026 The pobsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the pobsim simulator.
 *
 * Handles are opaque and owned by the caller; release them with the matching
 * _free function. Every call that can fail returns a pob_status and leaves a
 * message retrievable with pob_last_error() on the calling thread. Strings
 * returned through out-parameters are heap copies released with
 * pob_string_free().
 */

#ifndef POBSIM_H_
#define POBSIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define POB_API __declspec(dllexport)
#else
#define POB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pob_status {
  POB_OK = 0,
  POB_ERR_INVALID_INPUT = 1,
  POB_ERR_NOT_FOUND = 2,
  POB_ERR_DEGENERATE_ELECTION = 3,
  POB_ERR_INSUFFICIENT_POOL = 4,
  POB_ERR_PARSE = 5,
  POB_ERR_CONFIG = 6,
  POB_ERR_IO = 7,
  POB_ERR_RUNTIME = 8
} pob_status;

typedef struct pob_config pob_config;
typedef struct pob_result pob_result;

POB_API const char* pob_version(void);
POB_API const char* pob_status_name(pob_status status);
/* Message of the last failure on this thread; "" if none. */
POB_API const char* pob_last_error(void);
/* Process exit code for a status: 0 ok, 1 config problems, 2 otherwise. */
POB_API int pob_exit_code(pob_status status);

POB_API pob_status pob_config_load(const char* path, pob_config** out);
POB_API pob_status pob_config_parse(const char* yaml_text, pob_config** out);
POB_API pob_status pob_config_preset(const char* name, pob_config** out);
/* Dotted-path override, e.g. ("watchdog.theta", "7/10"). */
POB_API pob_status pob_config_set(pob_config* config, const char* path, const char* value);
POB_API pob_status pob_config_echo(const pob_config* config, char** out);
POB_API void pob_config_free(pob_config* config);

POB_API size_t pob_preset_count(void);
/* NULL when index is out of range. */
POB_API const char* pob_preset_name(size_t index);

/* workers = 0 means one worker. */
POB_API pob_status pob_run(const pob_config* config, uint32_t workers, int keep_ledgers,
                           pob_result** out);
POB_API pob_status pob_sweep(const pob_config* config, uint32_t workers, pob_result** out);
POB_API pob_status pob_ic_check(const pob_config* config, uint32_t workers,
                                pob_result** out);
POB_API pob_status pob_replay(const char* trace_path, const pob_config* config,
                              uint32_t workers, int keep_ledgers, pob_result** out);

/* Output files held by a result, by relative name ("trials.csv", ...). */
POB_API size_t pob_result_file_count(const pob_result* result);
POB_API const char* pob_result_file_name(const pob_result* result, size_t index);
/* NULL if the result holds no such file. */
POB_API const char* pob_result_file(const pob_result* result, const char* name);
POB_API pob_status pob_result_write(const pob_result* result, const char* dir);
POB_API void pob_result_free(pob_result* result);

POB_API void pob_string_free(char* s);

/* Gini coefficient of n counts. POB_ERR_INVALID_INPUT for an empty or
 * all-zero vector or a negative entry. */
POB_API pob_status pob_gini(const double* counts, size_t n, double* out);
/* Incentive check: holds is set to 1 when the future loss exceeds the gain. */
POB_API pob_status pob_check_ic(double discount, double immediate_penalty,
                                double slash_factor, double expected_honest_reward,
                                double deviation_gain, int* holds, double* margin);

#ifdef __cplusplus
}
#endif

#endif /* POBSIM_H_ */
