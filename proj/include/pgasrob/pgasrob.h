/*
 * Copyright (c) 2026, pgasrob authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the PGAS robustness checker. Handles are opaque; every
 * function returning pgasrob_status stores a message retrievable with
 * pgasrob_last_error() on failure. Strings returned by accessors are owned
 * by the handle they came from. */

#ifndef PGASROB_PGASROB_H_
#define PGASROB_PGASROB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PGASROB_API __declspec(dllexport)
#else
#define PGASROB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct pgasrob_program pgasrob_program;
typedef struct pgasrob_report pgasrob_report;

typedef enum {
  PGASROB_OK = 0,
  PGASROB_ERR_PARSE = 1,    /* syntax error in a program or computation */
  PGASROB_ERR_INVALID = 2,  /* well-formed input that fails validation */
  PGASROB_ERR_IO = 3,
  PGASROB_ERR_ARGUMENT = 4, /* null pointer or option out of range */
  PGASROB_ERR_INTERNAL = 5
} pgasrob_status;

typedef enum {
  PGASROB_ROBUST = 0,
  PGASROB_NOT_ROBUST = 1,
  PGASROB_RESOURCE_BOUND = 2,
  PGASROB_VIOLATION_FOUND = 3,
  PGASROB_NO_VIOLATION_WITHIN = 4,
  PGASROB_EXHAUSTED = 5,
  PGASROB_VALID = 6,
  PGASROB_DIAGNOSTICS = 7,
  PGASROB_ACCEPTING = 8,
  PGASROB_NOT_ACCEPTING = 9,
  PGASROB_STUCK = 10,
  PGASROB_ACYCLIC = 11,
  PGASROB_VIOLATING = 12
} pgasrob_outcome;

typedef struct {
  int nodes;               /* N >= 1 */
  int domain;              /* |D| >= 1 */
  int bound;               /* oracle length bound */
  uint64_t seed;           /* simulate */
  int max_steps;           /* simulate */
  uint64_t max_states;     /* 0 = unbounded */
  int threads;             /* check */
  int emit_dot;            /* attach a DOT rendering to the report */
} pgasrob_options;

PGASROB_API void pgasrob_options_init(pgasrob_options* opts);
PGASROB_API const char* pgasrob_version(void);
PGASROB_API const char* pgasrob_last_error(void);
/* "off", "error", "warn", "info", "debug" or "trace"; NULL reads
 * PGASROB_LOG from the environment. Logs go to stderr. */
PGASROB_API void pgasrob_set_log_level(const char* level);

PGASROB_API pgasrob_status pgasrob_program_from_source(const char* text,
                                                       const char* name,
                                                       pgasrob_program** out);
PGASROB_API pgasrob_status pgasrob_program_load(const char* path,
                                                pgasrob_program** out);
PGASROB_API void pgasrob_program_free(pgasrob_program* program);
/* Canonical source text of the parsed control automaton. */
PGASROB_API const char* pgasrob_program_text(const pgasrob_program* program);
PGASROB_API int pgasrob_program_state_count(const pgasrob_program* program);
PGASROB_API int pgasrob_program_transition_count(
    const pgasrob_program* program);

PGASROB_API pgasrob_status pgasrob_validate(const pgasrob_program* program,
                                            const pgasrob_options* opts,
                                            pgasrob_report** out);
PGASROB_API pgasrob_status pgasrob_check(const pgasrob_program* program,
                                         const pgasrob_options* opts,
                                         pgasrob_report** out);
PGASROB_API pgasrob_status pgasrob_oracle(const pgasrob_program* program,
                                          const pgasrob_options* opts,
                                          int normal_form,
                                          pgasrob_report** out);
/* choices == NULL runs a random schedule from opts->seed. */
PGASROB_API pgasrob_status pgasrob_simulate(const pgasrob_program* program,
                                            const pgasrob_options* opts,
                                            const int* choices,
                                            size_t choice_count,
                                            pgasrob_report** out);
/* Computation in the text layout "kind rank (r,a)|_ q=<id>|- ..." per line,
 * or a JSON array of events. */
PGASROB_API pgasrob_status pgasrob_hb(const char* computation,
                                      const pgasrob_options* opts,
                                      pgasrob_report** out);

PGASROB_API pgasrob_outcome pgasrob_report_outcome(
    const pgasrob_report* report);
PGASROB_API const char* pgasrob_report_json(const pgasrob_report* report);
PGASROB_API const char* pgasrob_report_text(const pgasrob_report* report);
/* Empty unless emit_dot was set. */
PGASROB_API const char* pgasrob_report_dot(const pgasrob_report* report);
PGASROB_API void pgasrob_report_free(pgasrob_report* report);

#ifdef __cplusplus
}
#endif

#endif /* PGASROB_PGASROB_H_ */
