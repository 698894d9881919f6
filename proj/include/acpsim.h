#ifndef ACPSIM_H
#define ACPSIM_H

/* C interface to the simulator.  A scenario handle holds a parsed, validated
 * configuration; running it yields an immutable result handle.  All functions
 * returning acpsim_status leave a human-readable message in
 * acpsim_last_error() on failure.  Handles are not thread-safe; the error
 * message is thread-local. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct acpsim_scenario acpsim_scenario;
typedef struct acpsim_result acpsim_result;

typedef enum acpsim_status {
  ACPSIM_OK = 0,
  ACPSIM_ERR_INVALID_ARG = 1, /* null handle or out pointer */
  ACPSIM_ERR_IO = 2,          /* file could not be read or written */
  ACPSIM_ERR_PARSE = 3,       /* config rejected; message names the line */
  ACPSIM_ERR_CONFIG = 4,      /* parsed but inconsistent */
  ACPSIM_ERR_RUNTIME = 5
} acpsim_status;

const char* acpsim_version(void);

/* Message from the most recent failing call on this thread. */
const char* acpsim_last_error(void);

acpsim_status acpsim_scenario_load(const char* path, acpsim_scenario** out);
acpsim_status acpsim_scenario_parse(const char* text, acpsim_scenario** out);
void acpsim_scenario_free(acpsim_scenario* s);

acpsim_status acpsim_scenario_set_seed(acpsim_scenario* s, uint64_t seed);

/* key=value lines of the effective configuration; owned by the handle and
 * valid until it is freed. */
const char* acpsim_scenario_describe(acpsim_scenario* s);

acpsim_status acpsim_run(const acpsim_scenario* s, acpsim_result** out);
void acpsim_result_free(acpsim_result* r);

uint64_t acpsim_result_request_count(const acpsim_result* r);
uint64_t acpsim_result_served_count(const acpsim_result* r);
double acpsim_result_mean_tts_ms(const acpsim_result* r);     /* over served */
double acpsim_result_mean_fidelity(const acpsim_result* r);   /* over served */
uint64_t acpsim_result_invariant_violations(const acpsim_result* r);
uint64_t acpsim_result_trace_digest(const acpsim_result* r);

typedef struct acpsim_window {
  double window_start_s;
  double window_end_s;
  uint64_t arrivals;
  uint64_t served;
  double mean_tts_ms;
  double mean_fidelity;
  double served_fraction;
} acpsim_window;

uint64_t acpsim_result_window_count(const acpsim_result* r);
acpsim_status acpsim_result_window(const acpsim_result* r, uint64_t index,
                                   acpsim_window* out);

acpsim_status acpsim_result_write_requests_csv(const acpsim_result* r,
                                               const char* path);
acpsim_status acpsim_result_write_summary_csv(const acpsim_result* r,
                                              const char* path);

#ifdef __cplusplus
}
#endif

#endif /* ACPSIM_H */
