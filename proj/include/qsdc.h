/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the qsdc simulation library.
 *
 * Every entry point is driven by a JSON configuration string (the same
 * schema the CLI accepts) and produces an opaque report handle.  Handles own
 * all returned strings; free them with qsdc_report_free.  All functions are
 * thread-safe as long as each handle is used from one thread at a time; the
 * error message store is thread-local.
 */
#ifndef QSDC_H
#define QSDC_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qsdc_status {
    QSDC_OK = 0,
    QSDC_ERROR_INVALID_ARGUMENT = 1, /* bad JSON, bad field, null pointer */
    QSDC_ERROR_INTERNAL = 2         /* unexpected failure; see qsdc_last_error */
} qsdc_status;

/* Opaque result of a run, a sweep, or an attack evaluation. */
typedef struct qsdc_report qsdc_report;

/* Library version, e.g. "1.0.0". */
const char* qsdc_version(void);

/* Message for the most recent failure on this thread ("" after success). */
const char* qsdc_last_error(void);

/* Executes one protocol run.  On success stores a new handle in *out.
 * On failure *out is set to NULL and the status tells why. */
qsdc_status qsdc_run(const char* config_json, qsdc_report** out);

/* Runs a parameter sweep (config schema: base fields plus "axis", "points",
 * "runs-per-point"). */
qsdc_status qsdc_sweep(const char* config_json, qsdc_report** out);

/* Evaluates an attack in isolation (config schema: "attack", "hadamard",
 * "trials", "seed"). */
qsdc_status qsdc_attack_eval(const char* config_json, qsdc_report** out);

/* Exact per-sample detection probability of the check guarding the
 * configured attack, without running the protocol. */
qsdc_status qsdc_detection_oracle(const char* config_json, double* out);

/* Accessors.  Returned strings are owned by the handle and stay valid until
 * qsdc_report_free.  A NULL handle yields "" (and exit code 1). */
const char* qsdc_report_json(const qsdc_report* report);
const char* qsdc_report_csv(const qsdc_report* report);
const char* qsdc_report_summary(const qsdc_report* report);

/* Full event transcript for single runs; "" for sweeps and evaluations. */
const char* qsdc_report_transcript(const qsdc_report* report);

/* Process exit code the CLI contract assigns to this result:
 * 0 completed as configured, 2 aborted on detection or delivered corrupted
 * bits under a tolerant threshold. */
int qsdc_report_exit_code(const qsdc_report* report);

/* Safe on NULL. */
void qsdc_report_free(qsdc_report* report);

#ifdef __cplusplus
}
#endif

#endif /* QSDC_H */
