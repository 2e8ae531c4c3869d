#ifndef FSSLOW_H
#define FSSLOW_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Stable C interface of the fast-slow manifold library. All entry points
 * return a status code; detailed messages are retrieved per thread with
 * fss_last_error(). */

typedef enum fss_status {
  FSS_OK = 0,
  FSS_ERR_INVALID_ARGUMENT = 1,
  FSS_ERR_HYPOTHESIS = 2,
  FSS_ERR_WINDOW = 3,
  FSS_ERR_NO_CONVERGENCE = 4,
  FSS_ERR_IO = 5,
  FSS_ERR_INTERNAL = 6
} fss_status;

typedef struct fss_config fss_config; /* opaque */

const char* fss_version(void);

/* Last error message of the calling thread; empty string when none. The
 * pointer stays valid until the next failing call on the same thread. */
const char* fss_last_error(void);

/* Configuration handles. A fresh handle carries the built-in defaults. */
fss_config* fss_config_create(void);
fss_status fss_config_load(fss_config* cfg, const char* path);
/* key is "section.key" as in the config file, e.g. "model.alpha". */
fss_status fss_config_set(fss_config* cfg, const char* key, const char* value);
void fss_config_free(fss_config* cfg);

/* Runs the configured experiment. out_dir overrides output.dir when non-NULL.
 * On success (and on invariant failure) *summary receives the key=value
 * summary text; release it with fss_string_free. Returns FSS_OK when the
 * experiment passed its invariants, FSS_ERR_NO_CONVERGENCE when it ran but
 * failed them, other codes on errors. */
fss_status fss_run(fss_config* cfg, const char* out_dir, char** summary);

void fss_string_free(char* s);

/* Surrogate spectrum: k-th eigenvalue of the dissipative fractional operator,
 * k >= 1, 1 < alpha < 2. Returns FSS_ERR_INVALID_ARGUMENT on bad input. */
fss_status fss_eigenvalue(int k, double alpha, double* out);

/* Structural check of the configured model. gap_ok is 1/0; mu is the spectral
 * ratio entering every decay estimate. Either output may be NULL. */
fss_status fss_hypothesis_check(fss_config* cfg, int* gap_ok, double* mu);

#ifdef __cplusplus
}
#endif

#endif /* FSSLOW_H */
