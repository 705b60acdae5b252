#ifndef CTXML_CTXML_H
#define CTXML_CTXML_H

/* C interface to the ctxml library. Every call returns a ctxml_status; on
 * failure ctxml_last_error() describes the problem (thread-local, valid until
 * the next call on the same thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(CTXML_BUILDING_LIBRARY)
#define CTXML_API __attribute__((visibility("default")))
#else
#define CTXML_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ctxml_status {
  CTXML_OK = 0,
  CTXML_ERR_DOMAIN = 1,
  CTXML_ERR_IO = 2,
  CTXML_ERR_CONFIG = 3,
  CTXML_ERR_SOLVER = 4,
  CTXML_ERR_NUMERIC = 5,
  CTXML_ERR_INTERNAL = 6
} ctxml_status;

CTXML_API const char* ctxml_last_error(void);
CTXML_API const char* ctxml_status_name(ctxml_status status);

/* Strategies are 9 doubles, row-major: row k is player k's (R, P, S)
 * probabilities. Behaviours are 3 doubles P_k(+1). */

typedef struct ctxml_model ctxml_model;

CTXML_API ctxml_status ctxml_model_load(const char* path, ctxml_model** out);
CTXML_API void ctxml_model_free(ctxml_model* model);
CTXML_API ctxml_status ctxml_model_param_count(const ctxml_model* model, size_t* out);
/* Writes "biased-quantum", "generic-quantum" or "surrogate" (NUL-terminated,
 * truncated to capacity). */
CTXML_API ctxml_status ctxml_model_kind(const ctxml_model* model, char* out, size_t capacity);
CTXML_API ctxml_status ctxml_model_behaviour(const ctxml_model* model, const double strategy[9],
                                             double out[3]);

CTXML_API ctxml_status ctxml_oracle_marginals(const double strategy[9], double out[3]);

/* n random records drawn from seed; n must be at least 1. */
CTXML_API ctxml_status ctxml_gen_data(size_t n, uint64_t seed, const char* out_path);

/* Trains every seed in the config on the dataset. overrides_json may be NULL
 * or a JSON object whose fields replace those of the config file. Writes
 * config.json, <kind>/seed_<s>.csv, <kind>/model_seed_<s>.json and
 * summary.json under out_dir. */
CTXML_API ctxml_status ctxml_train(const char* config_path, const char* data_path, const char* out_dir,
                                   const char* overrides_json);

typedef struct ctxml_eval_report {
  size_t n_test;
  double avg_kl;
  double per_task_kl[3];
  uint64_t test_seed;
} ctxml_eval_report;

/* Average KL of the model against the oracle on n_test strategies drawn from
 * test_seed. If behaviours_out is non-NULL the model behaviours on the test
 * strategies are written there. */
CTXML_API ctxml_status ctxml_eval(const char* model_path, size_t n_test, uint64_t test_seed,
                                  const char* behaviours_out, ctxml_eval_report* out);

typedef struct ctxml_certificate {
  double eta_star;
  double inequality_value;
  int contextual;
  size_t n_behaviours;
} ctxml_certificate;

/* behaviours holds n consecutive triples. */
CTXML_API ctxml_status ctxml_certify_behaviours(const double* behaviours, size_t n, double bias_tol,
                                                ctxml_certificate* out);
/* Behaviours file, bias tolerance 1e-6. */
CTXML_API ctxml_status ctxml_certify_behaviours_file(const char* path, ctxml_certificate* out);
/* Behaviours of the model on RSS, SPP, RPR, SRS, PPS, RRP and 200 strategies
 * drawn from grid_seed, bias tolerance 1e-6. */
CTXML_API ctxml_status ctxml_certify_model(const char* model_path, uint64_t grid_seed,
                                           ctxml_certificate* out);
CTXML_API ctxml_status ctxml_certificate_write(const ctxml_certificate* cert, const char* path);

/* 1 if the six targets (18 doubles) admit a noncontextual model, else 0. */
CTXML_API ctxml_status ctxml_nc_feasible(const double targets[18], int* feasible);

typedef struct ctxml_measurement_report {
  size_t dim;
  double max_sum_deviation;
  double max_square_deviation;
} ctxml_measurement_report;

/* kind is "trine" (d ignored) or "even-dim" (d even, at least 2). */
CTXML_API ctxml_status ctxml_verify_measurements(const char* kind, size_t d, ctxml_measurement_report* out);

typedef void (*ctxml_progress_fn)(const char* message, void* user);

/* Four-model comparison at scale "desk" or "paper". progress may be NULL. */
CTXML_API ctxml_status ctxml_reproduce(const char* scale, uint64_t root_seed, const char* out_dir,
                                       ctxml_progress_fn progress, void* user);

#ifdef __cplusplus
}
#endif

#endif
