/* C interface to the gaas library. All objects are opaque handles released
 * with the matching *_free function; strings returned through `char**` are
 * released with gaas_string_free. Every call returning gaas_status records a
 * message retrievable with gaas_last_error() on the calling thread. */
#ifndef GAAS_GAAS_H
#define GAAS_GAAS_H

#include <stddef.h>
#include <stdint.h>

#if defined(GAAS_BUILDING_LIBRARY)
#define GAAS_API __attribute__((visibility("default")))
#else
#define GAAS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gaas_status {
  GAAS_OK = 0,
  GAAS_ERR_NON_FINITE = 1,
  GAAS_ERR_NON_SQUARE = 2,
  GAAS_ERR_NOT_SYMMETRIC = 3,
  GAAS_ERR_DIMENSION_MISMATCH = 4,
  GAAS_ERR_NO_CONVERGENCE = 5,
  GAAS_ERR_SINGULAR_OPERATOR = 6,
  GAAS_ERR_NOT_PSD = 7,
  GAAS_ERR_INCONSISTENT_CONSTRAINTS = 8,
  GAAS_ERR_NOT_STABILIZING = 9,
  GAAS_ERR_SCHEMA = 10,
  GAAS_ERR_INVARIANT_VIOLATION = 11,
  GAAS_ERR_DOMAIN_GAP = 12,
  GAAS_ERR_NON_FINITE_STATE = 13,
  GAAS_ERR_ZENO_JUMPS = 14,
  GAAS_ERR_IO = 15,
  GAAS_ERR_INVALID_ARGUMENT = 16,
  GAAS_ERR_INTERNAL = 99
} gaas_status;

typedef struct gaas_scenario gaas_scenario;
typedef struct gaas_gains gaas_gains;
typedef struct gaas_report gaas_report;
typedef struct gaas_trajectory gaas_trajectory;
typedef struct gaas_verification gaas_verification;

GAAS_API const char* gaas_version(void);
GAAS_API const char* gaas_status_name(gaas_status status);
GAAS_API const char* gaas_last_error(void);
GAAS_API void gaas_string_free(char* s);

/* Scenarios. Setters re-run validation and leave the scenario unchanged on
 * failure. */
GAAS_API gaas_status gaas_scenario_from_json(const char* text, gaas_scenario** out);
GAAS_API gaas_status gaas_scenario_from_file(const char* path, gaas_scenario** out);
GAAS_API gaas_status gaas_scenario_builtin(const char* name, gaas_scenario** out);
GAAS_API gaas_status gaas_scenario_random(uint64_t seed, gaas_scenario** out);
GAAS_API gaas_status gaas_scenario_set_epsilon(gaas_scenario* s, double epsilon);
GAAS_API gaas_status gaas_scenario_set_a1(gaas_scenario* s, double a1);
GAAS_API gaas_status gaas_scenario_set_step(gaas_scenario* s, double step);
GAAS_API gaas_status gaas_scenario_set_horizon(gaas_scenario* s, double horizon);
/* Canonical JSON rendering (stable key order). */
GAAS_API gaas_status gaas_scenario_to_json(const gaas_scenario* s, char** out);
GAAS_API void gaas_scenario_free(gaas_scenario* s);

/* Gains. Scalar names: a1, epsilon, rbar1, rbar2, rbar3, lambda_min_M,
 * input_bound. */
GAAS_API gaas_status gaas_synthesize(const gaas_scenario* s, int force_s_zero, gaas_gains** out);
GAAS_API gaas_status gaas_gains_from_json(const gaas_scenario* s, const char* text, gaas_gains** out);
GAAS_API gaas_status gaas_gains_to_json(const gaas_gains* g, char** out);
GAAS_API gaas_status gaas_gains_scalar(const gaas_gains* g, const char* name, double* out);
/* Copies the named matrix (M, M_sqrt, K, P, Q, S, R) row-major into `data`
 * when `capacity` suffices; rows and cols are always written. */
GAAS_API gaas_status gaas_gains_matrix(const gaas_gains* g, const char* name, double* data,
                                       size_t capacity, size_t* rows, size_t* cols);
GAAS_API void gaas_gains_free(gaas_gains* g);

/* Condition report. Scalar names: max_feasible_a1, rbar_max,
 * feasibility_ratio, feasibility_margin, input_bound, input_ball_radius. */
GAAS_API gaas_status gaas_check(const gaas_scenario* s, const gaas_gains* g, gaas_report** out);
GAAS_API int gaas_report_passed(const gaas_report* r);
GAAS_API gaas_status gaas_report_scalar(const gaas_report* r, const char* name, double* out);
/* Value and pass flag of one named record. */
GAAS_API gaas_status gaas_report_record(const gaas_report* r, const char* name, double* value,
                                        int* pass);
GAAS_API gaas_status gaas_report_to_json(const gaas_report* r, char** out);
GAAS_API void gaas_report_free(gaas_report* r);

/* Simulation. keep_every thins the stored grid (1 stores every sample). */
GAAS_API gaas_status gaas_simulate(const gaas_scenario* s, const gaas_gains* g, size_t keep_every,
                                   gaas_trajectory** out);
GAAS_API size_t gaas_trajectory_samples(const gaas_trajectory* t);
GAAS_API size_t gaas_trajectory_jump_count(const gaas_trajectory* t);
/* Final (t, x, xhat); x and xhat must hold n and n_r values. */
GAAS_API gaas_status gaas_trajectory_final(const gaas_trajectory* t, double* time, double* x,
                                           size_t x_capacity, double* xhat, size_t xhat_capacity);
GAAS_API gaas_status gaas_trajectory_write_csv(const gaas_trajectory* t, const char* path,
                                               size_t stride);
GAAS_API gaas_status gaas_trajectory_write_jumps_csv(const gaas_trajectory* t, const char* path);
GAAS_API void gaas_trajectory_free(gaas_trajectory* t);

/* Trajectory verification against the scenario's epsilon, envelope and
 * input ball. With calibrate != 0 the decay slack is calibrated by a
 * half-step rerun; otherwise `slack` is used as given.
 * Scalar names: max_err, max_vg, max_u, jump_count, jumps_passed,
 * decay_violations, slack, rbar_max, initial_vg. */
GAAS_API gaas_status gaas_verify(const gaas_scenario* s, const gaas_gains* g,
                                 const gaas_trajectory* t, int calibrate, double slack,
                                 gaas_verification** out);
GAAS_API int gaas_verification_passed(const gaas_verification* v);
GAAS_API gaas_status gaas_verification_scalar(const gaas_verification* v, const char* name,
                                              double* out);
GAAS_API gaas_status gaas_verification_to_json(const gaas_verification* v, char** out);
GAAS_API void gaas_verification_free(gaas_verification* v);

#ifdef __cplusplus
}
#endif

#endif
