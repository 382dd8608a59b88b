/* C interface to the trmei library.
 *
 * All objects are opaque handles created by trmei_*_create / trmei_run and
 * released with the matching *_destroy function. Every fallible call returns
 * a trmei_status; on failure trmei_last_error() describes the problem (the
 * message is thread-local and valid until the next failing call on the same
 * thread). Strings returned through char** are owned by the caller and must
 * be released with trmei_string_free.
 */
#ifndef TRMEI_TRMEI_H
#define TRMEI_TRMEI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TRMEI_BUILDING_LIBRARY)
#    define TRMEI_API __declspec(dllexport)
#  else
#    define TRMEI_API __declspec(dllimport)
#  endif
#else
#  define TRMEI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum trmei_status {
  TRMEI_OK = 0,
  TRMEI_ERR_INVALID_ARGUMENT = 1,
  TRMEI_ERR_NUMERICAL = 2,
  TRMEI_ERR_IO = 3,
  TRMEI_ERR_RUNTIME = 4
} trmei_status;

typedef struct trmei_config trmei_config;
typedef struct trmei_problem trmei_problem;
typedef struct trmei_trace trmei_trace;
typedef struct trmei_campaign trmei_campaign;

TRMEI_API const char* trmei_version(void);
TRMEI_API const char* trmei_last_error(void);
TRMEI_API void trmei_string_free(char* s);

/* ---- configuration ------------------------------------------------------ */

/* json may be NULL for all defaults. Keys: n_init, budget, big_m, seed,
 * ts_max_candidates, trust_region{...}, gp{...}; unknown keys are rejected. */
TRMEI_API trmei_status trmei_config_create(const char* json, trmei_config** out);
TRMEI_API void trmei_config_destroy(trmei_config* config);
/* dimension > 0 materializes dimension-dependent defaults. */
TRMEI_API trmei_status trmei_config_to_json(const trmei_config* config, int dimension,
                                            char** out_json);

/* ---- problems ----------------------------------------------------------- */

/* name: "ackley", "levy" or "rastrigin"; box [lower, upper]^dimension. */
TRMEI_API trmei_status trmei_problem_create_benchmark(const char* name, int dimension,
                                                      double lower, double upper,
                                                      trmei_problem** out);

/* Writes f and n_constraints constraint values for x. Returns 0 on success;
 * any other value aborts the run with TRMEI_ERR_RUNTIME. */
typedef int (*trmei_evaluate_fn)(const double* x, size_t dimension, double* f, double* g,
                                 size_t n_constraints, void* user_data);

TRMEI_API trmei_status trmei_problem_create_custom(const char* name, size_t dimension,
                                                   const double* lower, const double* upper,
                                                   size_t n_constraints, trmei_evaluate_fn fn,
                                                   void* user_data, trmei_problem** out);
TRMEI_API void trmei_problem_destroy(trmei_problem* problem);
TRMEI_API size_t trmei_problem_dimension(const trmei_problem* problem);
TRMEI_API size_t trmei_problem_constraint_count(const trmei_problem* problem);
TRMEI_API trmei_status trmei_problem_evaluate(const trmei_problem* problem, const double* x,
                                              size_t dimension, double* f, double* g,
                                              size_t n_constraints);

/* ---- runs --------------------------------------------------------------- */

/* method: "tr-mei", "tr-ts" or "random". On a mid-run failure the status is
 * non-zero and *out still receives the partial trace (NULL if none). */
TRMEI_API trmei_status trmei_run(const trmei_problem* problem, const char* method,
                                 const trmei_config* config, trmei_trace** out);

typedef struct trmei_record {
  int index;
  int feasible;
  double f;
  double incumbent_F;
  int incumbent_index;
  int incumbent_feasible;
  int has_feasible_best;
  double feasible_best;
} trmei_record;

TRMEI_API void trmei_trace_destroy(trmei_trace* trace);
TRMEI_API size_t trmei_trace_size(const trmei_trace* trace);
/* x / g may be NULL; otherwise their lengths must match the problem. */
TRMEI_API trmei_status trmei_trace_record(const trmei_trace* trace, size_t i, trmei_record* out,
                                          double* x, size_t x_len, double* g, size_t g_len);
TRMEI_API trmei_status trmei_trace_feasible_best_curve(const trmei_trace* trace,
                                                       double worst_value, double* out,
                                                       size_t len);
TRMEI_API trmei_status trmei_trace_to_json(const trmei_trace* trace, char** out_json);
/* Writes summary.csv, curves/<problem>_<method>.csv and
 * traces/<problem>_<method>_<seed>.json under out_dir. */
TRMEI_API trmei_status trmei_trace_write_outputs(const trmei_trace* trace,
                                                 const trmei_config* config, const char* out_dir);

/* ---- campaigns ---------------------------------------------------------- */

/* spec_json: {"problems": [...], "methods": [...], "seeds": [...], "dimension": d,
 * "bounds": [lo, hi], "workers": n, "config": {...}, "method_configs": {...}} */
TRMEI_API trmei_status trmei_campaign_run(const char* spec_json, trmei_campaign** out);
TRMEI_API void trmei_campaign_destroy(trmei_campaign* campaign);
TRMEI_API trmei_status trmei_campaign_write(const trmei_campaign* campaign, const char* out_dir);
TRMEI_API trmei_status trmei_campaign_summary_csv(const trmei_campaign* campaign, char** out_csv);
TRMEI_API size_t trmei_campaign_failed_cells(const trmei_campaign* campaign);
TRMEI_API trmei_status trmei_campaign_resolved_spec(const trmei_campaign* campaign,
                                                    char** out_json);

/* ---- plots -------------------------------------------------------------- */

/* One SVG per problem found among the curve CSV paths. */
TRMEI_API trmei_status trmei_plot_curves(const char* const* paths, size_t n_paths,
                                         const char* out_dir, int log_y, size_t* n_written,
                                         int* dropped_points);

/* ---- numerics ----------------------------------------------------------- */

TRMEI_API double trmei_expected_improvement(double fstar, double mu, double sigma);
TRMEI_API double trmei_violation_probability(double mu, double sigma);
TRMEI_API double trmei_penalized_value(double f, const double* g, size_t n_constraints,
                                       double big_m);

#ifdef __cplusplus
}
#endif

#endif /* TRMEI_TRMEI_H */
