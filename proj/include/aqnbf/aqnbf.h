/* C interface to the aqnbf toolkit. Every call returns an aq_status; on
 * failure aq_last_error() describes the error of the calling thread. Strings
 * handed out by the library are released with aq_string_free. */
#ifndef AQNBF_H
#define AQNBF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AQ_API __declspec(dllexport)
#else
#define AQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aq_status {
  AQ_OK = 0,
  AQ_INVALID_ARGUMENT = 1,
  AQ_PARSE_ERROR = 2,
  AQ_NUMERICAL_ERROR = 3,
  AQ_SIZE_GUARD = 4,
  AQ_NO_WORK = 5,
  AQ_INTERNAL_ERROR = 6
} aq_status;

typedef struct aq_functional aq_functional;

typedef struct aq_solver_options {
  double gap_tol;
  double feas_tol;
  int max_iters;
} aq_solver_options;

typedef enum aq_init { AQ_INIT_PAPER = 0, AQ_INIT_RANDOM = 1 } aq_init;

typedef struct aq_seesaw_options {
  int restarts;
  int max_sweeps;
  double threshold;
  int window;
  uint64_t seed;
  aq_init init;
  double target;
  double noise;
  /* 0 reads AQ_NR_THREADS, then falls back to the core count. */
  int threads;
  aq_solver_options solver;
} aq_seesaw_options;

AQ_API const char* aq_version(void);
AQ_API const char* aq_status_name(aq_status status);
AQ_API const char* aq_last_error(void);
AQ_API void aq_string_free(char* s);

AQ_API void aq_solver_options_default(aq_solver_options* opts);
AQ_API void aq_seesaw_options_default(aq_seesaw_options* opts);

/* Functionals in the scenario JSON schema. */
AQ_API aq_status aq_functional_parse(const char* json, aq_functional** out);
AQ_API aq_status aq_functional_load(const char* path, aq_functional** out);
/* name: "u00", "u01", "v", "w" (the composed paper functional) or "chsh". */
AQ_API aq_status aq_functional_paper(const char* name, aq_functional** out);
AQ_API aq_status aq_functional_to_json(const aq_functional* f, int full_table, char** out);
AQ_API aq_status aq_functional_scenario(const aq_functional* f, int* parties, int* settings, int* outcomes);
AQ_API aq_status aq_functional_scale(const aq_functional* f, double factor, aq_functional** out);
/* Value on a behavior given in the scenario JSON schema. */
AQ_API aq_status aq_functional_evaluate(const aq_functional* f, const char* behavior_json, double* value);
AQ_API void aq_functional_free(aq_functional* f);

/* Extremum over the almost-quantum set. The report carries the value, the
 * certified bound, the optimal behavior and the SOS certificate. */
AQ_API aq_status aq_extremize(const aq_functional* f, int maximize, const aq_solver_options* opts, double* value,
                              double* gap, char** report_json);

/* is_nbf is 1 when the functional lies in [-tol, 1 + tol] on the set. */
AQ_API aq_status aq_verify_nbf(const aq_functional* f, double tol, const aq_solver_options* opts, int* is_nbf,
                               char** report_json);

/* members holds settings * outcomes handles, setting-major: U_{alpha|xi} is
 * members[xi * outcomes + alpha]. family_slot picks V's party that receives
 * the family output. The family must be complete. */
AQ_API aq_status aq_compose(const aq_functional* v, const aq_functional* const* members, int settings, int outcomes,
                            int family_slot, aq_functional** out);

AQ_API aq_status aq_seesaw_run(const aq_seesaw_options* opts, double* best_value, int* target_reached,
                               char** trace_json);

/* holds is 1 when the minimum lies in the acceptance band with a tight gap. */
AQ_API aq_status aq_reproduce(const aq_solver_options* opts, double* value, int* holds, char** report_json);

/* claim is -1 above the claim regime, otherwise 1 when the minimum stays
 * below the robustness threshold. */
AQ_API aq_status aq_perturb(double epsilon, uint64_t seed, int steps, const aq_solver_options* opts, double* value,
                            int* claim, char** report_json);

/* Inclusion chain and trace-construction checks; ok is 1 when all hold. */
AQ_API aq_status aq_oracle_table(uint64_t seed, const aq_solver_options* opts, int* ok, char** report_json);

#ifdef __cplusplus
}
#endif

#endif
