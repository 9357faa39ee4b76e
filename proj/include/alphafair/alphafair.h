/* C interface to the alpha-fair bandwidth allocation library.
 *
 * Every handle is opaque and owned by the caller; release it with the
 * matching *_free function (NULL is accepted). Functions return an af_status
 * and leave a message retrievable with af_last_error() on the calling thread.
 */
#ifndef ALPHAFAIR_ALPHAFAIR_H_
#define ALPHAFAIR_ALPHAFAIR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ALPHAFAIR_BUILDING_LIBRARY)
#    define AF_API __declspec(dllexport)
#  else
#    define AF_API __declspec(dllimport)
#  endif
#else
#  define AF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum af_status {
    AF_OK = 0,
    AF_ERR_INVALID_ARGUMENT = 1,
    AF_ERR_PARSE = 2,
    AF_ERR_VALIDATION = 3,
    AF_ERR_IO = 4,
    AF_ERR_SOLVER = 5,
    AF_ERR_PROJECTION = 6,
    AF_ERR_PROTOCOL = 7,
    AF_ERR_INTERNAL = 8
} af_status;

typedef enum af_algorithm {
    AF_C_ADMM = 0,
    AF_FD_ADMM = 1,
    AF_LAGR = 2
} af_algorithm;

typedef struct af_instance af_instance;
typedef struct af_partition af_partition;
typedef struct af_result af_result;
typedef struct af_sim af_sim;

/* Message of the last failed call on this thread; "" after success.
 * Functions returning a handle through `out` set it to NULL on failure. */
AF_API const char* af_last_error(void);
AF_API const char* af_status_name(af_status status);
AF_API const char* af_version(void);

AF_API af_status af_algorithm_from_name(const char* name, af_algorithm* out);
AF_API const char* af_algorithm_name(af_algorithm algorithm);

/* ---- instances ---- */

typedef struct af_generator_params {
    uint64_t seed;
    int nodes;
    int links;
    int routes;
    double capacity_min, capacity_max;
    double weight_min, weight_max;
    double alpha;
} af_generator_params;

AF_API void af_generator_params_init(af_generator_params* params);
AF_API af_status af_instance_generate(const af_generator_params* params, af_instance** out);
AF_API af_status af_instance_load(const char* path, af_instance** out);
AF_API af_status af_instance_parse(const char* json, af_instance** out);
AF_API af_status af_instance_save(const af_instance* instance, const char* path);
AF_API void af_instance_free(af_instance* instance);

AF_API size_t af_instance_num_links(const af_instance* instance);
AF_API size_t af_instance_num_routes(const af_instance* instance);
AF_API double af_instance_alpha(const af_instance* instance);
AF_API af_status af_instance_set_alpha(af_instance* instance, double alpha);
AF_API af_status af_instance_set_weights(af_instance* instance, const double* weights, size_t n);
AF_API double af_instance_mean_link_load(const af_instance* instance);
/* Percentage of links whose load exceeds capacity by more than a 1e-9 margin. */
AF_API af_status af_instance_violation(const af_instance* instance, const double* x, size_t n, double* out);
AF_API af_status af_instance_utility(const af_instance* instance, const double* x, size_t n, double* out);

/* ---- partitions ---- */

AF_API af_status af_partition_load(const af_instance* instance, const char* path, af_partition** out);
AF_API af_status af_partition_single(const af_instance* instance, af_partition** out);
AF_API af_status af_partition_balanced(const af_instance* instance, int domains, af_partition** out);
AF_API af_status af_partition_random(const af_instance* instance, int domains, uint64_t seed, af_partition** out);
AF_API af_status af_partition_save(const af_partition* partition, const char* path);
AF_API int af_partition_num_domains(const af_partition* partition);
AF_API void af_partition_free(af_partition* partition);

/* ---- solving ---- */

typedef struct af_solver_config {
    double tol_primal;
    double tol_dual;
    long max_iters;
    int adaptive_lambda; /* nonzero: adaptive penalty, lambda ignored */
    double lambda;
    int tau;
    double time_budget; /* seconds, <= 0 disables */
    int workers;
    int record_trace;
    int record_timing;
} af_solver_config;

AF_API void af_solver_config_init(af_solver_config* config);

/* partition may be NULL for a single domain. with_reference adds relative gaps
 * against reference_solution to the trace. */
AF_API af_status af_solve(const af_instance* instance, const af_partition* partition, af_algorithm algorithm,
                          const af_solver_config* config, int with_reference, af_result** out);
AF_API void af_result_free(af_result* result);

AF_API size_t af_result_num_routes(const af_result* result);
AF_API af_status af_result_allocation(const af_result* result, double* out, size_t n);
/* Returns AF_ERR_INVALID_ARGUMENT when no feasible iterate was seen. */
AF_API af_status af_result_best_feasible(const af_result* result, double* out, size_t n);
AF_API int af_result_converged(const af_result* result);
AF_API long af_result_iterations(const af_result* result);
AF_API double af_result_lambda(const af_result* result);
AF_API double af_result_objective(const af_result* result);
AF_API double af_result_gap(const af_result* result); /* NaN without reference */
AF_API double af_result_primal_residual(const af_result* result);
AF_API double af_result_dual_residual(const af_result* result);
AF_API af_status af_result_write_trace(const af_result* result, const char* path);
AF_API af_status af_result_write_solution(const af_result* result, const char* path);

/* FD-ADMM on one domain to 1e-6 residuals. lambda <= 0 selects the adaptive
 * penalty (lambda = 1 when alpha = 0). */
AF_API af_status af_reference_solution(const af_instance* instance, double lambda, double* out, size_t n);

/* ---- experiments ---- */

typedef struct af_dynamic_config {
    const double* amplitudes;
    size_t num_amplitudes;
    int events;
    int iterations_per_event;
    uint64_t seed;
    const af_algorithm* algorithms;
    size_t num_algorithms;
    int compare_cold_start;
    /* Nonzero skips running each algorithm to the solver tolerances on the
     * base weights before the first event. */
    int skip_settle;
} af_dynamic_config;

/* trace_path and summary_path may be NULL. */
AF_API af_status af_run_dynamic(const af_instance* instance, const af_partition* partition,
                                const af_dynamic_config* dynamic, const af_solver_config* solver,
                                const char* trace_path, const char* summary_path);

/* Fixed-lambda FD-ADMM runs for each grid value plus one adaptive run. */
AF_API af_status af_sweep_lambda(const af_instance* instance, const af_partition* partition, const double* grid,
                                 size_t grid_size, const af_solver_config* solver, const char* path);
AF_API af_status af_adaptive_lambda(const af_instance* instance, const af_partition* partition,
                                    const af_solver_config* solver, double* out);

/* Writes one (mean link load, iterations) row per instance; FD-ADMM on a single domain. */
AF_API af_status af_loadcurve(const af_instance* const* instances, size_t count, const af_solver_config* solver,
                              const char* path);

/* ---- domain simulation ---- */

AF_API af_status af_sim_create(const af_instance* instance, const af_partition* partition,
                               const af_solver_config* config, int log_messages, af_sim** out);
AF_API void af_sim_free(af_sim* sim);
AF_API af_status af_sim_run(af_sim* sim, long rounds);
AF_API af_status af_sim_update_weights(af_sim* sim, const double* weights, size_t n);
AF_API long af_sim_round(const af_sim* sim);
AF_API double af_sim_lambda(const af_sim* sim);
AF_API af_status af_sim_feasible(const af_sim* sim, double* out, size_t n);
AF_API af_status af_sim_consensus(const af_sim* sim, double* out, size_t n);
/* Total floats sent by each domain (out has num_domains + 1 entries, index 0
 * unused) and whether every round matched the predicted count. */
AF_API af_status af_sim_overhead(const af_sim* sim, long* out, size_t n, int* matches_prediction);
AF_API af_status af_sim_write_message_log(const af_sim* sim, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* ALPHAFAIR_ALPHAFAIR_H_ */
