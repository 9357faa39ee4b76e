#include "alphafair/alphafair.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "alphafair/domain_sim.hpp"
#include "alphafair/error.hpp"
#include "alphafair/experiments.hpp"
#include "alphafair/fairness.hpp"
#include "alphafair/instance.hpp"
#include "alphafair/solvers.hpp"
#include "alphafair/trace.hpp"

using namespace alphafair;

struct af_instance {
    Instance value;
};

struct af_partition {
    Partition value;
};

struct af_result {
    Instance instance;
    Algorithm algorithm;
    SolveResult value;
    double objective = NAN;
    double reference_objective = NAN;
};

struct af_sim {
    std::unique_ptr<DomainSimulation> value;
};

namespace {

thread_local std::string last_error;

af_status fail(af_status status, const char* message) {
    last_error = message;
    return status;
}

template <class F>
af_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return AF_OK;
    } catch (const InvalidArgument& e) {
        return fail(AF_ERR_INVALID_ARGUMENT, e.what());
    } catch (const ParseError& e) {
        return fail(AF_ERR_PARSE, e.what());
    } catch (const ValidationError& e) {
        return fail(AF_ERR_VALIDATION, e.what());
    } catch (const IoError& e) {
        return fail(AF_ERR_IO, e.what());
    } catch (const ProjectionError& e) {
        return fail(AF_ERR_PROJECTION, e.what());
    } catch (const SolverError& e) {
        return fail(AF_ERR_SOLVER, e.what());
    } catch (const ProtocolError& e) {
        return fail(AF_ERR_PROTOCOL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(AF_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(AF_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(AF_ERR_INTERNAL, "unknown error");
    }
}

void require(bool condition, const char* message) {
    if (!condition) throw InvalidArgument(message);
}

SolverConfig to_config(const af_solver_config* c) {
    SolverConfig config;
    if (!c) return config;
    config.tol_primal = c->tol_primal;
    config.tol_dual = c->tol_dual;
    config.max_iters = c->max_iters;
    if (!c->adaptive_lambda) config.lambda = c->lambda;
    config.tau = c->tau;
    config.time_budget = c->time_budget;
    config.workers = c->workers;
    config.record_trace = c->record_trace != 0;
    config.record_timing = c->record_timing != 0;
    return config;
}

Partition partition_or_single(const af_instance* instance, const af_partition* partition) {
    if (partition) {
        require(partition->value.domain_of_link.size() == instance->value.num_links(),
                "partition does not match the instance");
        return partition->value;
    }
    return single_domain_partition(instance->value);
}

void copy_out(const std::vector<double>& values, double* out, size_t n) {
    require(out != nullptr, "output buffer is null");
    require(n >= values.size(), "output buffer too small");
    std::copy(values.begin(), values.end(), out);
}

std::ofstream open_out(const char* path) {
    require(path != nullptr, "path is null");
    std::ofstream out(path);
    if (!out) throw IoError(std::string("cannot open ") + path + " for writing");
    return out;
}

}  // namespace

extern "C" {

const char* af_last_error(void) { return last_error.c_str(); }

const char* af_status_name(af_status status) {
    switch (status) {
        case AF_OK: return "ok";
        case AF_ERR_INVALID_ARGUMENT: return "invalid argument";
        case AF_ERR_PARSE: return "parse error";
        case AF_ERR_VALIDATION: return "validation error";
        case AF_ERR_IO: return "i/o error";
        case AF_ERR_SOLVER: return "solver error";
        case AF_ERR_PROJECTION: return "projection error";
        case AF_ERR_PROTOCOL: return "protocol error";
        case AF_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* af_version(void) { return "0.1.0"; }

af_status af_algorithm_from_name(const char* name, af_algorithm* out) {
    return guarded([&] {
        require(name && out, "null argument");
        *out = static_cast<af_algorithm>(parse_algorithm(name));
    });
}

const char* af_algorithm_name(af_algorithm algorithm) {
    switch (algorithm) {
        case AF_C_ADMM: return "c-admm";
        case AF_FD_ADMM: return "fd-admm";
        case AF_LAGR: return "lagr";
    }
    return "";
}

// ---- instances

void af_generator_params_init(af_generator_params* p) {
    if (!p) return;
    const GeneratorParams d;
    p->seed = d.seed;
    p->nodes = d.n_nodes;
    p->links = d.n_links;
    p->routes = d.n_routes;
    p->capacity_min = d.capacity_range.first;
    p->capacity_max = d.capacity_range.second;
    p->weight_min = d.weight_range.first;
    p->weight_max = d.weight_range.second;
    p->alpha = d.alpha;
}

af_status af_instance_generate(const af_generator_params* p, af_instance** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(p && out, "null argument");
        GeneratorParams g;
        g.seed = p->seed;
        g.n_nodes = p->nodes;
        g.n_links = p->links;
        g.n_routes = p->routes;
        g.capacity_range = {p->capacity_min, p->capacity_max};
        g.weight_range = {p->weight_min, p->weight_max};
        g.alpha = p->alpha;
        *out = new af_instance{generate_random(g)};
    });
}

af_status af_instance_load(const char* path, af_instance** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(path && out, "null argument");
        *out = new af_instance{load_instance(path)};
    });
}

af_status af_instance_parse(const char* json, af_instance** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(json && out, "null argument");
        *out = new af_instance{instance_from_json(json)};
    });
}

af_status af_instance_save(const af_instance* instance, const char* path) {
    return guarded([&] {
        require(instance && path, "null argument");
        save_instance(instance->value, path);
    });
}

void af_instance_free(af_instance* instance) { delete instance; }

size_t af_instance_num_links(const af_instance* instance) { return instance ? instance->value.num_links() : 0; }
size_t af_instance_num_routes(const af_instance* instance) { return instance ? instance->value.num_routes() : 0; }
double af_instance_alpha(const af_instance* instance) { return instance ? instance->value.alpha : NAN; }

af_status af_instance_set_alpha(af_instance* instance, double alpha) {
    return guarded([&] {
        require(instance != nullptr, "null instance");
        require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be finite and >= 0");
        instance->value.alpha = alpha;
    });
}

af_status af_instance_set_weights(af_instance* instance, const double* weights, size_t n) {
    return guarded([&] {
        require(instance && weights, "null argument");
        require(n == instance->value.num_routes(), "weight count differs from the route count");
        for (size_t r = 0; r < n; ++r) require(weights[r] > 0.0 && std::isfinite(weights[r]), "weights must be > 0");
        for (size_t r = 0; r < n; ++r) instance->value.routes[r].weight = weights[r];
    });
}

double af_instance_mean_link_load(const af_instance* instance) {
    return instance ? mean_link_load(instance->value) : NAN;
}

af_status af_instance_violation(const af_instance* instance, const double* x, size_t n, double* out) {
    return guarded([&] {
        require(instance && x && out, "null argument");
        require(n == instance->value.num_routes(), "allocation size differs from the route count");
        *out = violated_percentage(instance->value, std::span<const double>(x, n));
    });
}

af_status af_instance_utility(const af_instance* instance, const double* x, size_t n, double* out) {
    return guarded([&] {
        require(instance && x && out, "null argument");
        require(n == instance->value.num_routes(), "allocation size differs from the route count");
        *out = utility(FairnessObjective::from(instance->value), std::span<const double>(x, n));
    });
}

// ---- partitions

af_status af_partition_load(const af_instance* instance, const char* path, af_partition** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(instance && path && out, "null argument");
        *out = new af_partition{load_partition(instance->value, path)};
    });
}

af_status af_partition_single(const af_instance* instance, af_partition** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(instance && out, "null argument");
        *out = new af_partition{single_domain_partition(instance->value)};
    });
}

af_status af_partition_balanced(const af_instance* instance, int domains, af_partition** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(instance && out, "null argument");
        *out = new af_partition{balanced_partition(instance->value, domains)};
    });
}

af_status af_partition_random(const af_instance* instance, int domains, uint64_t seed, af_partition** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(instance && out, "null argument");
        *out = new af_partition{random_partition(instance->value, domains, seed)};
    });
}

af_status af_partition_save(const af_partition* partition, const char* path) {
    return guarded([&] {
        require(partition && path, "null argument");
        save_partition(partition->value, path);
    });
}

int af_partition_num_domains(const af_partition* partition) { return partition ? partition->value.num_domains : 0; }

void af_partition_free(af_partition* partition) { delete partition; }

// ---- solving

void af_solver_config_init(af_solver_config* c) {
    if (!c) return;
    const SolverConfig d;
    c->tol_primal = d.tol_primal;
    c->tol_dual = d.tol_dual;
    c->max_iters = d.max_iters;
    c->adaptive_lambda = 1;
    c->lambda = 1.0;
    c->tau = d.tau;
    c->time_budget = d.time_budget;
    c->workers = d.workers;
    c->record_trace = d.record_trace ? 1 : 0;
    c->record_timing = d.record_timing ? 1 : 0;
}

af_status af_solve(const af_instance* instance, const af_partition* partition, af_algorithm algorithm,
                   const af_solver_config* config, int with_reference, af_result** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(instance && out, "null argument");
        require(algorithm >= AF_C_ADMM && algorithm <= AF_LAGR, "unknown algorithm");
        const SolverConfig c = to_config(config);
        const Partition p = partition_or_single(instance, partition);
        const Algorithm alg = static_cast<Algorithm>(algorithm);
        auto result = std::make_unique<af_result>();
        result->instance = instance->value;
        result->algorithm = alg;
        const FairnessObjective objective = FairnessObjective::from(instance->value);
        if (with_reference) {
            // Reject bad configurations before the (possibly long) reference solve.
            make_solver(alg, instance->value, p, c);
            const Allocation reference = reference_solution(instance->value, c.lambda);
            result->reference_objective = utility(objective, reference);
            result->value = solve(instance->value, p, alg, c, &reference);
        } else {
            result->value = solve(instance->value, p, alg, c);
        }
        result->objective = utility(objective, result->value.allocation);
        *out = result.release();
    });
}

void af_result_free(af_result* result) { delete result; }

size_t af_result_num_routes(const af_result* result) { return result ? result->value.allocation.size() : 0; }

af_status af_result_allocation(const af_result* result, double* out, size_t n) {
    return guarded([&] {
        require(result != nullptr, "null result");
        copy_out(result->value.allocation, out, n);
    });
}

af_status af_result_best_feasible(const af_result* result, double* out, size_t n) {
    return guarded([&] {
        require(result != nullptr, "null result");
        require(result->value.best_feasible.has_value(), "no feasible iterate was found");
        copy_out(*result->value.best_feasible, out, n);
    });
}

int af_result_converged(const af_result* result) { return result && result->value.converged ? 1 : 0; }
long af_result_iterations(const af_result* result) { return result ? result->value.iterations : 0; }
double af_result_lambda(const af_result* result) { return result ? result->value.lambda : NAN; }
double af_result_objective(const af_result* result) { return result ? result->objective : NAN; }

double af_result_gap(const af_result* result) {
    return result ? relative_gap(result->objective, result->reference_objective) : NAN;
}

double af_result_primal_residual(const af_result* result) { return result ? result->value.residuals.primal : NAN; }
double af_result_dual_residual(const af_result* result) { return result ? result->value.residuals.dual : NAN; }

af_status af_result_write_trace(const af_result* result, const char* path) {
    return guarded([&] {
        require(result && path, "null argument");
        write_trace(path, result->value.trace);
    });
}

af_status af_result_write_solution(const af_result* result, const char* path) {
    return guarded([&] {
        require(result && path, "null argument");
        const SolveResult& r = result->value;
        auto number = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
        nlohmann::ordered_json doc;
        doc["algorithm"] = algorithm_name(result->algorithm);
        doc["converged"] = r.converged;
        doc["iterations"] = r.iterations;
        doc["lambda"] = number(r.lambda);
        doc["objective"] = number(result->objective);
        doc["gap"] = number(relative_gap(result->objective, result->reference_objective));
        doc["primal_residual"] = number(r.residuals.primal);
        doc["dual_residual"] = number(r.residuals.dual);
        doc["violation_pct"] = violated_percentage(result->instance, r.allocation);
        doc["allocation"] = r.allocation;
        if (r.best_feasible) {
            doc["best_feasible"] = *r.best_feasible;
            doc["best_feasible_objective"] = number(r.best_feasible_objective);
            doc["best_feasible_gap"] = number(relative_gap(r.best_feasible_objective, result->reference_objective));
        } else {
            doc["best_feasible"] = nullptr;
        }
        std::ofstream out = open_out(path);
        out << doc.dump(2) << '\n';
        if (!out) throw IoError(std::string("failed writing ") + path);
    });
}

af_status af_reference_solution(const af_instance* instance, double lambda, double* out, size_t n) {
    return guarded([&] {
        require(instance != nullptr, "null instance");
        std::optional<double> l;
        if (lambda > 0.0) l = lambda;
        copy_out(reference_solution(instance->value, l), out, n);
    });
}

// ---- experiments

af_status af_run_dynamic(const af_instance* instance, const af_partition* partition, const af_dynamic_config* dynamic,
                         const af_solver_config* solver, const char* trace_path, const char* summary_path) {
    return guarded([&] {
        require(instance && dynamic, "null argument");
        DynamicConfig c;
        if (dynamic->amplitudes) c.amplitudes.assign(dynamic->amplitudes, dynamic->amplitudes + dynamic->num_amplitudes);
        else c.amplitudes.clear();
        c.events = dynamic->events;
        c.iterations_per_event = dynamic->iterations_per_event;
        c.seed = dynamic->seed;
        if (dynamic->algorithms) {
            c.algorithms.clear();
            for (size_t i = 0; i < dynamic->num_algorithms; ++i) {
                require(dynamic->algorithms[i] >= AF_C_ADMM && dynamic->algorithms[i] <= AF_LAGR,
                        "unknown algorithm");
                c.algorithms.push_back(static_cast<Algorithm>(dynamic->algorithms[i]));
            }
        }
        c.compare_cold_start = dynamic->compare_cold_start != 0;
        c.settle_first = dynamic->skip_settle == 0;
        c.solver = to_config(solver);
        for (double a : c.amplitudes) require(a >= 0.0 && a <= 1.0, "amplitude must lie in [0, 1]");
        const DynamicResult r = run_dynamic(instance->value, partition_or_single(instance, partition), c);
        if (trace_path) {
            std::ofstream out = open_out(trace_path);
            write_dynamic_trace(out, r);
        }
        if (summary_path) {
            std::ofstream out = open_out(summary_path);
            write_dynamic_summary(out, r);
        }
    });
}

af_status af_sweep_lambda(const af_instance* instance, const af_partition* partition, const double* grid,
                          size_t grid_size, const af_solver_config* solver, const char* path) {
    return guarded([&] {
        require(instance != nullptr, "null instance");
        require(grid != nullptr || grid_size == 0, "null grid");
        const std::vector<double> g(grid, grid + grid_size);
        const auto rows = sweep_lambda(instance->value, partition_or_single(instance, partition), g, to_config(solver));
        if (path) {
            std::ofstream out = open_out(path);
            write_sweep(out, rows);
        }
    });
}

af_status af_adaptive_lambda(const af_instance* instance, const af_partition* partition,
                             const af_solver_config* solver, double* out) {
    return guarded([&] {
        require(instance && out, "null argument");
        *out = adaptive_lambda(instance->value, partition_or_single(instance, partition), to_config(solver));
    });
}

af_status af_loadcurve(const af_instance* const* instances, size_t count, const af_solver_config* solver,
                       const char* path) {
    return guarded([&] {
        require(instances != nullptr || count == 0, "null instance list");
        std::vector<LoadCurveRow> rows;
        for (size_t i = 0; i < count; ++i) {
            require(instances[i] != nullptr, "null instance");
            const Instance& inst = instances[i]->value;
            rows.push_back(loadcurve_point(inst, single_domain_partition(inst), to_config(solver)));
        }
        if (path) {
            std::ofstream out = open_out(path);
            write_loadcurve(out, rows);
        }
    });
}

// ---- domain simulation

af_status af_sim_create(const af_instance* instance, const af_partition* partition, const af_solver_config* config,
                        int log_messages, af_sim** out) {
    if (out) *out = nullptr;
    return guarded([&] {
        require(instance && out, "null argument");
        auto sim = std::make_unique<DomainSimulation>(instance->value, partition_or_single(instance, partition),
                                                      to_config(config), log_messages != 0);
        *out = new af_sim{std::move(sim)};
    });
}

void af_sim_free(af_sim* sim) { delete sim; }

af_status af_sim_run(af_sim* sim, long rounds) {
    return guarded([&] {
        require(sim != nullptr, "null simulation");
        require(rounds >= 0, "round count must be >= 0");
        sim->value->run(rounds);
    });
}

af_status af_sim_update_weights(af_sim* sim, const double* weights, size_t n) {
    return guarded([&] {
        require(sim && weights, "null argument");
        sim->value->inject_weight_update(std::span<const double>(weights, n));
    });
}

long af_sim_round(const af_sim* sim) { return sim ? sim->value->round() : 0; }
double af_sim_lambda(const af_sim* sim) { return sim ? sim->value->lambda() : NAN; }

af_status af_sim_feasible(const af_sim* sim, double* out, size_t n) {
    return guarded([&] {
        require(sim != nullptr, "null simulation");
        copy_out(sim->value->global_state().z_star, out, n);
    });
}

af_status af_sim_consensus(const af_sim* sim, double* out, size_t n) {
    return guarded([&] {
        require(sim != nullptr, "null simulation");
        copy_out(sim->value->global_state().z_tilde, out, n);
    });
}

af_status af_sim_overhead(const af_sim* sim, long* out, size_t n, int* matches_prediction) {
    return guarded([&] {
        require(sim && out, "null argument");
        const OverheadReport report = sim->value->measure_overhead();
        require(n >= report.per_domain.size(), "output buffer too small");
        std::copy(report.per_domain.begin(), report.per_domain.end(), out);
        if (matches_prediction) *matches_prediction = report.matches_prediction ? 1 : 0;
    });
}

af_status af_sim_write_message_log(const af_sim* sim, const char* path) {
    return guarded([&] {
        require(sim && path, "null argument");
        sim->value->write_message_log(path);
    });
}

}  // extern "C"
