// Command-line driver: instance generation, static solves and the experiment
// protocols (dynamic weights, penalty sweep, load curve).
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "alphafair/alphafair.h"

namespace {

constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

// Thrown after a library call fails; carries the exit code.
struct Failure {
    int code;
};

int exit_code(af_status s) {
    switch (s) {
        case AF_ERR_SOLVER:
        case AF_ERR_PROJECTION:
        case AF_ERR_PROTOCOL:
        case AF_ERR_INTERNAL:
            return kExitSolver;
        default:
            return kExitUsage;
    }
}

void check(af_status s) {
    if (s == AF_OK) return;
    std::fprintf(stderr, "error: %s: %s\n", af_status_name(s), af_last_error());
    throw Failure{exit_code(s)};
}

struct InstanceDeleter {
    void operator()(af_instance* p) const { af_instance_free(p); }
};
struct PartitionDeleter {
    void operator()(af_partition* p) const { af_partition_free(p); }
};
struct ResultDeleter {
    void operator()(af_result* p) const { af_result_free(p); }
};
using InstancePtr = std::unique_ptr<af_instance, InstanceDeleter>;
using PartitionPtr = std::unique_ptr<af_partition, PartitionDeleter>;
using ResultPtr = std::unique_ptr<af_result, ResultDeleter>;

struct Options {
    // gen
    std::uint64_t seed = 1;
    int nodes = 20;
    int links = 40;
    std::vector<int> routes{50};
    double capacity_min = 1.0, capacity_max = 10.0;
    double weight_min = 1.0, weight_max = 1.0;

    std::vector<std::string> instances;
    std::string partition;
    int domains = 0;
    double alpha = NAN;
    std::vector<std::string> algorithms;
    std::string lambda = "adaptive";
    int tau = 30;
    double tol_primal = 1e-4;
    double tol_dual = 1e-4;
    long max_iters = 100000;
    std::string time_budget;
    int workers = 1;
    bool timing = false;
    std::vector<double> amplitudes;
    int events = 20;
    int iters_per_event = 10;
    bool cold_start = false;
    bool no_settle = false;
    std::vector<double> grid;
    int decade_lo = -3, decade_hi = 3;
    std::string out;
    std::string solution;
    std::string summary;
    bool no_reference = false;
};

InstancePtr load(const Options& o, const std::string& path) {
    af_instance* raw = nullptr;
    check(af_instance_load(path.c_str(), &raw));
    InstancePtr inst(raw);
    if (!std::isnan(o.alpha)) check(af_instance_set_alpha(inst.get(), o.alpha));
    return inst;
}

InstancePtr load_single(const Options& o) {
    if (o.instances.size() != 1) {
        std::fprintf(stderr, "error: exactly one --instance is required\n");
        throw Failure{kExitUsage};
    }
    return load(o, o.instances.front());
}

PartitionPtr make_partition(const Options& o, const af_instance* inst) {
    af_partition* raw = nullptr;
    if (!o.partition.empty()) check(af_partition_load(inst, o.partition.c_str(), &raw));
    else if (o.domains > 0) check(af_partition_balanced(inst, o.domains, &raw));
    else check(af_partition_single(inst, &raw));
    return PartitionPtr(raw);
}

af_solver_config solver_config(const Options& o) {
    af_solver_config c;
    af_solver_config_init(&c);
    c.tol_primal = o.tol_primal;
    c.tol_dual = o.tol_dual;
    c.max_iters = o.max_iters;
    c.tau = o.tau;
    c.workers = o.workers;
    c.record_timing = o.timing ? 1 : 0;
    if (o.lambda == "adaptive") {
        c.adaptive_lambda = 1;
    } else {
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(o.lambda, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != o.lambda.size() || !(value > 0.0) || !std::isfinite(value)) {
            std::fprintf(stderr, "error: --lambda expects a positive number or 'adaptive'\n");
            throw Failure{kExitUsage};
        }
        c.adaptive_lambda = 0;
        c.lambda = value;
    }
    if (!o.time_budget.empty()) {
        c.time_budget = std::stod(o.time_budget);
    }
    return c;
}

af_algorithm algorithm_of(const std::string& name) {
    af_algorithm a;
    check(af_algorithm_from_name(name.c_str(), &a));
    return a;
}

std::string replace_extension(const std::string& path, const std::string& ext) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return path.substr(0, dot) + ext;
    return path + ext;
}

void print_number(const char* key, double v) {
    if (std::isnan(v)) std::printf("%s nan\n", key);
    else std::printf("%s %.12g\n", key, v);
}

int cmd_gen(const Options& o) {
    af_generator_params p;
    af_generator_params_init(&p);
    p.seed = o.seed;
    p.nodes = o.nodes;
    p.links = o.links;
    p.routes = o.routes.front();
    p.capacity_min = o.capacity_min;
    p.capacity_max = o.capacity_max;
    p.weight_min = o.weight_min;
    p.weight_max = o.weight_max;
    p.alpha = std::isnan(o.alpha) ? 1.0 : o.alpha;
    af_instance* raw = nullptr;
    check(af_instance_generate(&p, &raw));
    InstancePtr inst(raw);
    check(af_instance_save(inst.get(), o.out.c_str()));
    return 0;
}

int cmd_solve(const Options& o) {
    InstancePtr inst = load_single(o);
    PartitionPtr part = make_partition(o, inst.get());
    const af_algorithm alg = algorithm_of(o.algorithms.empty() ? "fd-admm" : o.algorithms.front());
    const af_solver_config c = solver_config(o);
    af_result* raw = nullptr;
    check(af_solve(inst.get(), part.get(), alg, &c, o.no_reference ? 0 : 1, &raw));
    ResultPtr result(raw);

    if (!o.out.empty()) {
        check(af_result_write_trace(result.get(), o.out.c_str()));
        const std::string solution = o.solution.empty() ? replace_extension(o.out, ".solution.json") : o.solution;
        check(af_result_write_solution(result.get(), solution.c_str()));
    } else if (!o.solution.empty()) {
        check(af_result_write_solution(result.get(), o.solution.c_str()));
    }

    std::printf("algorithm %s\n", af_algorithm_name(alg));
    std::printf("converged %d\n", af_result_converged(result.get()));
    std::printf("iterations %ld\n", af_result_iterations(result.get()));
    print_number("lambda", af_result_lambda(result.get()));
    print_number("objective", af_result_objective(result.get()));
    print_number("gap", af_result_gap(result.get()));
    print_number("primal_residual", af_result_primal_residual(result.get()));
    print_number("dual_residual", af_result_dual_residual(result.get()));
    std::vector<double> x(af_result_num_routes(result.get()));
    check(af_result_allocation(result.get(), x.data(), x.size()));
    double violation = 0.0;
    check(af_instance_violation(inst.get(), x.data(), x.size(), &violation));
    print_number("violation_pct", violation);
    return 0;
}

int cmd_dynamic(const Options& o) {
    InstancePtr inst = load_single(o);
    PartitionPtr part = make_partition(o, inst.get());
    std::vector<double> amplitudes = o.amplitudes;
    if (amplitudes.empty()) amplitudes = {0.05, 0.25, 0.5, 0.75, 1.0};
    std::vector<af_algorithm> algs;
    if (o.algorithms.empty()) algs = {AF_FD_ADMM, AF_LAGR};
    for (const auto& name : o.algorithms) algs.push_back(algorithm_of(name));
    af_dynamic_config d;
    d.amplitudes = amplitudes.data();
    d.num_amplitudes = amplitudes.size();
    d.events = o.events;
    d.iterations_per_event = o.iters_per_event;
    d.seed = o.seed;
    d.algorithms = algs.data();
    d.num_algorithms = algs.size();
    d.compare_cold_start = o.cold_start ? 1 : 0;
    d.skip_settle = o.no_settle ? 1 : 0;
    const af_solver_config c = solver_config(o);
    const std::string summary = o.summary.empty() ? replace_extension(o.out, ".summary.csv") : o.summary;
    check(af_run_dynamic(inst.get(), part.get(), &d, &c, o.out.c_str(), summary.c_str()));
    return 0;
}

int cmd_sweep(const Options& o) {
    InstancePtr inst = load_single(o);
    PartitionPtr part = make_partition(o, inst.get());
    af_solver_config c = solver_config(o);
    std::vector<double> grid = o.grid;
    if (grid.empty()) {
        double center = 0.0;
        af_solver_config adaptive = c;
        adaptive.adaptive_lambda = 1;
        check(af_adaptive_lambda(inst.get(), part.get(), &adaptive, &center));
        for (int k = o.decade_lo; k <= o.decade_hi; ++k) grid.push_back(center * std::pow(10.0, k));
    }
    check(af_sweep_lambda(inst.get(), part.get(), grid.data(), grid.size(), &c, o.out.c_str()));
    return 0;
}

int cmd_loadcurve(const Options& o) {
    std::vector<InstancePtr> owned;
    if (!o.instances.empty()) {
        for (const auto& path : o.instances) owned.push_back(load(o, path));
    } else {
        for (int routes : o.routes) {
            af_generator_params p;
            af_generator_params_init(&p);
            p.seed = o.seed;
            p.nodes = o.nodes;
            p.links = o.links;
            p.routes = routes;
            p.capacity_min = o.capacity_min;
            p.capacity_max = o.capacity_max;
            p.weight_min = o.weight_min;
            p.weight_max = o.weight_max;
            p.alpha = std::isnan(o.alpha) ? 1.0 : o.alpha;
            af_instance* raw = nullptr;
            check(af_instance_generate(&p, &raw));
            owned.emplace_back(raw);
        }
    }
    std::vector<const af_instance*> list;
    for (const auto& p : owned) list.push_back(p.get());
    const af_solver_config c = solver_config(o);
    check(af_loadcurve(list.data(), list.size(), &c, o.out.c_str()));
    return 0;
}

void add_solver_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--lambda", o.lambda, "Reciprocal penalty: a positive value or 'adaptive'");
    cmd->add_option("--adapt-tau", o.tau, "Iterations during which the adaptive penalty is updated")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--tol-primal", o.tol_primal, "Primal residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--tol-dual", o.tol_dual, "Dual residual tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iters", o.max_iters, "Iteration cap")->check(CLI::NonNegativeNumber);
    cmd->add_option("--workers", o.workers, "Worker threads for the per-domain updates")->check(CLI::PositiveNumber);
    cmd->add_flag("--timing", o.timing, "Record wall time in the trace");
    cmd->add_option("--partition", o.partition, "Partition file (link to domain map)")->check(CLI::ExistingFile);
    cmd->add_option("--domains", o.domains, "Balanced partition into this many domains")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", o.alpha, "Override the fairness parameter")->check(CLI::NonNegativeNumber);
}

void add_generator_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--nodes", o.nodes, "Number of nodes")->check(CLI::PositiveNumber);
    cmd->add_option("--links", o.links, "Number of links")->check(CLI::NonNegativeNumber);
    cmd->add_option("--capacity-min", o.capacity_min, "Smallest link capacity")->check(CLI::PositiveNumber);
    cmd->add_option("--capacity-max", o.capacity_max, "Largest link capacity")->check(CLI::PositiveNumber);
    cmd->add_option("--weight-min", o.weight_min, "Smallest route weight")->check(CLI::PositiveNumber);
    cmd->add_option("--weight-max", o.weight_max, "Largest route weight")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"alpha-fair bandwidth allocation"};
    app.require_subcommand(1);
    Options o;
    const std::vector<std::string> algorithm_names{"c-admm", "fd-admm", "lagr"};

    auto* gen = app.add_subcommand("gen", "Generate a random instance");
    add_generator_flags(gen, o);
    gen->add_option("--routes", o.routes, "Number of routes")->expected(1)->check(CLI::NonNegativeNumber);
    gen->add_option("--alpha", o.alpha, "Fairness parameter")->check(CLI::NonNegativeNumber);
    gen->add_option("--out", o.out, "Instance file to write")->required();

    auto* solve = app.add_subcommand("solve", "Solve one instance");
    solve->add_option("--instance", o.instances, "Instance file")->required()->expected(1)->check(CLI::ExistingFile);
    solve->add_option("--algorithm", o.algorithms, "Algorithm")->expected(1)->check(CLI::IsMember(algorithm_names));
    add_solver_flags(solve, o);
    solve->add_option("--time-budget", o.time_budget, "Wall-clock budget in seconds (5 when given without a value)")
        ->expected(0, 1)
        ->default_str("")
        ->check(CLI::PositiveNumber | CLI::IsMember({""}));
    solve->add_option("--out", o.out, "Trace file to write");
    solve->add_option("--solution", o.solution, "Solution file (default: trace name with .solution.json)");
    solve->add_flag("--no-reference", o.no_reference, "Skip the reference solve and the gap column");

    auto* dynamic = app.add_subcommand("dynamic", "Warm-started tracking of drifting weights");
    dynamic->add_option("--instance", o.instances, "Instance file")->required()->expected(1)->check(CLI::ExistingFile);
    dynamic->add_option("--algorithm", o.algorithms, "Algorithms to run (repeatable)")
        ->check(CLI::IsMember(algorithm_names));
    add_solver_flags(dynamic, o);
    dynamic->add_option("--amplitude", o.amplitudes, "Weight-variation amplitudes in [0, 1] (repeatable)")
        ->check(CLI::Range(0.0, 1.0));
    dynamic->add_option("--events", o.events, "Number of weight events")->check(CLI::NonNegativeNumber);
    dynamic->add_option("--iters-per-event", o.iters_per_event, "Iterations between events")
        ->check(CLI::NonNegativeNumber);
    dynamic->add_option("--seed", o.seed, "Scenario seed");
    dynamic->add_flag("--cold-start", o.cold_start, "Also record the cold-start gap after each event");
    dynamic->add_flag("--no-settle", o.no_settle, "Start event 0 from the initial iterates instead of a converged run");
    dynamic->add_option("--out", o.out, "Trace file to write")->required();
    dynamic->add_option("--summary", o.summary, "Summary file (default: trace name with .summary.csv)");

    auto* sweep = app.add_subcommand("sweep-lambda", "Iterations to convergence over a penalty grid");
    sweep->add_option("--instance", o.instances, "Instance file")->required()->expected(1)->check(CLI::ExistingFile);
    add_solver_flags(sweep, o);
    sweep->add_option("--grid", o.grid, "Penalty values (default: adaptive value times 10^k)")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--decade-low", o.decade_lo, "Lowest exponent k of the default grid");
    sweep->add_option("--decade-high", o.decade_hi, "Highest exponent k of the default grid");
    sweep->add_option("--out", o.out, "Output file")->required();

    auto* loadcurve = app.add_subcommand("loadcurve", "Iterations against mean link load");
    loadcurve->add_option("--instance", o.instances, "Instance files (repeatable)")->check(CLI::ExistingFile);
    add_generator_flags(loadcurve, o);
    loadcurve->add_option("--routes", o.routes, "Route counts of generated instances (repeatable)")
        ->check(CLI::NonNegativeNumber);
    add_solver_flags(loadcurve, o);
    loadcurve->add_option("--out", o.out, "Output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    if (solve->parsed() && solve->count("--time-budget") > 0 && o.time_budget.empty()) o.time_budget = "5";

    try {
        if (gen->parsed()) return cmd_gen(o);
        if (solve->parsed()) return cmd_solve(o);
        if (dynamic->parsed()) return cmd_dynamic(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (loadcurve->parsed()) return cmd_loadcurve(o);
    } catch (const Failure& f) {
        return f.code;
    }
    return kExitUsage;
}
