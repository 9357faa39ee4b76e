#include "alphafair/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "alphafair/error.hpp"
#include "random.hpp"

namespace alphafair {

Scenario make_scenario(const Instance& base, double amplitude, int events, int iterations_per_event,
                       std::uint64_t seed) {
    if (!(amplitude >= 0.0 && amplitude <= 1.0)) throw InvalidArgument("amplitude must lie in [0, 1]");
    if (events < 0 || iterations_per_event < 0) throw InvalidArgument("event counts must be >= 0");
    Scenario s;
    s.base = base;
    s.amplitude = amplitude;
    s.events = events;
    s.iterations_per_event = iterations_per_event;
    s.seed = seed;
    detail::Rng rng(seed);
    std::vector<double> w;
    for (const auto& r : base.routes) w.push_back(r.weight);
    for (int t = 0; t < events; ++t) {
        for (double& wr : w) {
            const double lo = (1.0 - amplitude) * wr;
            const double hi = (1.0 + amplitude) * wr;
            wr = lo + (hi - lo) * rng.open_unit();
        }
        s.weights.push_back(w);
    }
    return s;
}

namespace {

Instance with_weights(const Instance& base, const std::vector<double>& w) {
    Instance inst = base;
    for (std::size_t r = 0; r < w.size(); ++r) inst.routes[r].weight = w[r];
    return inst;
}

}  // namespace

DynamicResult run_dynamic(const Instance& instance, const Partition& partition, const DynamicConfig& config) {
    require_valid(instance);
    if (config.amplitudes.empty()) throw InvalidArgument("no amplitudes given");
    if (config.algorithms.empty()) throw InvalidArgument("no algorithms given");
    DynamicResult result;
    for (double a : config.amplitudes) {
        const Scenario scenario =
            make_scenario(instance, a, config.events, config.iterations_per_event, config.seed);
        std::vector<std::unique_ptr<IterativeSolver>> solvers;
        for (Algorithm alg : config.algorithms) {
            solvers.push_back(make_solver(alg, instance, partition, config.solver));
            if (!config.settle_first) continue;
            IterativeSolver& s = *solvers.back();
            while (s.iteration() < config.solver.max_iters) {
                s.step();
                if (residuals_within(s.residuals(), config.solver)) break;
            }
        }

        struct Acc {
            double gap = 0.0, violation = 0.0, max_violation = 0.0, final_gap = 0.0;
            long rows = 0;
        };
        std::vector<Acc> acc(solvers.size());

        for (int t = 0; t < scenario.events; ++t) {
            const std::vector<double>& w = scenario.weights[t];
            const Instance current = with_weights(instance, w);
            const FairnessObjective objective = FairnessObjective::from(current);
            const double reference = utility(objective, reference_solution(current, config.solver.lambda));

            EventRecord event{a, t, NAN, NAN, NAN};
            for (std::size_t s = 0; s < solvers.size(); ++s) {
                IterativeSolver& solver = *solvers[s];
                solver.set_weights(w);
                double gap = NAN;
                for (int k = 0; k < scenario.iterations_per_event; ++k) {
                    solver.step();
                    const Allocation& x = solver.allocation();
                    const Residuals res = solver.residuals();
                    TraceRow row;
                    row.iteration = solver.iteration();
                    row.event = t;
                    row.algorithm = solver.algorithm();
                    row.objective = utility(objective, x);
                    row.gap = gap = relative_gap(row.objective, reference);
                    row.primal = res.primal;
                    row.dual = res.dual;
                    row.violation_pct = violated_percentage(current, x);
                    row.message_floats = solver.message_floats_per_round();
                    result.rows.push_back({a, row});
                    acc[s].gap += row.gap;
                    acc[s].violation += row.violation_pct;
                    acc[s].max_violation = std::max(acc[s].max_violation, row.violation_pct);
                    ++acc[s].rows;
                    if (k == 0 && solver.algorithm() == Algorithm::kFdAdmm) event.warm_first_gap = gap;
                }
                acc[s].final_gap += gap;
                if (solver.algorithm() == Algorithm::kFdAdmm) event.warm_final_gap = gap;
            }
            if (config.compare_cold_start) {
                auto cold = make_solver(Algorithm::kFdAdmm, current, partition, config.solver);
                cold->step();
                event.cold_first_gap = relative_gap(utility(objective, cold->allocation()), reference);
            }
            result.events.push_back(event);
        }
        for (std::size_t s = 0; s < solvers.size(); ++s) {
            const double n = static_cast<double>(std::max<long>(acc[s].rows, 1));
            const double e = static_cast<double>(std::max(scenario.events, 1));
            result.summary.push_back({a, solvers[s]->algorithm(), acc[s].gap / n, acc[s].violation / n,
                                      acc[s].max_violation, acc[s].final_gap / e});
        }
    }
    return result;
}

void write_dynamic_trace(std::ostream& out, const DynamicResult& result) {
    out << "amplitude,iteration,event,algorithm,objective,gap,primal_residual,dual_residual,violation_pct,"
           "message_floats,wall_time\n";
    for (const auto& [a, row] : result.rows) {
        out << format_number(a) << ',' << row.iteration << ',' << row.event << ',' << algorithm_name(row.algorithm)
            << ',' << format_number(row.objective) << ',' << format_number(row.gap) << ','
            << format_number(row.primal) << ',' << format_number(row.dual) << ','
            << format_number(row.violation_pct) << ',' << format_number(row.message_floats) << ','
            << format_number(row.wall_time) << '\n';
    }
}

void write_dynamic_summary(std::ostream& out, const DynamicResult& result) {
    out << "amplitude,algorithm,mean_gap,mean_violation_pct,max_violation_pct,mean_final_gap\n";
    for (const auto& s : result.summary) {
        out << format_number(s.amplitude) << ',' << algorithm_name(s.algorithm) << ',' << format_number(s.mean_gap)
            << ',' << format_number(s.mean_violation) << ',' << format_number(s.max_violation) << ','
            << format_number(s.final_gap) << '\n';
    }
}

std::vector<double> decade_grid(double center, int lo, int hi) {
    if (!(center > 0.0)) throw InvalidArgument("grid center must be > 0");
    if (lo > hi) throw InvalidArgument("empty lambda grid");
    std::vector<double> grid;
    for (int k = lo; k <= hi; ++k) grid.push_back(center * std::pow(10.0, k));
    return grid;
}

double adaptive_lambda(const Instance& instance, const Partition& partition, const SolverConfig& config) {
    SolverConfig c = config;
    c.lambda.reset();
    auto solver = make_solver(Algorithm::kFdAdmm, instance, partition, c);
    for (int k = 0; k < std::max(c.tau, 1); ++k) solver->step();
    return solver->lambda();
}

std::vector<SweepRow> sweep_lambda(const Instance& instance, const Partition& partition,
                                   const std::vector<double>& grid, const SolverConfig& config) {
    if (grid.empty()) throw InvalidArgument("empty lambda grid");
    std::vector<SweepRow> rows;
    SolverConfig c = config;
    c.record_trace = false;
    for (double lambda : grid) {
        c.lambda = lambda;
        const SolveResult r = solve(instance, partition, Algorithm::kFdAdmm, c);
        rows.push_back({false, lambda, r.iterations, r.converged});
    }
    c.lambda.reset();
    const SolveResult r = solve(instance, partition, Algorithm::kFdAdmm, c);
    rows.push_back({true, r.lambda, r.iterations, r.converged});
    return rows;
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "mode,lambda,iterations,converged\n";
    for (const auto& r : rows) {
        out << (r.adaptive ? "adaptive" : "fixed") << ',' << format_number(r.lambda) << ',' << r.iterations << ','
            << (r.converged ? 1 : 0) << '\n';
    }
}

LoadCurveRow loadcurve_point(const Instance& instance, const Partition& partition, const SolverConfig& config) {
    SolverConfig c = config;
    c.record_trace = false;
    const SolveResult r = solve(instance, partition, Algorithm::kFdAdmm, c);
    return {mean_link_load(instance), static_cast<long>(instance.num_routes()), r.iterations, r.converged};
}

void write_loadcurve(std::ostream& out, const std::vector<LoadCurveRow>& rows) {
    out << "mean_link_load,routes,iterations,converged\n";
    for (const auto& r : rows) {
        out << format_number(r.mean_link_load) << ',' << r.routes << ',' << r.iterations << ','
            << (r.converged ? 1 : 0) << '\n';
    }
}

}  // namespace alphafair
