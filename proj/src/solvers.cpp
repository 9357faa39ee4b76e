#include "alphafair/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "alphafair/error.hpp"
#include "kernels.hpp"
#include "parallel.hpp"

namespace alphafair {

// ---------------------------------------------------------------------------
// FD-ADMM

FdAdmmLayout::FdAdmmLayout(const Instance& instance, const Partition& p)
    : incidence(instance), partition(p), segments(instance.num_routes()) {
    if (p.domain_of_link.size() != instance.num_links()) {
        throw InvalidArgument("partition does not match the instance link count");
    }
    capacities.reserve(instance.num_links());
    for (const auto& l : instance.links) capacities.push_back(l.capacity);
    for (std::size_t j = 0; j < instance.num_links(); ++j) {
        const auto& routes = incidence.routes_of_link[j];
        for (std::size_t k = 0; k < routes.size(); ++k) {
            auto& segs = segments[routes[k]];
            const int domain = p.domain_of_link[j];
            auto it = std::find_if(segs.begin(), segs.end(), [&](const Segment& s) { return s.domain == domain; });
            if (it == segs.end()) {
                segs.push_back({domain, {}});
                it = std::prev(segs.end());
            }
            // Links are visited in ascending id, so copies stay sorted.
            it->copies.push_back({static_cast<int>(j), static_cast<int>(k)});
        }
    }
    for (auto& segs : segments) {
        std::sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.domain < b.domain; });
    }
}

double FdAdmmLayout::message_floats_per_round() const {
    double total = 0.0;
    for (const auto& segs : segments) {
        const double d = static_cast<double>(segs.size());
        total += 2.0 * d * (d - 1.0);
    }
    return total;
}

SolverState fdadmm_init(const FdAdmmLayout& layout, const PenaltyState& penalty) {
    const auto& inc = layout.incidence;
    SolverState s;
    const std::size_t n_links = inc.routes_of_link.size();
    s.z_links.resize(n_links);
    s.u_links.resize(n_links);
    for (std::size_t j = 0; j < n_links; ++j) {
        const std::size_t q = inc.routes_of_link[j].size();
        const double share = detail::equal_share(layout.capacities[j], q);
        s.z_links[j].assign(q, share);
        s.u_links[j].assign(q, 0.0);
    }
    s.z_star = feasible_extract(inc, s.z_links);
    s.z0 = s.z_star;
    s.z_tilde = s.z_star;
    s.u0.assign(s.z0.size(), 0.0);
    s.penalty = penalty;
    return s;
}

std::vector<std::vector<RouteMessage>> fdadmm_outboxes(const FdAdmmLayout& layout, const SolverState& state) {
    std::vector<std::vector<RouteMessage>> out(layout.partition.num_domains + 1);
    for (std::size_t r = 0; r < layout.segments.size(); ++r) {
        const auto& segs = layout.segments[r];
        if (segs.size() < 2) continue;
        for (const auto& from : segs) {
            double part = 0.0;
            double low = INFINITY;
            for (const auto& c : from.copies) {
                const double v = state.z_links[c.link][c.slot];
                part += v;
                low = std::min(low, v);
            }
            for (const auto& to : segs) {
                if (to.domain == from.domain) continue;
                out[from.domain].push_back(
                    {state.iteration, static_cast<int>(r), from.domain, to.domain, part, low});
            }
        }
    }
    return out;
}

void fdadmm_step(SolverState& state, const FdAdmmLayout& layout, const FairnessObjective& objective,
                 int workers) {
    const auto& inc = layout.incidence;
    const std::size_t n_routes = inc.links_of_route.size();
    const std::size_t n_links = inc.routes_of_link.size();
    const double lambda = state.penalty.lambda;

    std::vector<double> z_tilde(n_routes);
    detail::parallel_for(n_routes, workers, [&](std::size_t r) {
        double acc = 0.0;
        for (const auto& seg : layout.segments[r]) {
            double part = 0.0;
            for (const auto& c : seg.copies) part += state.z_links[c.link][c.slot];
            acc += part;
        }
        z_tilde[r] = detail::consensus_value(acc, state.z0[r], inc.links_of_route[r].size());
    });

    double dual = 0.0;
    for (std::size_t r = 0; r < n_routes; ++r) dual = std::max(dual, std::abs(z_tilde[r] - state.z_tilde[r]));
    state.z_tilde = std::move(z_tilde);

    detail::parallel_for(n_links, workers, [&](std::size_t j) {
        thread_local std::vector<double> scratch;
        const auto& routes = inc.routes_of_link[j];
        detail::link_update(
            layout.capacities[j], [&](std::size_t k) { return state.z_tilde[routes[k]]; }, state.u_links[j],
            state.z_links[j], scratch);
    });
    detail::parallel_for(n_routes, workers, [&](std::size_t r) {
        detail::route_update(objective.alpha, objective.weights[r], lambda, state.z_tilde[r], state.u0[r],
                             state.z0[r]);
    });

    double primal = 0.0;
    for (std::size_t j = 0; j < n_links; ++j) {
        const auto& routes = inc.routes_of_link[j];
        for (std::size_t k = 0; k < routes.size(); ++k) {
            primal = std::max(primal, std::abs(state.z_links[j][k] - state.z_tilde[routes[k]]));
        }
    }
    for (std::size_t r = 0; r < n_routes; ++r) primal = std::max(primal, std::abs(state.z0[r] - state.z_tilde[r]));
    state.z_star = feasible_extract(inc, state.z_links);
    state.residuals = {primal, dual};
    ++state.iteration;
}

std::vector<std::vector<RouteMessage>> fdadmm_round(SolverState& state, const FdAdmmLayout& layout,
                                                    const FairnessObjective& objective, int workers) {
    fdadmm_step(state, layout, objective, workers);
    return fdadmm_outboxes(layout, state);
}

void change_lambda(SolverState& state, double lambda) {
    const double ratio = lambda / state.penalty.lambda;
    for (auto& u : state.u_links) {
        for (auto& v : u) v *= ratio;
    }
    for (auto& v : state.u0) v *= ratio;
    state.penalty.lambda = lambda;
}

bool adapt_fdadmm_penalty(SolverState& state, const FdAdmmLayout& layout, const FairnessObjective& objective) {
    if (state.penalty.frozen) return false;
    const PenaltyState next = adapt_penalty(state.penalty, state.iteration, state.z_star, objective.alpha,
                                            objective.weights, layout.incidence.bottleneck);
    const bool changed = next.lambda != state.penalty.lambda;
    if (changed) change_lambda(state, next.lambda);
    state.penalty = next;
    return changed;
}

// ---------------------------------------------------------------------------
// C-ADMM

Allocation cadmm_feasible_extract(const Instance& instance, const Incidence& incidence, std::span<const double> z) {
    std::vector<std::vector<double>> copies(instance.num_links());
    std::vector<double> y;
    for (std::size_t j = 0; j < copies.size(); ++j) {
        const auto& routes = incidence.routes_of_link[j];
        y.resize(routes.size());
        for (std::size_t k = 0; k < routes.size(); ++k) y[k] = z[routes[k]];
        copies[j] = project_link(instance.links[j].capacity, y);
    }
    return feasible_extract(incidence, copies);
}

CAdmmState cadmm_init(const Instance& instance, const Incidence& incidence, const PenaltyState& penalty) {
    std::vector<std::vector<double>> split(instance.num_links());
    for (std::size_t j = 0; j < split.size(); ++j) {
        const std::size_t q = incidence.routes_of_link[j].size();
        split[j].assign(q, detail::equal_share(instance.links[j].capacity, q));
    }
    CAdmmState s;
    s.z = feasible_extract(incidence, split);
    s.x = s.z;
    s.v.assign(s.z.size(), 0.0);
    s.z_star = s.z;
    s.penalty = penalty;
    return s;
}

void cadmm_step(CAdmmState& state, const Instance& instance, const Incidence& incidence,
                const FairnessObjective& objective, double lambda, const PolyhedronProjectionOptions& projection) {
    const std::size_t n = state.z.size();
    std::vector<double> shifted(n);
    for (std::size_t r = 0; r < n; ++r) {
        state.x[r] = prox(objective, static_cast<int>(r), state.z[r] - state.v[r], lambda);
        shifted[r] = state.x[r] + state.v[r];
    }
    std::vector<double> z = project_polyhedron(instance, incidence, shifted, projection);
    double primal = 0.0;
    double dual = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        state.v[r] = state.v[r] + state.x[r] - z[r];
        primal = std::max(primal, std::abs(state.x[r] - z[r]));
        dual = std::max(dual, std::abs(z[r] - state.z[r]));
    }
    state.z = std::move(z);
    state.z_star = cadmm_feasible_extract(instance, incidence, state.z);
    state.residuals = {primal, dual};
    ++state.iteration;
}

// ---------------------------------------------------------------------------
// LAGR

LagrState lagr_init(const Instance& instance, double initial_multiplier) {
    if (!(initial_multiplier > 0.0)) throw InvalidArgument("LAGR multipliers must start positive");
    LagrState s;
    s.x.assign(instance.num_routes(), 0.0);
    s.u.assign(instance.num_links(), initial_multiplier);
    return s;
}

void lagr_step(LagrState& state, const Instance& instance, const Incidence& incidence,
               const FairnessObjective& objective) {
    const double alpha = objective.alpha;
    double dual = 0.0;
    for (std::size_t r = 0; r < state.x.size(); ++r) {
        double price = 0.0;
        for (int j : incidence.links_of_route[r]) price += state.u[j];
        const double w = objective.weights[r];
        double x;
        if (alpha == 0.0) {
            if (price <= w) throw SolverError("LAGR: unbounded rate update for alpha = 0 (route " +
                                              std::to_string(r) + ")");
            x = 0.0;
        } else if (alpha == 1.0) {
            x = w / price;
        } else {
            x = std::pow(w / price, 1.0 / alpha);
        }
        dual = std::max(dual, std::abs(x - state.x[r]));
        state.x[r] = x;
    }
    double primal = 0.0;
    for (std::size_t j = 0; j < state.u.size(); ++j) {
        double load = 0.0;
        for (int r : incidence.routes_of_link[j]) load += state.x[r];
        const double c = instance.links[j].capacity;
        // Idle links halve their price each step; keep it off zero.
        state.u[j] = std::max(state.u[j] - (state.u[j] / (2.0 * c)) * (c - load), std::numeric_limits<double>::min());
        primal = std::max(primal, load - c);
    }
    state.residuals = {primal, dual};
    ++state.iteration;
}

double lagr_message_floats_per_round(const Instance& instance, const Partition& partition) {
    Incidence inc(instance);
    double total = 0.0;
    for (std::size_t j = 0; j < instance.num_links(); ++j) {
        std::set<int> peers;
        for (int r : inc.routes_of_link[j]) {
            for (int q : partition.domains_of_route[r]) {
                if (q != 0 && q != partition.domain_of_link[j]) peers.insert(q);
            }
        }
        total += static_cast<double>(peers.size());
    }
    return total;
}

// ---------------------------------------------------------------------------
// Solver objects

namespace {

void check_penalty_config(const Instance& instance, const SolverConfig& config) {
    if (config.lambda) {
        if (!(*config.lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
    } else if (!(instance.alpha > 0.0)) {
        throw InvalidArgument("adaptive lambda is unavailable for alpha = 0; pass an explicit lambda");
    }
    if (config.tau < 0) throw InvalidArgument("adaptation threshold must be >= 0");
}

PenaltyState initial_penalty(const SolverConfig& config) {
    if (config.lambda) return {*config.lambda, config.tau, true};
    return {1.0, config.tau, false};
}

class FdAdmmSolver final : public IterativeSolver {
 public:
    FdAdmmSolver(const Instance& instance, const Partition& partition, const SolverConfig& config)
        : layout_(instance, partition),
          objective_(FairnessObjective::from(instance)),
          state_(fdadmm_init(layout_, initial_penalty(config))),
          workers_(config.workers) {}

    Algorithm algorithm() const override { return Algorithm::kFdAdmm; }
    void step() override {
        adapt_fdadmm_penalty(state_, layout_, objective_);
        fdadmm_step(state_, layout_, objective_, workers_);
    }
    const Allocation& allocation() const override { return state_.z_star; }
    Residuals residuals() const override { return state_.residuals; }
    long iteration() const override { return state_.iteration; }
    double lambda() const override { return state_.penalty.lambda; }
    double message_floats_per_round() const override { return layout_.message_floats_per_round(); }
    void set_weights(std::span<const double> w) override { objective_.weights.assign(w.begin(), w.end()); }

 private:
    FdAdmmLayout layout_;
    FairnessObjective objective_;
    SolverState state_;
    int workers_;
};

class CAdmmSolver final : public IterativeSolver {
 public:
    CAdmmSolver(const Instance& instance, const SolverConfig& config)
        : instance_(instance),
          incidence_(instance),
          objective_(FairnessObjective::from(instance)),
          state_(cadmm_init(instance_, incidence_, initial_penalty(config))),
          projection_(config.projection) {}

    Algorithm algorithm() const override { return Algorithm::kCAdmm; }
    void step() override {
        if (!state_.penalty.frozen) {
            const PenaltyState next = adapt_penalty(state_.penalty, state_.iteration, state_.z_star,
                                                    objective_.alpha, objective_.weights, incidence_.bottleneck);
            if (next.lambda != state_.penalty.lambda) {
                const double ratio = next.lambda / state_.penalty.lambda;
                for (auto& v : state_.v) v *= ratio;
            }
            state_.penalty = next;
        }
        cadmm_step(state_, instance_, incidence_, objective_, state_.penalty.lambda, projection_);
    }
    const Allocation& allocation() const override { return state_.z_star; }
    Residuals residuals() const override { return state_.residuals; }
    long iteration() const override { return state_.iteration; }
    double lambda() const override { return state_.penalty.lambda; }
    double message_floats_per_round() const override { return 0.0; }
    void set_weights(std::span<const double> w) override { objective_.weights.assign(w.begin(), w.end()); }

 private:
    Instance instance_;
    Incidence incidence_;
    FairnessObjective objective_;
    CAdmmState state_;
    PolyhedronProjectionOptions projection_;
};

class LagrSolver final : public IterativeSolver {
 public:
    LagrSolver(const Instance& instance, const Partition& partition, const SolverConfig& config)
        : instance_(instance),
          incidence_(instance),
          objective_(FairnessObjective::from(instance)),
          state_(lagr_init(instance, config.lagr_initial_multiplier)),
          floats_(lagr_message_floats_per_round(instance, partition)) {}

    Algorithm algorithm() const override { return Algorithm::kLagr; }
    void step() override { lagr_step(state_, instance_, incidence_, objective_); }
    const Allocation& allocation() const override { return state_.x; }
    Residuals residuals() const override { return state_.residuals; }
    long iteration() const override { return state_.iteration; }
    double lambda() const override { return NAN; }
    double message_floats_per_round() const override { return floats_; }
    void set_weights(std::span<const double> w) override { objective_.weights.assign(w.begin(), w.end()); }

 private:
    Instance instance_;
    Incidence incidence_;
    FairnessObjective objective_;
    LagrState state_;
    double floats_;
};

}  // namespace

std::unique_ptr<IterativeSolver> make_solver(Algorithm algorithm, const Instance& instance,
                                             const Partition& partition, const SolverConfig& config) {
    require_valid(instance);
    switch (algorithm) {
        case Algorithm::kFdAdmm:
            check_penalty_config(instance, config);
            return std::make_unique<FdAdmmSolver>(instance, partition, config);
        case Algorithm::kCAdmm:
            check_penalty_config(instance, config);
            return std::make_unique<CAdmmSolver>(instance, config);
        case Algorithm::kLagr:
            return std::make_unique<LagrSolver>(instance, partition, config);
    }
    throw InvalidArgument("unknown algorithm");
}

bool residuals_within(const Residuals& r, const SolverConfig& config) {
    return r.primal <= config.tol_primal && r.dual <= config.tol_dual;
}

SolveResult solve(const Instance& instance, const Partition& partition, Algorithm algorithm,
                  const SolverConfig& config, const Allocation* reference) {
    if (config.max_iters < 0) throw InvalidArgument("max_iters must be >= 0");
    auto solver = make_solver(algorithm, instance, partition, config);
    const FairnessObjective objective = FairnessObjective::from(instance);
    const double reference_objective = reference ? utility(objective, *reference) : NAN;
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    SolveResult result;
    auto consider_best = [&](const Allocation& x, double value) {
        if (violated_percentage(instance, x) == 0.0 && value > result.best_feasible_objective) {
            result.best_feasible = x;
            result.best_feasible_objective = value;
        }
    };
    if (algorithm != Algorithm::kLagr) consider_best(solver->allocation(), utility(objective, solver->allocation()));

    while (solver->iteration() < config.max_iters) {
        solver->step();
        const Allocation& x = solver->allocation();
        const double value = utility(objective, x);
        consider_best(x, value);
        const Residuals res = solver->residuals();
        if (config.record_trace) {
            TraceRow row;
            row.iteration = solver->iteration();
            row.algorithm = algorithm;
            row.objective = value;
            row.gap = relative_gap(value, reference_objective);
            row.primal = res.primal;
            row.dual = res.dual;
            row.violation_pct = violated_percentage(instance, x);
            row.message_floats = solver->message_floats_per_round();
            row.wall_time = config.record_timing ? elapsed() : 0.0;
            result.trace.rows.push_back(row);
        }
        if (residuals_within(res, config)) {
            result.converged = true;
            break;
        }
        if (config.time_budget > 0.0 && elapsed() >= config.time_budget) break;
    }
    result.allocation = solver->allocation();
    result.iterations = solver->iteration();
    result.lambda = solver->lambda();
    result.residuals = solver->residuals();
    return result;
}

SolveResult reference_solve(const Instance& instance, std::optional<double> lambda) {
    SolverConfig config;
    config.tol_primal = 1e-6;
    config.tol_dual = 1e-6;
    config.max_iters = 2000000;
    config.lambda = lambda;
    if (!lambda && instance.alpha == 0.0) config.lambda = 1.0;
    SolveResult result = solve(instance, single_domain_partition(instance), Algorithm::kFdAdmm, config);
    if (!result.converged) throw SolverError("reference solve did not reach 1e-6 residuals");
    return result;
}

Allocation reference_solution(const Instance& instance, std::optional<double> lambda) {
    return reference_solve(instance, lambda).allocation;
}

}  // namespace alphafair
