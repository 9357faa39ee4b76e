#ifndef ALPHAFAIR_SOLVERS_HPP_
#define ALPHAFAIR_SOLVERS_HPP_

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "alphafair/fairness.hpp"
#include "alphafair/instance.hpp"
#include "alphafair/projection.hpp"
#include "alphafair/trace.hpp"

namespace alphafair {

struct Residuals {
    double primal = INFINITY;  // max over r and j in {0} u J_r of |z_jr - z~_r|
    double dual = INFINITY;    // max_r |z~_r^{k+1} - z~_r^k|
};

struct SolverConfig {
    double tol_primal = 1e-4;
    double tol_dual = 1e-4;
    long max_iters = 100000;
    std::optional<double> lambda;  // empty selects the adaptive penalty
    int tau = 30;
    double time_budget = 0.0;  // seconds, <= 0 disables
    int workers = 1;
    bool record_trace = true;
    bool record_timing = false;
    double lagr_initial_multiplier = 1.0;
    PolyhedronProjectionOptions projection{1e-11, 1000000};
};

// ---------------------------------------------------------------------------
// FD-ADMM

// Values one domain sends about a shared route after a round: the sum of its
// link copies z_pr and their minimum z*_pr.
struct RouteMessage {
    long round = 0;
    int route = 0;
    int from = 0;
    int to = 0;
    double z = 0.0;
    double z_star = 0.0;
};

// Topology-dependent index structure for FD-ADMM under a fixed partition.
struct FdAdmmLayout {
    struct Copy {
        int link;
        int slot;  // position of the route inside incidence.routes_of_link[link]
    };
    struct Segment {
        int domain;
        std::vector<Copy> copies;  // ascending link id
    };

    FdAdmmLayout(const Instance& instance, const Partition& partition);

    std::vector<double> capacities;
    Incidence incidence;
    Partition partition;
    // Per route, its link copies grouped by owning domain in ascending order.
    std::vector<std::vector<Segment>> segments;

    // Predicted floats sent per round over all domains: 2 sum_p sum_{q != p} |R_p n R_q|.
    double message_floats_per_round() const;
};

struct SolverState {
    std::vector<double> z0;
    std::vector<std::vector<double>> z_links;  // z_links[j] indexed like routes_of_link[j]
    std::vector<double> z_tilde;
    std::vector<std::vector<double>> u_links;
    std::vector<double> u0;
    Allocation z_star;
    long iteration = 0;
    PenaltyState penalty;
    Residuals residuals;
};

// Equal split per link, z0 = z~ = z* = per-route minimum of the splits, zero duals.
SolverState fdadmm_init(const FdAdmmLayout& layout, const PenaltyState& penalty = {});

// Messages every domain would send for the current link copies, grouped by
// sender (index 0 unused).
std::vector<std::vector<RouteMessage>> fdadmm_outboxes(const FdAdmmLayout& layout, const SolverState& state);

// One synchronous round over all domains.
void fdadmm_step(SolverState& state, const FdAdmmLayout& layout, const FairnessObjective& objective,
                 int workers = 1);
// fdadmm_step followed by the per-domain outboxes it produces.
std::vector<std::vector<RouteMessage>> fdadmm_round(SolverState& state, const FdAdmmLayout& layout,
                                                    const FairnessObjective& objective, int workers = 1);

// Switches to a new penalty, rescaling the scaled duals so the unscaled
// multipliers are unchanged.
void change_lambda(SolverState& state, double lambda);

// Applies the penalty adaptation for the current iteration. Returns true when
// lambda changed.
bool adapt_fdadmm_penalty(SolverState& state, const FdAdmmLayout& layout, const FairnessObjective& objective);

// ---------------------------------------------------------------------------
// C-ADMM

struct CAdmmState {
    std::vector<double> x;
    std::vector<double> z;
    std::vector<double> v;  // lambda-scaled dual
    Allocation z_star;
    long iteration = 0;
    PenaltyState penalty;
    Residuals residuals;  // primal: max |x - z|, dual: max |z^{k+1} - z^k|
};

CAdmmState cadmm_init(const Instance& instance, const Incidence& incidence, const PenaltyState& penalty = {});

// x <- prox(z - v); z <- P(x + v); v <- v + x - z. Also refreshes z_star, the
// exactly feasible extract of the per-link projections of z.
void cadmm_step(CAdmmState& state, const Instance& instance, const Incidence& incidence,
                const FairnessObjective& objective, double lambda, const PolyhedronProjectionOptions& projection);

Allocation cadmm_feasible_extract(const Instance& instance, const Incidence& incidence, std::span<const double> z);

// ---------------------------------------------------------------------------
// LAGR (dual gradient baseline)

struct LagrState {
    std::vector<double> x;
    std::vector<double> u;  // per-link multipliers, always > 0
    long iteration = 0;
    Residuals residuals;  // primal: max_j (load_j - C_j)^+, dual: max_r |x^{k+1} - x^k|
};

LagrState lagr_init(const Instance& instance, double initial_multiplier = 1.0);
void lagr_step(LagrState& state, const Instance& instance, const Incidence& incidence,
               const FairnessObjective& objective);

// Per-round floats of a domain-distributed LAGR: each domain sends its link
// prices to every other domain with a route through that link.
double lagr_message_floats_per_round(const Instance& instance, const Partition& partition);

// ---------------------------------------------------------------------------
// Common driver

class IterativeSolver {
 public:
    virtual ~IterativeSolver() = default;
    virtual Algorithm algorithm() const = 0;
    virtual void step() = 0;
    // Feasible extract for the ADMM variants, the raw iterate for LAGR.
    virtual const Allocation& allocation() const = 0;
    virtual Residuals residuals() const = 0;
    virtual long iteration() const = 0;
    virtual double lambda() const = 0;  // NaN for LAGR
    virtual double message_floats_per_round() const = 0;
    // Warm update of the route weights; iterates are kept.
    virtual void set_weights(std::span<const double> weights) = 0;
};

std::unique_ptr<IterativeSolver> make_solver(Algorithm algorithm, const Instance& instance,
                                             const Partition& partition, const SolverConfig& config);

struct SolveResult {
    Allocation allocation;
    std::optional<Allocation> best_feasible;
    double best_feasible_objective = -INFINITY;
    bool converged = false;
    long iterations = 0;
    double lambda = 0.0;
    Residuals residuals;
    Trace trace;
};

bool residuals_within(const Residuals& r, const SolverConfig& config);

// Runs until both residuals are within tolerance, the iteration cap, or the
// time budget. With a reference allocation the trace carries relative gaps.
SolveResult solve(const Instance& instance, const Partition& partition, Algorithm algorithm,
                  const SolverConfig& config, const Allocation* reference = nullptr);

// FD-ADMM on a single domain to 1e-6 residuals; throws SolverError if it does
// not converge. Without lambda the adaptive penalty is used, or lambda = 1 when
// alpha = 0.
SolveResult reference_solve(const Instance& instance, std::optional<double> lambda = {});
Allocation reference_solution(const Instance& instance, std::optional<double> lambda = {});

}  // namespace alphafair

#endif  // ALPHAFAIR_SOLVERS_HPP_
