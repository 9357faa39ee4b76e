#ifndef ALPHAFAIR_EXPERIMENTS_HPP_
#define ALPHAFAIR_EXPERIMENTS_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "alphafair/instance.hpp"
#include "alphafair/solvers.hpp"
#include "alphafair/trace.hpp"

namespace alphafair {

// Real-time scenario: weights drift by a random factor in [1 - a, 1 + a] at
// every event.
struct Scenario {
    Instance base;
    double amplitude = 0.0;
    int events = 20;
    int iterations_per_event = 10;
    std::uint64_t seed = 1;
    // weights[t] is the weight vector in force during event t.
    std::vector<std::vector<double>> weights;
};

// The draws depend only on the seed, so scenarios with different amplitudes
// share their random numbers.
Scenario make_scenario(const Instance& base, double amplitude, int events, int iterations_per_event,
                       std::uint64_t seed);

struct DynamicConfig {
    std::vector<double> amplitudes{0.05, 0.25, 0.5, 0.75, 1.0};
    int events = 20;
    int iterations_per_event = 10;
    std::uint64_t seed = 1;
    std::vector<Algorithm> algorithms{Algorithm::kFdAdmm, Algorithm::kLagr};
    SolverConfig solver;
    // Also run a cold-started FD-ADMM for one iteration after each event.
    bool compare_cold_start = false;
    // Run every algorithm to the solver tolerances on the base weights before
    // the first event, so event 0 already starts from a tracked allocation.
    bool settle_first = true;
};

struct DynamicSummaryRow {
    double amplitude = 0.0;
    Algorithm algorithm = Algorithm::kFdAdmm;
    double mean_gap = 0.0;
    double mean_violation = 0.0;  // percent of links
    double max_violation = 0.0;
    double final_gap = 0.0;       // mean over events of the gap after the last iteration
};

struct EventRecord {
    double amplitude = 0.0;
    int event = 0;
    double warm_first_gap = 0.0;
    double cold_first_gap = 0.0;
    double warm_final_gap = 0.0;
};

struct DynamicRow {
    double amplitude = 0.0;
    TraceRow row;
};

struct DynamicResult {
    std::vector<DynamicRow> rows;
    std::vector<DynamicSummaryRow> summary;
    std::vector<EventRecord> events;  // FD-ADMM only
};

// For every amplitude and event: perturb the weights, compute the reference,
// then run the warm-started algorithms for the configured iterations.
DynamicResult run_dynamic(const Instance& instance, const Partition& partition, const DynamicConfig& config);

void write_dynamic_trace(std::ostream& out, const DynamicResult& result);
void write_dynamic_summary(std::ostream& out, const DynamicResult& result);

struct SweepRow {
    bool adaptive = false;
    double lambda = 0.0;
    long iterations = 0;
    bool converged = false;
};

// lambda * 10^k for k in [lo, hi].
std::vector<double> decade_grid(double center, int lo, int hi);

// Penalty value the adaptation settles on (the value after the last update).
double adaptive_lambda(const Instance& instance, const Partition& partition, const SolverConfig& config);

// FD-ADMM iterations to convergence for each fixed lambda, followed by one
// adaptive run.
std::vector<SweepRow> sweep_lambda(const Instance& instance, const Partition& partition,
                                   const std::vector<double>& grid, const SolverConfig& config);
void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows);

struct LoadCurveRow {
    double mean_link_load = 0.0;
    long routes = 0;
    long iterations = 0;
    bool converged = false;
};

LoadCurveRow loadcurve_point(const Instance& instance, const Partition& partition, const SolverConfig& config);
void write_loadcurve(std::ostream& out, const std::vector<LoadCurveRow>& rows);

}  // namespace alphafair

#endif  // ALPHAFAIR_EXPERIMENTS_HPP_
