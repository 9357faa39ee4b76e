#ifndef ALPHAFAIR_FAIRNESS_HPP_
#define ALPHAFAIR_FAIRNESS_HPP_

#include <cmath>
#include <span>
#include <vector>

#include "alphafair/instance.hpp"

namespace alphafair {

// The weighted alpha-fair utility f(x) = sum_r w_r x_r^{1-a}/(1-a) (w_r log x_r
// when a = 1). Routes minimize the convex cost g_r = -f_r.
struct FairnessObjective {
    double alpha = 1.0;
    std::vector<double> weights;

    static FairnessObjective from(const Instance& instance);
};

// Single-route utility; -inf at x = 0 when alpha >= 1.
double route_utility(double alpha, double weight, double x);

double utility(const FairnessObjective& objective, std::span<const double> x);

// Derivative of the cost g_r, i.e. -w x^{-alpha}.
double cost_gradient(double alpha, double weight, double x);

// argmin_x { g_r(x) + (x - v)^2 / (2 lambda) }.
//
// alpha = 0 and alpha = 1 have closed forms. Otherwise the minimizer is the
// unique positive root of x^alpha (x - v) = lambda w, found with Newton steps
// safeguarded by bisection on a bracket that is widened until it straddles
// the root.
double prox(double alpha, double weight, double v, double lambda);

inline double prox(const FairnessObjective& objective, int route, double v, double lambda) {
    return prox(objective.alpha, objective.weights[route], v, lambda);
}

// Strong-convexity and gradient-Lipschitz moduli of g on {x >= d, Ax <= C}.
struct Moduli {
    double sigma = 0.0;
    double lipschitz = 0.0;
    std::vector<double> bottlenecks;
    std::vector<double> floor;
};

// Per-route terms entering the moduli: w / B^{a+1} and w / d^{a+1}.
double modulus_term(double alpha, double weight, double point);

// sigma = a min_r w_r / B_r^{a+1}, L = a max_r w_r / d_r^{a+1}.
Moduli moduli(double alpha, std::span<const double> weights, std::span<const double> bottlenecks,
              std::span<const double> floor);
Moduli moduli(const Instance& instance, const FairnessObjective& objective, std::span<const double> floor);

// (sigma L)^{-1/2}: the rate-optimal reciprocal penalty when the coupling
// matrix is the identity.
double optimal_lambda(const Moduli& m);
double optimal_lambda(double sigma, double lipschitz);

struct PenaltyState {
    double lambda = 1.0;
    int tau = 30;
    bool frozen = false;
};

// Extremes entering the penalty adaptation, min_r w_r/B_r^{a+1} and
// max_r w_r/p_r^{a+1}, over some subset of routes. Partial terms computed by
// different domains combine exactly with combine().
struct PenaltyTerms {
    double min_bottleneck_term = INFINITY;
    double max_point_term = 0.0;
    bool nonpositive_point = false;
    bool empty = true;
};

PenaltyTerms penalty_terms(double alpha, std::span<const double> weights, std::span<const double> bottlenecks,
                           std::span<const double> point);
PenaltyTerms combine(const PenaltyTerms& a, const PenaltyTerms& b);

// Reciprocal penalty adaptation. Below tau the penalty is re-estimated from the
// latest feasible point p (used as the disagreement point):
//   lambda = (1/a) (min_r w_r/B_r^{a+1} * max_r w_r/p_r^{a+1})^{-1/2},
// which is optimal_lambda(moduli(..., floor = p)). From tau on the state is
// frozen. An update is skipped when some p_r <= 0.
PenaltyState adapt_penalty(const PenaltyState& state, long iteration, std::span<const double> feasible_point,
                           double alpha, std::span<const double> weights, std::span<const double> bottlenecks);
PenaltyState adapt_penalty(const PenaltyState& state, long iteration, double alpha, const PenaltyTerms& terms);

}  // namespace alphafair

#endif  // ALPHAFAIR_FAIRNESS_HPP_
