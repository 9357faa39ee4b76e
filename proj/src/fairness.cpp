#include "alphafair/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alphafair/error.hpp"

namespace alphafair {

FairnessObjective FairnessObjective::from(const Instance& instance) {
    FairnessObjective obj;
    obj.alpha = instance.alpha;
    obj.weights.reserve(instance.num_routes());
    for (const auto& r : instance.routes) obj.weights.push_back(r.weight);
    return obj;
}

double route_utility(double alpha, double weight, double x) {
    if (alpha == 1.0) return x > 0.0 ? weight * std::log(x) : -INFINITY;
    if (x <= 0.0) return alpha > 1.0 ? -INFINITY : 0.0;
    return weight * std::pow(x, 1.0 - alpha) / (1.0 - alpha);
}

double utility(const FairnessObjective& objective, std::span<const double> x) {
    if (x.size() != objective.weights.size()) throw InvalidArgument("allocation size does not match weights");
    double total = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r) total += route_utility(objective.alpha, objective.weights[r], x[r]);
    return total;
}

double cost_gradient(double alpha, double weight, double x) {
    if (alpha == 0.0) return -weight;
    return -weight * std::pow(x, -alpha);
}

double prox(double alpha, double weight, double v, double lambda) {
    if (!(lambda > 0.0)) throw InvalidArgument("prox requires lambda > 0");
    const double lw = lambda * weight;
    if (alpha == 0.0) return std::max(v + lw, 0.0);
    if (alpha == 1.0) {
        const double root = std::sqrt(v * v + 4.0 * lw);
        return v >= 0.0 ? 0.5 * (v + root) : 2.0 * lw / (root - v);
    }

    // phi(x) = x^a (x - v) - lw is increasing on x > max(v, 0) and negative at
    // the left end of the bracket.
    auto phi = [&](double x) { return std::pow(x, alpha) * (x - v) - lw; };
    double lo = std::max(v, 0.0);
    double hi = lo + lw;
    for (int widen = 0; phi(hi) <= 0.0; ++widen) {
        if (widen > 2000) throw SolverError("prox: could not bracket root");
        hi = lo + 2.0 * (hi - lo);
    }

    // Iterate to full double precision; the residual of phi then sits at
    // rounding level.
    double x = hi;
    for (int step = 0; step < 500; ++step) {
        const double f = phi(x);
        if (f == 0.0) return x;
        if (f < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return x;
        // Newton on the equivalent x - v - lw x^{-a} = 0, which is better
        // scaled when x is large.
        const double xa = std::pow(x, -alpha);
        const double psi = x - v - lw * xa;
        const double dpsi = 1.0 + alpha * lw * xa / x;
        double next = x - psi / dpsi;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 2.0 * std::numeric_limits<double>::epsilon() * x) return next;
        x = next;
    }
    throw SolverError("prox: root finder did not converge");
}

double modulus_term(double alpha, double weight, double point) { return weight / std::pow(point, alpha + 1.0); }

Moduli moduli(double alpha, std::span<const double> weights, std::span<const double> bottlenecks,
              std::span<const double> floor) {
    if (!(alpha > 0.0)) throw InvalidArgument("moduli are degenerate for alpha = 0; supply lambda explicitly");
    if (weights.empty()) throw InvalidArgument("moduli need at least one route");
    if (bottlenecks.size() != weights.size() || floor.size() != weights.size()) {
        throw InvalidArgument("moduli: size mismatch");
    }
    double min_term = INFINITY;
    double max_term = 0.0;
    for (std::size_t r = 0; r < weights.size(); ++r) {
        if (!(floor[r] > 0.0)) throw InvalidArgument("moduli: floor must be > 0 for route " + std::to_string(r));
        if (!(bottlenecks[r] > 0.0)) throw InvalidArgument("moduli: bottleneck must be > 0");
        min_term = std::min(min_term, modulus_term(alpha, weights[r], bottlenecks[r]));
        max_term = std::max(max_term, modulus_term(alpha, weights[r], floor[r]));
    }
    Moduli m;
    m.sigma = alpha * min_term;
    m.lipschitz = alpha * max_term;
    m.bottlenecks.assign(bottlenecks.begin(), bottlenecks.end());
    m.floor.assign(floor.begin(), floor.end());
    return m;
}

Moduli moduli(const Instance& instance, const FairnessObjective& objective, std::span<const double> floor) {
    Incidence inc(instance);
    return moduli(objective.alpha, objective.weights, inc.bottleneck, floor);
}

double optimal_lambda(double sigma, double lipschitz) {
    if (!(sigma > 0.0) || !(lipschitz > 0.0)) throw InvalidArgument("optimal_lambda needs sigma, L > 0");
    return 1.0 / std::sqrt(sigma * lipschitz);
}

double optimal_lambda(const Moduli& m) { return optimal_lambda(m.sigma, m.lipschitz); }

PenaltyTerms penalty_terms(double alpha, std::span<const double> weights, std::span<const double> bottlenecks,
                           std::span<const double> point) {
    if (bottlenecks.size() != weights.size() || point.size() != weights.size()) {
        throw InvalidArgument("penalty_terms: size mismatch");
    }
    PenaltyTerms t;
    for (std::size_t r = 0; r < weights.size(); ++r) {
        t.empty = false;
        t.min_bottleneck_term = std::min(t.min_bottleneck_term, modulus_term(alpha, weights[r], bottlenecks[r]));
        if (!(point[r] > 0.0)) {
            t.nonpositive_point = true;
            continue;
        }
        t.max_point_term = std::max(t.max_point_term, modulus_term(alpha, weights[r], point[r]));
    }
    return t;
}

PenaltyTerms combine(const PenaltyTerms& a, const PenaltyTerms& b) {
    return {std::min(a.min_bottleneck_term, b.min_bottleneck_term), std::max(a.max_point_term, b.max_point_term),
            a.nonpositive_point || b.nonpositive_point, a.empty && b.empty};
}

PenaltyState adapt_penalty(const PenaltyState& state, long iteration, double alpha, const PenaltyTerms& terms) {
    if (state.frozen || iteration >= state.tau) return {state.lambda, state.tau, true};
    if (!(alpha > 0.0)) throw InvalidArgument("penalty adaptation is unavailable for alpha = 0");
    if (terms.empty || terms.nonpositive_point) return state;
    PenaltyState next = state;
    next.lambda = optimal_lambda(alpha * terms.min_bottleneck_term, alpha * terms.max_point_term);
    return next;
}

PenaltyState adapt_penalty(const PenaltyState& state, long iteration, std::span<const double> feasible_point,
                           double alpha, std::span<const double> weights, std::span<const double> bottlenecks) {
    if (state.frozen || iteration >= state.tau) return {state.lambda, state.tau, true};
    return adapt_penalty(state, iteration, alpha, penalty_terms(alpha, weights, bottlenecks, feasible_point));
}

}  // namespace alphafair
