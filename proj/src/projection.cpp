#include "alphafair/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alphafair/error.hpp"

namespace alphafair {

namespace {

double ordered_sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

void project_link(double capacity, std::span<const double> y, std::span<double> out) {
    const std::size_t q = y.size();
    if (out.size() != q) throw InvalidArgument("project_link: output size mismatch");
    for (std::size_t i = 0; i < q; ++i) out[i] = std::max(y[i], 0.0);
    if (ordered_sum(out) <= capacity) return;

    // Clipped point overloads the link: the projection lies on sum x = C.
    thread_local std::vector<std::size_t> order;
    thread_local std::vector<double> clipped;
    order.resize(q);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out[a] > out[b] || (out[a] == out[b] && a < b);
    });
    double prefix = 0.0;
    double theta = 0.0;
    std::size_t active = 0;
    for (std::size_t k = 0; k < q; ++k) {
        const double c = out[order[k]];
        if (c <= 0.0) break;
        prefix += c;
        const double t = (prefix - capacity) / static_cast<double>(k + 1);
        if (c - t > 0.0) {
            theta = t;
            active = k + 1;
        }
    }
    clipped.assign(out.begin(), out.end());
    for (;;) {
        for (std::size_t i = 0; i < q; ++i) out[i] = std::max(clipped[i] - theta, 0.0);
        const double s = ordered_sum(out);
        if (s <= capacity) return;
        // Rounding left the sum a few ulps above C; nudge the threshold.
        theta += std::max((s - capacity) / static_cast<double>(std::max<std::size_t>(active, 1)),
                          std::nextafter(theta, INFINITY) - theta);
    }
}

std::vector<double> project_link(double capacity, std::span<const double> y) {
    std::vector<double> out(y.size());
    project_link(capacity, y, out);
    return out;
}

std::vector<double> project_polyhedron(const Instance& instance, std::span<const double> y,
                                       const PolyhedronProjectionOptions& options) {
    Incidence inc(instance);
    return project_polyhedron(instance, inc, y, options);
}

std::vector<double> project_polyhedron(const Instance& instance, const Incidence& incidence,
                                       std::span<const double> y, const PolyhedronProjectionOptions& options) {
    if (!(options.tolerance > 0.0)) throw InvalidArgument("projection tolerance must be > 0");
    const std::size_t n = instance.num_routes();
    if (y.size() != n) throw InvalidArgument("project_polyhedron: point size mismatch");
    const std::size_t m = instance.num_links();

    std::vector<double> x(y.begin(), y.end());
    std::vector<std::vector<double>> corr(m);
    for (std::size_t j = 0; j < m; ++j) corr[j].assign(incidence.routes_of_link[j].size(), 0.0);
    std::vector<double> corr_orthant(n, 0.0);
    std::vector<double> shifted, projected;

    double change = INFINITY;
    for (long cycle = 0; cycle < options.max_cycles; ++cycle) {
        double moved = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const auto& routes = incidence.routes_of_link[j];
            shifted.resize(routes.size());
            projected.resize(routes.size());
            for (std::size_t k = 0; k < routes.size(); ++k) shifted[k] = x[routes[k]] + corr[j][k];
            project_link(instance.links[j].capacity, shifted, projected);
            for (std::size_t k = 0; k < routes.size(); ++k) {
                const double c = shifted[k] - projected[k];
                moved += (c - corr[j][k]) * (c - corr[j][k]);
                corr[j][k] = c;
                x[routes[k]] = projected[k];
            }
        }
        for (std::size_t r = 0; r < n; ++r) {
            const double s = x[r] + corr_orthant[r];
            const double p = std::max(s, 0.0);
            const double c = s - p;
            moved += (c - corr_orthant[r]) * (c - corr_orthant[r]);
            corr_orthant[r] = c;
            x[r] = p;
        }
        change = std::sqrt(moved);
        if (change <= options.tolerance) return x;
    }
    throw ProjectionError("polyhedral projection hit the cycle cap (residual " + std::to_string(change) + ")",
                          std::move(x), change);
}

Allocation feasible_extract(const Incidence& incidence, const std::vector<std::vector<double>>& copies) {
    Allocation z(incidence.links_of_route.size(), INFINITY);
    for (std::size_t j = 0; j < copies.size(); ++j) {
        const auto& routes = incidence.routes_of_link[j];
        for (std::size_t k = 0; k < routes.size(); ++k) z[routes[k]] = std::min(z[routes[k]], copies[j][k]);
    }
    return z;
}

}  // namespace alphafair
