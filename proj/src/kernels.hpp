#ifndef ALPHAFAIR_SRC_KERNELS_HPP_
#define ALPHAFAIR_SRC_KERNELS_HPP_

// Arithmetic shared by the monolithic FD-ADMM round and the per-controller
// simulation. Both paths must go through these so their results agree bit for
// bit.

#include <cmath>
#include <span>
#include <vector>

#include "alphafair/fairness.hpp"
#include "alphafair/projection.hpp"

namespace alphafair::detail {

// z~_r from the sum of per-domain partial sums (accumulated in ascending
// domain order, each partial in ascending link order) and z0_r.
inline double consensus_value(double partial_total, double z0, std::size_t n_links) {
    return (partial_total + z0) / static_cast<double>(n_links + 1);
}

// Dual step and capacity projection for one link. z_tilde(k) yields z~ of the
// k-th route of the link.
template <typename ZTilde>
inline void link_update(double capacity, ZTilde&& z_tilde, std::span<double> u, std::span<double> z,
                        std::vector<double>& scratch) {
    scratch.resize(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double zt = z_tilde(k);
        u[k] = u[k] + z[k] - zt;
        scratch[k] = zt - u[k];
    }
    project_link(capacity, scratch, z);
}

inline void route_update(double alpha, double weight, double lambda, double z_tilde, double& u0, double& z0) {
    u0 = u0 + z0 - z_tilde;
    z0 = prox(alpha, weight, z_tilde - u0, lambda);
}

// Largest equal share c/q whose q-fold ordered sum stays within c.
inline double equal_share(double capacity, std::size_t q) {
    if (q == 0) return 0.0;
    double share = capacity / static_cast<double>(q);
    for (;;) {
        double s = 0.0;
        for (std::size_t k = 0; k < q; ++k) s += share;
        if (s <= capacity) return share;
        share = std::nextafter(share, 0.0);
    }
}

inline double partial_sum(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

}  // namespace alphafair::detail

#endif  // ALPHAFAIR_SRC_KERNELS_HPP_
