#ifndef ALPHAFAIR_PROJECTION_HPP_
#define ALPHAFAIR_PROJECTION_HPP_

#include <span>
#include <vector>

#include "alphafair/instance.hpp"

namespace alphafair {

// Euclidean projection onto the link capacity set {x >= 0, sum x <= capacity}.
//
// Negatives are clipped first; if the clipped point still overloads the link it
// is projected onto the face sum x = capacity with the sort-and-threshold rule
// x_i = max(y_i - theta, 0). Ties in the sort are broken by position. The
// returned point satisfies the capacity bound exactly when summed in index
// order, which is what makes feasible_extract exact.
void project_link(double capacity, std::span<const double> y, std::span<double> out);
std::vector<double> project_link(double capacity, std::span<const double> y);

struct PolyhedronProjectionOptions {
    double tolerance = 1e-10;
    long max_cycles = 1000000;
};

// Projection onto {x >= 0, Ax <= C} with Dykstra's alternating projections over
// the link sets and the orthant. Stops once the correction terms move by less
// than the tolerance over a full cycle; throws ProjectionError at the cap.
std::vector<double> project_polyhedron(const Instance& instance, std::span<const double> y,
                                       const PolyhedronProjectionOptions& options = {});
std::vector<double> project_polyhedron(const Instance& instance, const Incidence& incidence,
                                       std::span<const double> y, const PolyhedronProjectionOptions& options);

// z*_r = min over links j in r of the copy z_{jr}. copies[j] is indexed like
// incidence.routes_of_link[j].
Allocation feasible_extract(const Incidence& incidence, const std::vector<std::vector<double>>& copies);

}  // namespace alphafair

#endif  // ALPHAFAIR_PROJECTION_HPP_
