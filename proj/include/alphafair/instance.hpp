#ifndef ALPHAFAIR_INSTANCE_HPP_
#define ALPHAFAIR_INSTANCE_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace alphafair {

// Bandwidth vector indexed by route id.
using Allocation = std::vector<double>;

struct Link {
    int id = 0;
    double capacity = 0.0;

    bool operator==(const Link&) const = default;
};

struct Route {
    int id = 0;
    std::vector<int> links;  // file order; treated as a set
    double weight = 1.0;

    bool operator==(const Route&) const = default;
};

struct Instance {
    std::vector<Link> links;
    std::vector<Route> routes;
    double alpha = 1.0;

    std::size_t num_links() const { return links.size(); }
    std::size_t num_routes() const { return routes.size(); }

    bool operator==(const Instance&) const = default;
};

// Returns one message per broken invariant; empty means valid.
std::vector<std::string> validate(const Instance& instance);

// Throws ValidationError listing every violation.
void require_valid(const Instance& instance);

// Link-route incidence in both directions, with ids sorted ascending.
struct Incidence {
    std::vector<std::vector<int>> routes_of_link;  // R_j
    std::vector<std::vector<int>> links_of_route;  // J_r
    std::vector<double> bottleneck;                // B_r = min_{j in r} C_j

    explicit Incidence(const Instance& instance);
};

double mean_link_load(const Instance& instance);

// Sum over routes crossing each link, accumulated in ascending route id.
std::vector<double> link_loads(const Instance& instance, std::span<const double> x);

// Exact test of Ax <= C with x >= 0; no tolerance.
bool is_feasible(const Instance& instance, std::span<const double> x);

// 100 * |{j : load_j > C_j (1 + eps)}| / |J|.
double violated_percentage(const Instance& instance, std::span<const double> x, double eps = 1e-9);

// Assignment of links to domains 1..P with the derived route coverings.
struct Partition {
    int num_domains = 0;
    std::vector<int> domain_of_link;
    // Indexed by domain 0..P. Entry 0 of links_of_domain is empty; entry 0 of
    // routes_of_domain holds every route (R_0 = R).
    std::vector<std::vector<int>> links_of_domain;
    std::vector<std::vector<int>> routes_of_domain;
    // I_r, ascending, always starting with 0.
    std::vector<std::vector<int>> domains_of_route;
};

Partition build_partition(const Instance& instance, const std::map<int, int>& domain_of_link);
Partition build_partition(const Instance& instance, std::span<const int> domain_of_link);

// Every link in domain 1.
Partition single_domain_partition(const Instance& instance);

// k contiguous blocks of link ids with sizes differing by at most one.
Partition balanced_partition(const Instance& instance, int num_domains);

// Uniformly random assignment to k domains.
Partition random_partition(const Instance& instance, int num_domains, std::uint64_t seed);

struct GeneratorParams {
    std::uint64_t seed = 1;
    int n_nodes = 20;
    int n_links = 40;
    int n_routes = 50;
    std::pair<double, double> capacity_range{1.0, 10.0};
    std::pair<double, double> weight_range{1.0, 1.0};
    double alpha = 1.0;
};

// Random connected graph (spanning tree plus extra edges); routes are
// hop-count shortest paths between random distinct endpoints.
Instance generate_random(const GeneratorParams& params);

// Graph behind a generated instance: link j joins link_endpoints[j]; route r
// runs from route_endpoints[r].first to .second with its links in path order.
struct GeneratedTopology {
    int n_nodes = 0;
    std::vector<std::pair<int, int>> link_endpoints;
    std::vector<std::pair<int, int>> route_endpoints;
};
Instance generate_random(const GeneratorParams& params, GeneratedTopology* topology);

// Serialization. The document has exactly the fields alpha, links[{id, capacity}]
// and routes[{id, weight, links}]; unknown fields are rejected.
std::string to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);
Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

// Partition file: array of {link_id, domain}.
std::map<int, int> partition_map_from_json(const std::string& text);
std::string partition_to_json(const Partition& partition);
Partition load_partition(const Instance& instance, const std::string& path);
void save_partition(const Partition& partition, const std::string& path);

}  // namespace alphafair

#endif  // ALPHAFAIR_INSTANCE_HPP_
