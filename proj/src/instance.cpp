#include "alphafair/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "alphafair/error.hpp"
#include "json.hpp"
#include "random.hpp"

namespace alphafair {

using json = nlohmann::ordered_json;

std::vector<std::string> validate(const Instance& instance) {
    std::vector<std::string> out;
    if (!std::isfinite(instance.alpha) || instance.alpha < 0.0) {
        out.push_back("alpha must be a finite number >= 0");
    }
    const int n_links = static_cast<int>(instance.links.size());
    for (int i = 0; i < n_links; ++i) {
        const Link& l = instance.links[i];
        if (l.id != i) {
            out.push_back("link at position " + std::to_string(i) + " has id " + std::to_string(l.id) +
                          " (ids must be dense and ordered)");
        }
        if (!std::isfinite(l.capacity) || l.capacity <= 0.0) {
            out.push_back("link " + std::to_string(l.id) + ": capacity must be > 0");
        }
    }
    for (std::size_t i = 0; i < instance.routes.size(); ++i) {
        const Route& r = instance.routes[i];
        const std::string name = "route " + std::to_string(r.id);
        if (r.id != static_cast<int>(i)) {
            out.push_back("route at position " + std::to_string(i) + " has id " + std::to_string(r.id) +
                          " (ids must be dense and ordered)");
        }
        if (!std::isfinite(r.weight) || r.weight <= 0.0) {
            out.push_back(name + ": weight must be > 0");
        }
        if (r.links.empty()) {
            out.push_back(name + ": empty link set");
        }
        std::set<int> seen;
        for (int j : r.links) {
            if (j < 0 || j >= n_links) {
                out.push_back(name + ": references unknown link " + std::to_string(j));
            } else if (!seen.insert(j).second) {
                out.push_back(name + ": duplicate link " + std::to_string(j));
            }
        }
    }
    return out;
}

void require_valid(const Instance& instance) {
    auto violations = validate(instance);
    if (violations.empty()) return;
    std::string msg = "invalid instance: " + violations.front();
    if (violations.size() > 1) msg += " (+" + std::to_string(violations.size() - 1) + " more)";
    throw ValidationError(msg, std::move(violations));
}

Incidence::Incidence(const Instance& instance)
    : routes_of_link(instance.num_links()),
      links_of_route(instance.num_routes()),
      bottleneck(instance.num_routes(), 0.0) {
    for (std::size_t r = 0; r < instance.num_routes(); ++r) {
        auto& lr = links_of_route[r];
        lr = instance.routes[r].links;
        std::sort(lr.begin(), lr.end());
        double b = INFINITY;
        for (int j : lr) {
            routes_of_link[j].push_back(static_cast<int>(r));
            b = std::min(b, instance.links[j].capacity);
        }
        bottleneck[r] = b;
    }
}

double mean_link_load(const Instance& instance) {
    if (instance.links.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& r : instance.routes) total += r.links.size();
    return static_cast<double>(total) / static_cast<double>(instance.links.size());
}

std::vector<double> link_loads(const Instance& instance, std::span<const double> x) {
    if (x.size() != instance.num_routes()) throw InvalidArgument("allocation size does not match route count");
    // Each link accumulates its routes in ascending id, as everywhere else.
    std::vector<double> loads(instance.num_links(), 0.0);
    for (std::size_t r = 0; r < instance.num_routes(); ++r) {
        for (int j : instance.routes[r].links) loads[j] += x[r];
    }
    return loads;
}

bool is_feasible(const Instance& instance, std::span<const double> x) {
    for (double v : x) {
        if (!(v >= 0.0)) return false;
    }
    auto loads = link_loads(instance, x);
    for (std::size_t j = 0; j < loads.size(); ++j) {
        if (!(loads[j] <= instance.links[j].capacity)) return false;
    }
    return true;
}

double violated_percentage(const Instance& instance, std::span<const double> x, double eps) {
    if (instance.links.empty()) return 0.0;
    auto loads = link_loads(instance, x);
    std::size_t violated = 0;
    for (std::size_t j = 0; j < loads.size(); ++j) {
        if (loads[j] > instance.links[j].capacity * (1.0 + eps)) ++violated;
    }
    return 100.0 * static_cast<double>(violated) / static_cast<double>(loads.size());
}

Partition build_partition(const Instance& instance, const std::map<int, int>& domain_of_link) {
    const int n_links = static_cast<int>(instance.num_links());
    std::vector<int> dom(n_links, 0);
    for (const auto& [link, domain] : domain_of_link) {
        if (link < 0 || link >= n_links) {
            throw InvalidArgument("partition assigns unknown link " + std::to_string(link));
        }
        dom[link] = domain;
    }
    for (int j = 0; j < n_links; ++j) {
        if (!domain_of_link.count(j)) {
            throw InvalidArgument("partition has no domain for link " + std::to_string(j));
        }
    }
    return build_partition(instance, std::span<const int>(dom));
}

Partition build_partition(const Instance& instance, std::span<const int> domain_of_link) {
    const std::size_t n_links = instance.num_links();
    if (domain_of_link.size() != n_links) {
        throw InvalidArgument("partition has " + std::to_string(domain_of_link.size()) + " entries for " +
                              std::to_string(n_links) + " links");
    }
    Partition p;
    p.domain_of_link.assign(domain_of_link.begin(), domain_of_link.end());
    for (std::size_t j = 0; j < n_links; ++j) {
        if (domain_of_link[j] < 1) {
            throw InvalidArgument("link " + std::to_string(j) + " assigned to domain " +
                                  std::to_string(domain_of_link[j]) + " (domains start at 1)");
        }
        p.num_domains = std::max(p.num_domains, domain_of_link[j]);
    }
    const int P = p.num_domains;
    p.links_of_domain.assign(P + 1, {});
    p.routes_of_domain.assign(P + 1, {});
    p.domains_of_route.assign(instance.num_routes(), {});
    for (std::size_t j = 0; j < n_links; ++j) p.links_of_domain[domain_of_link[j]].push_back(static_cast<int>(j));

    for (std::size_t r = 0; r < instance.num_routes(); ++r) {
        std::vector<int> doms{0};
        for (int j : instance.routes[r].links) doms.push_back(domain_of_link[j]);
        std::sort(doms.begin(), doms.end());
        doms.erase(std::unique(doms.begin(), doms.end()), doms.end());
        for (int q : doms) p.routes_of_domain[q].push_back(static_cast<int>(r));
        p.domains_of_route[r] = std::move(doms);
    }
    return p;
}

Partition single_domain_partition(const Instance& instance) {
    std::vector<int> dom(instance.num_links(), 1);
    return build_partition(instance, std::span<const int>(dom));
}

Partition balanced_partition(const Instance& instance, int num_domains) {
    if (num_domains < 1) throw InvalidArgument("number of domains must be >= 1");
    const std::size_t n = instance.num_links();
    std::vector<int> dom(n);
    for (std::size_t j = 0; j < n; ++j) {
        dom[j] = 1 + static_cast<int>(j * static_cast<std::size_t>(num_domains) / std::max<std::size_t>(n, 1));
    }
    return build_partition(instance, std::span<const int>(dom));
}

Partition random_partition(const Instance& instance, int num_domains, std::uint64_t seed) {
    if (num_domains < 1) throw InvalidArgument("number of domains must be >= 1");
    detail::Rng rng(seed);
    std::vector<int> dom(instance.num_links());
    for (auto& d : dom) d = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(num_domains)));
    return build_partition(instance, std::span<const int>(dom));
}

namespace {

void check_range(const std::pair<double, double>& range, const char* what) {
    if (!(range.first > 0.0) || !(range.second >= range.first) || !std::isfinite(range.second)) {
        throw InvalidArgument(std::string(what) + " range must satisfy 0 < lo <= hi");
    }
}

}  // namespace

Instance generate_random(const GeneratorParams& params) { return generate_random(params, nullptr); }

Instance generate_random(const GeneratorParams& params, GeneratedTopology* topology) {
    check_range(params.capacity_range, "capacity");
    check_range(params.weight_range, "weight");
    const int n = params.n_nodes;
    if (n < 1) throw InvalidArgument("need at least one node");
    if (params.n_links < n - 1) throw InvalidArgument("too few links to connect " + std::to_string(n) + " nodes");
    const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
    if (params.n_links > max_edges) throw InvalidArgument("more links than node pairs");
    if (params.n_routes < 0) throw InvalidArgument("route count must be >= 0");
    if (params.n_routes > 0 && n < 2) throw InvalidArgument("routes need at least two nodes");

    detail::Rng rng(params.seed);
    Instance inst;
    inst.alpha = params.alpha;

    // Random spanning tree over a random node order, then distinct extra edges.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(static_cast<std::uint64_t>(i) + 1)]);

    std::vector<std::pair<int, int>> edges;
    std::set<std::pair<int, int>> present;
    auto add_edge = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        if (a == b || !present.insert({a, b}).second) return false;
        edges.emplace_back(a, b);
        return true;
    };
    for (int i = 1; i < n; ++i) add_edge(order[i], order[rng.index(static_cast<std::uint64_t>(i))]);
    long long attempts = 0;
    while (static_cast<int>(edges.size()) < params.n_links) {
        if (++attempts > 1000LL * params.n_links + 1000) throw InvalidArgument("could not place extra links");
        add_edge(static_cast<int>(rng.index(n)), static_cast<int>(rng.index(n)));
    }
    for (int j = 0; j < params.n_links; ++j) {
        inst.links.push_back({j, rng.uniform(params.capacity_range.first, params.capacity_range.second)});
    }

    if (topology) {
        topology->n_nodes = n;
        topology->link_endpoints = edges;
        topology->route_endpoints.clear();
    }

    std::vector<std::vector<std::pair<int, int>>> adjacency(n);  // (neighbor, link id), by link id
    for (int j = 0; j < params.n_links; ++j) {
        adjacency[edges[j].first].emplace_back(edges[j].second, j);
        adjacency[edges[j].second].emplace_back(edges[j].first, j);
    }

    for (int r = 0; r < params.n_routes; ++r) {
        std::vector<int> path;
        std::pair<int, int> endpoints{-1, -1};
        for (int attempt = 0; attempt < 100 && path.empty(); ++attempt) {
            const int src = static_cast<int>(rng.index(n));
            int dst = static_cast<int>(rng.index(n - 1));
            if (dst >= src) ++dst;
            std::vector<int> via(n, -1);  // link used to reach node
            std::vector<char> seen(n, 0);
            std::queue<int> bfs;
            bfs.push(src);
            seen[src] = 1;
            while (!bfs.empty() && !seen[dst]) {
                const int u = bfs.front();
                bfs.pop();
                for (auto [v, link] : adjacency[u]) {
                    if (seen[v]) continue;
                    seen[v] = 1;
                    via[v] = link;
                    bfs.push(v);
                }
            }
            if (!seen[dst]) continue;
            endpoints = {src, dst};
            for (int v = dst; v != src;) {
                const int link = via[v];
                path.push_back(link);
                v = edges[link].first == v ? edges[link].second : edges[link].first;
            }
            std::reverse(path.begin(), path.end());
        }
        if (path.empty()) throw InvalidArgument("no path found for route " + std::to_string(r));
        if (topology) topology->route_endpoints.push_back(endpoints);
        inst.routes.push_back({r, std::move(path), rng.uniform(params.weight_range.first, params.weight_range.second)});
    }
    return inst;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void require_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    for (const char* k : keys) {
        if (!obj.contains(k)) throw ParseError(where + ": missing field \"" + k + "\"");
    }
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : keys) known = known || item.key() == k;
        if (!known) throw ParseError(where + ": unknown field \"" + item.key() + "\"");
    }
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError(where + ": expected a number");
    return v.get<double>();
}

int get_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
    const auto i = v.get<long long>();
    if (i < INT32_MIN || i > INT32_MAX) throw ParseError(where + ": integer out of range");
    return static_cast<int>(i);
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace

std::string to_json(const Instance& instance) {
    json doc;
    doc["alpha"] = instance.alpha;
    doc["links"] = json::array();
    for (const auto& l : instance.links) doc["links"].push_back({{"id", l.id}, {"capacity", l.capacity}});
    doc["routes"] = json::array();
    for (const auto& r : instance.routes) {
        doc["routes"].push_back({{"id", r.id}, {"weight", r.weight}, {"links", r.links}});
    }
    return doc.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
    const json doc = parse_text(text);
    require_keys(doc, {"alpha", "links", "routes"}, "instance");
    Instance inst;
    inst.alpha = get_number(doc["alpha"], "alpha");
    if (!doc["links"].is_array()) throw ParseError("links: expected an array");
    if (!doc["routes"].is_array()) throw ParseError("routes: expected an array");

    std::vector<Link> links;
    for (std::size_t i = 0; i < doc["links"].size(); ++i) {
        const std::string where = "links[" + std::to_string(i) + "]";
        const json& l = doc["links"][i];
        require_keys(l, {"id", "capacity"}, where);
        links.push_back({get_int(l["id"], where + ".id"), get_number(l["capacity"], where + ".capacity")});
    }
    // Ids must be dense, but file order is free.
    std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) { return a.id < b.id; });
    inst.links = std::move(links);

    std::vector<Route> routes;
    for (std::size_t i = 0; i < doc["routes"].size(); ++i) {
        const std::string where = "routes[" + std::to_string(i) + "]";
        const json& r = doc["routes"][i];
        require_keys(r, {"id", "weight", "links"}, where);
        Route route;
        route.id = get_int(r["id"], where + ".id");
        route.weight = get_number(r["weight"], where + ".weight");
        if (!r["links"].is_array()) throw ParseError(where + ".links: expected an array");
        for (std::size_t k = 0; k < r["links"].size(); ++k) {
            route.links.push_back(get_int(r["links"][k], where + ".links[" + std::to_string(k) + "]"));
        }
        routes.push_back(std::move(route));
    }
    std::sort(routes.begin(), routes.end(), [](const Route& a, const Route& b) { return a.id < b.id; });
    inst.routes = std::move(routes);
    require_valid(inst);
    return inst;
}

Instance load_instance(const std::string& path) { return instance_from_json(read_file(path)); }

void save_instance(const Instance& instance, const std::string& path) {
    require_valid(instance);
    write_file(path, to_json(instance));
}

std::map<int, int> partition_map_from_json(const std::string& text) {
    const json doc = parse_text(text);
    if (!doc.is_array()) throw ParseError("partition: expected an array");
    std::map<int, int> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string where = "partition[" + std::to_string(i) + "]";
        require_keys(doc[i], {"link_id", "domain"}, where);
        const int link = get_int(doc[i]["link_id"], where + ".link_id");
        const int domain = get_int(doc[i]["domain"], where + ".domain");
        if (!out.emplace(link, domain).second) {
            throw ParseError(where + ": link " + std::to_string(link) + " assigned twice");
        }
    }
    return out;
}

std::string partition_to_json(const Partition& partition) {
    json doc = json::array();
    for (std::size_t j = 0; j < partition.domain_of_link.size(); ++j) {
        doc.push_back({{"link_id", static_cast<int>(j)}, {"domain", partition.domain_of_link[j]}});
    }
    return doc.dump(2) + "\n";
}

Partition load_partition(const Instance& instance, const std::string& path) {
    return build_partition(instance, partition_map_from_json(read_file(path)));
}

void save_partition(const Partition& partition, const std::string& path) {
    write_file(path, partition_to_json(partition));
}

}  // namespace alphafair
