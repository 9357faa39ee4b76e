#ifndef ALPHAFAIR_TESTS_TEST_UTIL_HPP_
#define ALPHAFAIR_TESTS_TEST_UTIL_HPP_

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "alphafair/instance.hpp"

namespace tu {

inline alphafair::Instance random_instance(std::uint64_t seed, int nodes, int links, int routes, double alpha = 1.0,
                                           std::pair<double, double> weights = {1.0, 1.0},
                                           std::pair<double, double> capacities = {1.0, 10.0}) {
    alphafair::GeneratorParams g;
    g.seed = seed;
    g.n_nodes = nodes;
    g.n_links = links;
    g.n_routes = routes;
    g.alpha = alpha;
    g.weight_range = weights;
    g.capacity_range = capacities;
    return alphafair::generate_random(g);
}

// Link 0 (C=1) and link 1 (C=2); route 0 crosses both, route 1 only link 1.
inline alphafair::Instance chain_instance() {
    return {{{0, 1.0}, {1, 2.0}}, {{0, {0, 1}, 1.0}, {1, {1}, 1.0}}, 1.0};
}

inline alphafair::Instance single_link(double capacity, std::vector<double> weights, double alpha = 1.0) {
    alphafair::Instance inst;
    inst.alpha = alpha;
    inst.links.push_back({0, capacity});
    for (std::size_t r = 0; r < weights.size(); ++r) inst.routes.push_back({static_cast<int>(r), {0}, weights[r]});
    return inst;
}

// Load check with an explicit margin, summing in the order routes are listed.
inline bool within_eps(const alphafair::Instance& inst, const std::vector<double>& x, double eps) {
    std::vector<double> load(inst.num_links(), 0.0);
    for (const auto& r : inst.routes)
        for (int j : r.links) load[j] += x[r.id];
    for (const auto& l : inst.links)
        if (load[l.id] > l.capacity * (1.0 + eps)) return false;
    return true;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("alphafair_test_" + name);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

class Stopwatch {
 public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

 private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace tu

#endif  // ALPHAFAIR_TESTS_TEST_UTIL_HPP_
