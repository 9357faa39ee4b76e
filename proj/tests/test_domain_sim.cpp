#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "alphafair/domain_sim.hpp"
#include "alphafair/error.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace alphafair;

namespace {

void require_same(const SolverState& a, const SolverState& b) {
    REQUIRE(a.z_links == b.z_links);
    REQUIRE(a.u_links == b.u_links);
    REQUIRE(a.z0 == b.z0);
    REQUIRE(a.u0 == b.u0);
    REQUIRE(a.z_tilde == b.z_tilde);
    REQUIRE(a.z_star == b.z_star);
    REQUIRE(a.penalty.lambda == b.penalty.lambda);
}

// Two links, each in its own domain, with `shared` routes crossing both.
Instance two_domain_instance(int shared) {
    Instance inst;
    inst.alpha = 1.0;
    inst.links = {{0, 3.0}, {1, 5.0}};
    for (int r = 0; r < shared; ++r) inst.routes.push_back({r, {0, 1}, 1.0 + r});
    return inst;
}

// 2 sum_{q != p} |R_p n R_q| by set intersection.
std::vector<long> brute_overhead(const Partition& p) {
    std::vector<long> out(p.num_domains + 1, 0);
    for (int a = 1; a <= p.num_domains; ++a) {
        for (int b = 1; b <= p.num_domains; ++b) {
            if (a == b) continue;
            std::vector<int> common;
            std::set_intersection(p.routes_of_domain[a].begin(), p.routes_of_domain[a].end(),
                                  p.routes_of_domain[b].begin(), p.routes_of_domain[b].end(),
                                  std::back_inserter(common));
            out[a] += 2 * static_cast<long>(common.size());
        }
    }
    return out;
}

SolverConfig fixed(double lambda) {
    SolverConfig c;
    c.lambda = lambda;
    return c;
}

}  // namespace

TEST_SUITE("domain_sim") {

TEST_CASE("simulation matches the monolithic round bit for bit") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const double alpha = std::array{0.5, 1.0, 2.0, 3.0}[seed % 4];
        const Instance inst = tu::random_instance(seed, 12, 20, 30, alpha, {0.5, 2.0});
        const Partition p = random_partition(inst, 1 + static_cast<int>(seed % 5), seed);
        const FdAdmmLayout layout(inst, p);
        const FairnessObjective obj = FairnessObjective::from(inst);
        SolverState mono = fdadmm_init(layout, {1.0, 30, false});
        SolverConfig c;
        c.workers = static_cast<int>(seed % 3) + 1;
        DomainSimulation sim(inst, p, c);
        require_same(sim.global_state(), mono);
        for (int k = 0; k < 120; ++k) {
            adapt_fdadmm_penalty(mono, layout, obj);
            fdadmm_round(mono, layout, obj);
            sim.run_round();
            REQUIRE(sim.replicas_agree());
            const SolverState s = sim.global_state();
            require_same(s, mono);
            REQUIRE(s.residuals.primal == mono.residuals.primal);
            REQUIRE(s.residuals.dual == mono.residuals.dual);
        }
        CHECK(sim.round() == 120);
    }
}

TEST_CASE("a single domain sends nothing") {
    const Instance inst = tu::random_instance(2, 10, 15, 20);
    DomainSimulation sim(inst, single_domain_partition(inst), SolverConfig{}, true);
    sim.run(25);
    const OverheadReport rep = sim.measure_overhead();
    CHECK(rep.rounds == 25);
    CHECK(rep.total == 0);
    CHECK(rep.matches_prediction);
    CHECK(sim.message_log().empty());
}

TEST_CASE("two domains sharing five routes") {
    const Instance inst = two_domain_instance(5);
    const Partition p = build_partition(inst, std::map<int, int>{{0, 1}, {1, 2}});
    DomainSimulation sim(inst, p, SolverConfig{});
    sim.run_round();
    OverheadReport rep = sim.measure_overhead();
    CHECK(rep.per_pair.at({1, 2}) == 10);
    CHECK(rep.per_pair.at({2, 1}) == 10);
    CHECK(rep.per_domain[1] == 10);
    CHECK(rep.predicted_per_round[1] == 10);
    CHECK(rep.matches_prediction);
    sim.run(9);
    rep = sim.measure_overhead();
    CHECK(rep.rounds == 10);
    CHECK(rep.per_pair.at({1, 2}) == 100);
    CHECK(rep.total == 200);
}

TEST_CASE("disjoint domains exchange nothing") {
    Instance inst;
    inst.alpha = 1.0;
    inst.links = {{0, 1.0}, {1, 2.0}};
    inst.routes = {{0, {0}, 1.0}, {1, {1}, 1.0}, {2, {1}, 2.0}};
    const Partition p = build_partition(inst, std::map<int, int>{{0, 1}, {1, 2}});
    DomainSimulation sim(inst, p, SolverConfig{});
    sim.run(5);
    CHECK(sim.measure_overhead().total == 0);
    CHECK(predicted_overhead(p) == std::vector<long>{0, 0, 0});
}

TEST_CASE("metered overhead equals the predicted count") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const Instance inst = tu::random_instance(seed, 14, 24, 35);
        const Partition p = random_partition(inst, 2 + static_cast<int>(seed % 4), seed + 100);
        CHECK(predicted_overhead(p) == brute_overhead(p));
        DomainSimulation sim(inst, p, SolverConfig{});
        sim.run(7);
        const OverheadReport rep = sim.measure_overhead();
        CHECK(rep.matches_prediction);
        long per_round = 0;
        for (long v : brute_overhead(p)) per_round += v;
        CHECK(rep.total == 7 * per_round);
        // Same count the monolithic solver reports per round.
        CHECK(static_cast<double>(per_round) == FdAdmmLayout(inst, p).message_floats_per_round());
    }
}

TEST_CASE("controllers only hold their own links and routes") {
    const Instance inst = tu::random_instance(9, 14, 24, 35);
    const Partition p = random_partition(inst, 4, 9);
    DomainSimulation sim(inst, p, SolverConfig{}, true);
    sim.run(5);
    for (const auto& node : sim.controllers()) {
        std::vector<int> links;
        for (const auto& l : node.links) links.push_back(l.link);
        CHECK(links == p.links_of_domain[node.domain]);
        CHECK(node.routes == p.routes_of_domain[node.domain]);
        CHECK(node.z0.size() == node.routes.size());
        for (std::size_t i = 0; i < node.routes.size(); ++i) {
            for (int d : node.domains[i]) {
                const auto& rd = p.routes_of_domain[d];
                CHECK(std::binary_search(rd.begin(), rd.end(), node.routes[i]));
            }
        }
    }
    for (const auto& m : sim.message_log()) {
        CHECK(m.from != m.to);
        CHECK(std::binary_search(p.routes_of_domain[m.from].begin(), p.routes_of_domain[m.from].end(), m.route));
        CHECK(std::binary_search(p.routes_of_domain[m.to].begin(), p.routes_of_domain[m.to].end(), m.route));
    }
}

TEST_CASE("a lost message is a protocol error") {
    const Instance inst = two_domain_instance(3);
    const Partition p = build_partition(inst, std::map<int, int>{{0, 1}, {1, 2}});
    DomainSimulation sim(inst, p, SolverConfig{});
    sim.run(2);
    bool dropped = false;
    sim.set_delivery_filter([&](const RouteMessage& m) {
        if (dropped || m.round != 3) return true;
        dropped = true;
        return false;
    });
    CHECK_THROWS_AS(sim.run_round(), ProtocolError);
}

TEST_CASE("weight injection") {
    const Instance inst = tu::random_instance(4, 10, 15, 12, 1.0, {0.5, 2.0});
    const Partition p = random_partition(inst, 3, 4);
    std::vector<double> w;
    for (const auto& r : inst.routes) w.push_back(r.weight);

    // Re-injecting the current weights changes nothing.
    DomainSimulation a(inst, p, SolverConfig{}), b(inst, p, SolverConfig{});
    a.run(20);
    b.run(20);
    b.inject_weight_update(w);
    a.run(20);
    b.run(20);
    require_same(a.global_state(), b.global_state());

    // alpha = 1: scaling all weights leaves the optimum in place.
    DomainSimulation scaled(inst, p, fixed(0.5));
    scaled.run(50);
    std::vector<double> doubled = w;
    for (double& v : doubled) v *= 2.0;
    scaled.inject_weight_update(doubled);
    scaled.run(30000);
    CHECK(tu::max_abs_diff(scaled.global_state().z_star, reference_solution(inst)) <= 1e-4);

    // Raising one weight raises that route's share.
    DomainSimulation up(inst, p, fixed(0.5));
    up.run(30000);
    const double before = up.global_state().z_star[0];
    std::vector<double> raised = w;
    raised[0] *= 3.0;
    up.inject_weight_update(raised);
    up.run(30000);
    CHECK(up.global_state().z_star[0] > before + 1e-3);

    std::vector<double> bad = w;
    bad[1] = 0.0;
    CHECK_THROWS_AS(up.inject_weight_update(bad), InvalidArgument);
    bad[1] = -1.0;
    CHECK_THROWS_AS(up.inject_weight_update(bad), InvalidArgument);
    CHECK_THROWS_AS(up.inject_weight_update(std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("message log file") {
    const Instance inst = two_domain_instance(2);
    const Partition p = build_partition(inst, std::map<int, int>{{0, 1}, {1, 2}});
    DomainSimulation sim(inst, p, SolverConfig{}, true);
    sim.run(3);
    const std::string path = (tu::temp_dir("sim") / "log.csv").string();
    sim.write_message_log(path);
    std::istringstream in(tu::read_file(path));
    std::string line;
    std::getline(in, line);
    CHECK(line == "round,route,from,to,z,z_star");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    // Seeding at round 0 plus 3 rounds, 2 routes each way.
    CHECK(rows == 4 * 4);
    CHECK(static_cast<std::size_t>(rows) == sim.message_log().size());
}

TEST_CASE("simulation configuration errors") {
    Instance lp = tu::single_link(2.0, {1.0, 2.0}, 0.0);
    CHECK_THROWS_AS(DomainSimulation(lp, single_domain_partition(lp), SolverConfig{}), InvalidArgument);
    CHECK_NOTHROW(DomainSimulation(lp, single_domain_partition(lp), fixed(1.0)));
    const Instance inst = tu::chain_instance();
    CHECK_THROWS_AS(DomainSimulation(inst, single_domain_partition(tu::single_link(1.0, {1.0})), SolverConfig{}),
                    InvalidArgument);
}

}  // TEST_SUITE
