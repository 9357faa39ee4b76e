#include <doctest.h>

#include <cmath>
#include <sstream>

#include "alphafair/error.hpp"
#include "alphafair/experiments.hpp"
#include "test_util.hpp"

using namespace alphafair;

namespace {

std::vector<double> weights_of(const Instance& inst) {
    std::vector<double> w;
    for (const auto& r : inst.routes) w.push_back(r.weight);
    return w;
}

DynamicConfig small_config(std::vector<double> amplitudes, int events) {
    DynamicConfig c;
    c.amplitudes = std::move(amplitudes);
    c.events = events;
    c.iterations_per_event = 10;
    c.seed = 5;
    c.compare_cold_start = true;
    return c;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("scenario draws") {
    const Instance inst = tu::random_instance(3, 10, 15, 20, 1.0, {0.5, 2.0});
    const auto base = weights_of(inst);
    const Scenario s = make_scenario(inst, 0.5, 20, 10, 42);
    CHECK(s.weights.size() == 20);
    CHECK(make_scenario(inst, 0.5, 20, 10, 42).weights == s.weights);
    CHECK_FALSE(make_scenario(inst, 0.5, 20, 10, 43).weights == s.weights);
    auto prev = base;
    for (const auto& w : s.weights) {
        for (std::size_t r = 0; r < w.size(); ++r) {
            CHECK(w[r] >= 0.5 * prev[r]);
            CHECK(w[r] <= 1.5 * prev[r]);
            CHECK(w[r] > 0.0);
        }
        prev = w;
    }
    for (const auto& w : make_scenario(inst, 0.0, 5, 10, 42).weights) CHECK(w == base);

    // Different amplitudes share their uniform draws.
    const Scenario t = make_scenario(inst, 0.25, 20, 10, 42);
    auto ps = base, pt = base;
    for (std::size_t e = 0; e < 20; ++e) {
        for (std::size_t r = 0; r < base.size(); ++r) {
            const double us = (s.weights[e][r] / ps[r] - 0.5) / 1.0;
            const double ut = (t.weights[e][r] / pt[r] - 0.75) / 0.5;
            CHECK(std::abs(us - ut) <= 1e-9);
        }
        ps = s.weights[e];
        pt = t.weights[e];
    }

    CHECK_THROWS_AS(make_scenario(inst, 1.5, 5, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(make_scenario(inst, -0.1, 5, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(make_scenario(inst, 0.5, -1, 10, 1), InvalidArgument);
}

TEST_CASE("dynamic runs") {
    const Instance inst = tu::random_instance(6, 12, 20, 30, 1.0, {0.5, 2.0});
    const Partition p = random_partition(inst, 3, 6);
    const DynamicConfig c = small_config({0.0, 0.05, 0.25}, 8);
    const DynamicResult r = run_dynamic(inst, p, c);

    CHECK(r.rows.size() == 3 * 8 * 10 * 2);
    CHECK(r.summary.size() == 3 * 2);
    CHECK(r.events.size() == 3 * 8);
    for (const auto& [a, row] : r.rows) {
        if (row.algorithm == Algorithm::kFdAdmm) CHECK(row.violation_pct == 0.0);
        CHECK(row.message_floats == (row.algorithm == Algorithm::kFdAdmm
                                         ? FdAdmmLayout(inst, p).message_floats_per_round()
                                         : lagr_message_floats_per_round(inst, p)));
    }

    // Summary recomputed from the rows.
    for (const auto& s : r.summary) {
        double gap = 0.0, viol = 0.0, worst = 0.0;
        long n = 0;
        for (const auto& [a, row] : r.rows) {
            if (a != s.amplitude || row.algorithm != s.algorithm) continue;
            gap += row.gap;
            viol += row.violation_pct;
            worst = std::max(worst, row.violation_pct);
            ++n;
        }
        CHECK(n == 80);
        CHECK(std::isfinite(s.mean_gap));
        CHECK(s.mean_gap == doctest::Approx(gap / n).epsilon(1e-12));
        CHECK(s.mean_violation == doctest::Approx(viol / n).epsilon(1e-12));
        CHECK(s.max_violation == worst);
        if (s.algorithm == Algorithm::kFdAdmm) CHECK(s.max_violation == 0.0);
    }

    // Fixed weights: each event continues the same run and ends closer.
    double last = INFINITY;
    for (const auto& e : r.events) {
        if (e.amplitude != 0.0) continue;
        CHECK(e.warm_final_gap <= last);
        last = e.warm_final_gap;
    }

    int warm_wins = 0, total = 0;
    for (const auto& e : r.events) {
        ++total;
        warm_wins += e.warm_first_gap <= e.cold_first_gap;
    }
    CHECK(warm_wins >= 0.8 * total);

    // Byte-identical output for the same configuration.
    std::ostringstream a1, a2, s1;
    write_dynamic_trace(a1, r);
    write_dynamic_trace(a2, run_dynamic(inst, p, c));
    CHECK(a1.str() == a2.str());
    CHECK(a1.str().rfind("amplitude,iteration,event,algorithm,objective,gap,primal_residual,dual_residual,"
                         "violation_pct,message_floats,wall_time\n",
                         0) == 0);
    write_dynamic_summary(s1, r);
    CHECK(s1.str().rfind("amplitude,algorithm,mean_gap,mean_violation_pct,max_violation_pct,mean_final_gap\n", 0) ==
          0);

    DynamicConfig bad = c;
    bad.amplitudes = {1.2};
    CHECK_THROWS_AS(run_dynamic(inst, p, bad), InvalidArgument);
}

TEST_CASE("LAGR leaves the feasible set while weights move") {
    GeneratorParams g;
    g.seed = 11;
    g.n_nodes = 30;
    g.n_links = 60;
    g.n_routes = 200;
    const Instance inst = generate_random(g);
    DynamicConfig c = small_config({0.5}, 20);
    c.compare_cold_start = false;
    const DynamicResult r = run_dynamic(inst, balanced_partition(inst, 3), c);
    double worst = 0.0;
    for (const auto& [a, row] : r.rows) {
        if (row.algorithm == Algorithm::kLagr) worst = std::max(worst, row.violation_pct);
        if (row.algorithm == Algorithm::kFdAdmm) CHECK(row.violation_pct == 0.0);
    }
    CHECK(worst > 0.0);
}

TEST_CASE("lambda sweep") {
    const Instance inst = tu::random_instance(8, 12, 20, 30);
    const Partition p = random_partition(inst, 2, 8);
    SolverConfig c;
    c.max_iters = 20000;
    const double star = adaptive_lambda(inst, p, c);
    CHECK(star > 0.0);

    const auto one = sweep_lambda(inst, p, {star}, c);
    REQUIRE(one.size() == 2);
    CHECK_FALSE(one[0].adaptive);
    CHECK(one[1].adaptive);
    CHECK(one[1].lambda == star);
    SolverConfig fixed = c;
    fixed.lambda = star;
    fixed.record_trace = false;
    CHECK(one[0].iterations == solve(inst, p, Algorithm::kFdAdmm, fixed).iterations);

    // Far below lambda* the run crawls; the low end of the decade grid.
    const auto tiny = sweep_lambda(inst, p, {star * 1e-3}, c);
    CHECK(tiny[0].iterations > tiny[1].iterations);

    CHECK_THROWS_AS(sweep_lambda(inst, p, {}, c), InvalidArgument);
    const auto grid = decade_grid(2.0, -1, 1);
    REQUIRE(grid.size() == 3);
    CHECK(grid[0] == doctest::Approx(0.2));
    CHECK(grid[2] == doctest::Approx(20.0));
    CHECK_THROWS_AS(decade_grid(2.0, 1, 0), InvalidArgument);

    std::ostringstream out;
    write_sweep(out, one);
    CHECK(out.str().rfind("mode,lambda,iterations,converged\nfixed,", 0) == 0);
}

TEST_CASE("load curve") {
    // Link loads 2, 1, 0: mean 1.
    Instance toy{{{0, 1.0}, {1, 1.0}, {2, 1.0}}, {{0, {0, 1}, 1.0}, {1, {0}, 1.0}}, 1.0};
    const LoadCurveRow row = loadcurve_point(toy, single_domain_partition(toy), SolverConfig{});
    CHECK(row.mean_link_load == 1.0);
    CHECK(row.routes == 2);
    CHECK(row.converged);

    std::vector<LoadCurveRow> rows{row, row};
    std::ostringstream out;
    write_loadcurve(out, rows);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "mean_link_load,routes,iterations,converged");
    std::string a, b;
    std::getline(in, a);
    std::getline(in, b);
    CHECK(a == b);
    CHECK_FALSE(std::getline(in, line));
}

}  // TEST_SUITE
