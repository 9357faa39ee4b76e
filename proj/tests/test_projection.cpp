#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "alphafair/error.hpp"
#include "alphafair/projection.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace alphafair;

namespace {

double ordered_sum(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}

std::vector<double> random_point(std::mt19937_64& rng, int q, double spread) {
    std::uniform_real_distribution<double> u(-spread, 2.0 * spread);
    std::vector<double> y(q);
    for (double& v : y) v = u(rng);
    return y;
}

}  // namespace

TEST_SUITE("projection") {

TEST_CASE("link projection examples") {
    CHECK(project_link(2.0, std::vector<double>{0.5, 0.3}) == std::vector<double>{0.5, 0.3});
    CHECK(project_link(2.0, std::vector<double>{2.0, 2.0}) == std::vector<double>{1.0, 1.0});
    CHECK(project_link(2.0, std::vector<double>{3.0, 1.0}) == std::vector<double>{2.0, 0.0});
    CHECK(project_link(2.0, std::vector<double>{-1.0, 0.5}) == std::vector<double>{0.0, 0.5});
    CHECK(project_link(1.0, std::vector<double>{}).empty());

    // KKT check for (3,1) -> (2,0): theta = 1, coordinate 2 is pinned at 0.
    const auto ref = oracle::project_link(2.0, {3.0, 1.0});
    CHECK(ref[0] == doctest::Approx(2.0));
    CHECK(ref[1] == doctest::Approx(0.0));
}

TEST_CASE("link projection matches the active-set oracle") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dim(1, 6);
    std::uniform_real_distribution<double> cap(0.1, 5.0);
    for (int t = 0; t < 2000; ++t) {
        const int q = dim(rng);
        const double c = cap(rng);
        const auto y = random_point(rng, q, 2.0);
        const auto x = project_link(c, y);
        const auto ref = oracle::project_link(c, y);
        CHECK(tu::max_abs_diff(x, ref) <= 1e-9);
    }
}

TEST_CASE("link projection stays exactly inside the set") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> dim(1, 40);
    std::uniform_real_distribution<double> cap(1e-3, 1e3);
    for (int t = 0; t < 20000; ++t) {
        const int q = dim(rng);
        const double c = cap(rng);
        const auto y = random_point(rng, q, c);
        const auto x = project_link(c, y);
        for (double v : x) REQUIRE(v >= 0.0);
        REQUIRE(ordered_sum(x) <= c);
    }
    // Ties and awkward values.
    for (int q = 1; q <= 30; ++q) {
        const std::vector<double> y(q, 1.0 / 3.0 + 0.1);
        REQUIRE(ordered_sum(project_link(0.1, y)) <= 0.1);
        REQUIRE(ordered_sum(project_link(1.0 / 3.0, y)) <= 1.0 / 3.0);
    }
}

TEST_CASE("link projection variational inequality and nonexpansiveness") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        const int q = 1 + t % 8;
        const double c = 0.5 + 3.0 * u(rng);
        const auto y1 = random_point(rng, q, 2.0);
        const auto y2 = random_point(rng, q, 2.0);
        const auto p1 = project_link(c, y1), p2 = project_link(c, y2);
        double d_in = 0.0, d_out = 0.0;
        for (int i = 0; i < q; ++i) {
            d_in += (y1[i] - y2[i]) * (y1[i] - y2[i]);
            d_out += (p1[i] - p2[i]) * (p1[i] - p2[i]);
        }
        CHECK(d_out <= d_in * (1.0 + 1e-12) + 1e-24);
        for (int s = 0; s < 10; ++s) {
            // Random feasible x: scaled random point on the simplex.
            std::vector<double> x(q);
            for (double& v : x) v = u(rng);
            const double scale = c * u(rng) / std::max(ordered_sum(x), 1e-300);
            double vi = 0.0;
            for (int i = 0; i < q; ++i) vi += (y1[i] - p1[i]) * (x[i] * scale - p1[i]);
            CHECK(vi <= 1e-9);
        }
    }
}

TEST_CASE("link projection matches a grid search in low dimension") {
    std::mt19937_64 rng(19);
    for (int t = 0; t < 40; ++t) {
        const int q = 1 + t % 3;
        const double c = 1.0 + (t % 5) * 0.3;
        const auto y = random_point(rng, q, 1.5);
        const auto x = project_link(c, y);
        // Grid over the capped simplex with step h.
        const double h = q == 3 ? 2e-3 : 1e-4;
        double best = INFINITY;
        std::vector<double> arg(q, 0.0), p(q, 0.0);
        const long n = static_cast<long>(c / h);
        auto dist = [&](const std::vector<double>& z) {
            double s = 0.0;
            for (int i = 0; i < q; ++i) s += (z[i] - y[i]) * (z[i] - y[i]);
            return s;
        };
        if (q == 1) {
            for (long a = 0; a <= n; ++a) {
                p[0] = a * h;
                if (dist(p) < best) best = dist(p), arg = p;
            }
        } else if (q == 2) {
            for (long a = 0; a <= n; ++a)
                for (long b = 0; a + b <= n; ++b) {
                    p = {a * h, b * h};
                    if (dist(p) < best) best = dist(p), arg = p;
                }
        } else {
            for (long a = 0; a <= n; ++a)
                for (long b = 0; a + b <= n; ++b) {
                    // Best third coordinate given the first two: clamp y_3.
                    const double room = c - (a + b) * h;
                    p = {a * h, b * h, std::clamp(y[2], 0.0, room)};
                    if (dist(p) < best) best = dist(p), arg = p;
                }
        }
        CHECK(tu::max_abs_diff(x, arg) <= 1e-4 + h);
    }
}

TEST_CASE("polyhedron projection") {
    const Instance one = tu::single_link(2.0, {1.0, 1.0, 1.0});
    std::mt19937_64 rng(29);
    for (int t = 0; t < 50; ++t) {
        const auto y = random_point(rng, 3, 2.0);
        const auto x = project_polyhedron(one, y, {1e-12, 100000});
        CHECK(tu::max_abs_diff(x, project_link(2.0, y)) <= 1e-9);
    }

    // Feasible input is a fixed point.
    const Instance inst = tu::chain_instance();
    const std::vector<double> feasible{0.5, 1.0};
    CHECK(tu::max_abs_diff(project_polyhedron(inst, feasible), feasible) <= 1e-10);

    // Two links, two crossing routes, points outside: active-set oracle.
    const Instance cross{{{0, 1.0}, {1, 1.5}}, {{0, {0, 1}, 1.0}, {1, {0, 1}, 1.0}}, 1.0};
    for (int t = 0; t < 200; ++t) {
        const auto y = random_point(rng, 2, 2.0);
        const auto x = project_polyhedron(cross, y, {1e-12, 100000});
        CHECK(tu::max_abs_diff(x, oracle::project_instance(cross, y)) <= 1e-6);
    }

    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const Instance small = tu::random_instance(seed, 5, 5, 5);
        for (int t = 0; t < 10; ++t) {
            const auto y = random_point(rng, 5, 4.0);
            const auto x = project_polyhedron(small, y, {1e-12, 1000000});
            CHECK(tu::max_abs_diff(x, oracle::project_instance(small, y)) <= 1e-6);
        }
    }
}

TEST_CASE("polyhedron projection reports the cap") {
    const Instance cross{{{0, 1.0}, {1, 1.5}}, {{0, {0, 1}, 1.0}, {1, {0, 1}, 1.0}}, 1.0};
    const std::vector<double> y{5.0, -3.0};
    try {
        project_polyhedron(cross, y, {1e-300, 1});
        FAIL("expected ProjectionError");
    } catch (const ProjectionError& e) {
        CHECK(e.last_iterate().size() == 2);
        CHECK(e.residual() > 0.0);
    }
    CHECK_THROWS_AS(project_polyhedron(cross, y, {0.0, 10}), InvalidArgument);
}

TEST_CASE("feasible extract") {
    const Instance inst = tu::chain_instance();
    const Incidence inc(inst);
    // Link 0 holds route 0; link 1 holds routes 0 and 1.
    const std::vector<std::vector<double>> copies{{0.4}, {0.6, 1.4}};
    CHECK(feasible_extract(inc, copies) == std::vector<double>{0.4, 1.4});

    const Instance single = tu::single_link(3.0, {1.0, 1.0});
    CHECK(feasible_extract(Incidence(single), {{1.0, 2.0}}) == std::vector<double>{1.0, 2.0});

    // Arbitrary per-link-feasible copies always give an exactly feasible point.
    std::mt19937_64 rng(31);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const Instance r = tu::random_instance(seed, 10, 16, 25);
        const Incidence ri(r);
        for (int t = 0; t < 50; ++t) {
            std::vector<std::vector<double>> z(r.num_links());
            for (std::size_t j = 0; j < r.num_links(); ++j) {
                const auto y = random_point(rng, static_cast<int>(ri.routes_of_link[j].size()), r.links[j].capacity);
                z[j] = project_link(r.links[j].capacity, y);
            }
            REQUIRE(oracle::satisfies_capacities(r, feasible_extract(ri, z)));
            REQUIRE(is_feasible(r, feasible_extract(ri, z)));
        }
    }
}

}  // TEST_SUITE
