#include <cmath>
#include <set>

#include "doctest.h"
#include "rcm/errors.hpp"
#include "rcm/percolation.hpp"

using namespace rcm;

TEST_CASE("full lattice is one component") {
    auto env = StaticEnvironment::constant(Window{6}, 1.0);
    auto g = clusters(env);
    CHECK(g.sizes.size() == 1);
    CHECK(g.giant_size() == 169);
    CHECK(g.giant_spans);
}

TEST_CASE("all edges closed gives singletons and a trivial giant") {
    StaticEnvironment env(Window{4});
    auto g = clusters(env);
    CHECK(g.sizes.size() == 81);
    CHECK(g.giant_trivial);
    CHECK(g.giant_tie);
    CHECK(g.giant_id == 0);
}

TEST_CASE("union-find and breadth-first labelings agree exactly") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        double p = 0.35 + 0.05 * double(seed % 8);
        auto env = StaticEnvironment::sample(ConductanceLaw::constant_law(1.0, p), Window{30}, seed);
        auto a = clusters(env);
        auto b = clusters_bfs(env);
        CHECK(a.label == b.label);
        CHECK(a.sizes == b.sizes);
        CHECK(a.giant_id == b.giant_id);
    }
}

TEST_CASE("supercritical giant holds most sites") {
    int big = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto env = StaticEnvironment::sample(ConductanceLaw::constant_law(1.0, 0.7), Window{200}, 1000 + seed);
        auto g = clusters(env);
        big += double(g.giant_size()) / double(env.window().num_sites()) > 0.5;
    }
    CHECK(big == 20);
}

TEST_CASE("component_in_ball") {
    auto full = StaticEnvironment::constant(Window{10}, 1.0);
    auto c = component_in_ball(full, {1, 1}, 4);
    auto b = ball({1, 1}, 4);
    CHECK(std::set<Site>(c.begin(), c.end()) == std::set<Site>(b.begin(), b.end()));
    auto one = component_in_ball(full, {0, 0}, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == Site{0, 0});

    auto env = StaticEnvironment::sample(ConductanceLaw::constant_law(1.0, 0.65), Window{40}, 4);
    auto g = clusters(env);
    Site x = nearest_cluster_point(g, {0.0, 0.0});
    std::set<Site> prev;
    for (int n = 1; n <= 25; n += 3) {
        auto cn = component_in_ball(env, g, x, n);
        Domain allowed(ball(x, n));
        std::set<Site> cur(cn.begin(), cn.end());
        for (Site s : prev) CHECK(cur.count(s) == 1);
        for (Site s : cn) {
            CHECK(g.in_giant(s));
            auto path = open_path(env, x, s, &allowed);
            REQUIRE_FALSE(path.empty());
            for (std::size_t k = 1; k < path.size(); ++k) {
                CHECK(l1_distance(path[k - 1], path[k]) == 1);
                CHECK(env.omega(Edge::make(path[k - 1], path[k])) > 0.0);
            }
        }
        prev = cur;
    }
    Site off{};
    bool have = false;
    for (int y = -5; y <= 5 && !have; ++y)
        for (int x2 = -5; x2 <= 5 && !have; ++x2)
            if (!g.in_giant({x2, y})) {
                off = {x2, y};
                have = true;
            }
    if (have) CHECK_THROWS_AS(component_in_ball(env, g, off, 5), DomainError);
}

TEST_CASE("nearest cluster point") {
    auto full = StaticEnvironment::constant(Window{10}, 1.0);
    auto g = clusters(full);
    CHECK(nearest_cluster_point(g, {3.2, 0.0}) == Site{3, 0});
    CHECK(nearest_cluster_point(g, {0.5, 0.0}) == Site{0, 0});
    CHECK(nearest_cluster_point(g, {-0.5, 0.5}) == Site{-1, 0});

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto env = StaticEnvironment::sample(ConductanceLaw::constant_law(1.0, 0.6), Window{15}, seed);
        auto cg = clusters(env);
        for (int k = 0; k < 40; ++k) {
            Point t{-12.0 + 0.61 * k, 9.0 - 0.47 * k};
            Site s = nearest_cluster_point(cg, t);
            CHECK(cg.in_giant(s));
            double best = std::hypot(s.x - t.x, s.y - t.y);
            for (int y = -15; y <= 15; ++y)
                for (int x = -15; x <= 15; ++x)
                    if (cg.in_giant({x, y})) CHECK(std::hypot(x - t.x, y - t.y) >= best - 1e-12);
        }
    }
}

TEST_CASE("chemical distance") {
    auto full = StaticEnvironment::constant(Window{8}, 1.0);
    CHECK(chemical_distance(full, {-3, 2}, {4, -1}).value() == 10);
    auto env = StaticEnvironment::sample(ConductanceLaw::constant_law(1.0, 0.7), Window{20}, 8);
    auto g = clusters(env);
    Site a = nearest_cluster_point(g, {-10.0, 3.0});
    Site b = nearest_cluster_point(g, {7.0, -8.0});
    auto dab = chemical_distance(env, a, b);
    auto dba = chemical_distance(env, b, a);
    REQUIRE(dab.has_value());
    CHECK(*dab == *dba);
    CHECK(*dab >= l1_distance(a, b));
    StaticEnvironment closed(Window{3});
    CHECK_FALSE(chemical_distance(closed, {0, 0}, {1, 0}).has_value());
}

TEST_CASE("theta estimator") {
    auto one = estimate_theta(ConductanceLaw::constant_law(1.0), 20, 3, 1);
    CHECK(one.theta_hat == 1.0);
    CHECK(one.std_error == 0.0);
    double prev = 0.0, prev_se = 0.0;
    for (double p : {0.55, 0.6, 0.7, 0.8, 0.9}) {
        auto t = estimate_theta(ConductanceLaw::constant_law(1.0, p), 60, 8, 77);
        CHECK(t.theta_hat + 2.0 * std::hypot(t.std_error, prev_se) >= prev);
        prev = t.theta_hat;
        prev_se = t.std_error;
    }
}
