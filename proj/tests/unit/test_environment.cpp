#include <cmath>

#include "doctest.h"
#include "rcm/environment.hpp"
#include "rcm/errors.hpp"

using namespace rcm;

TEST_CASE("degenerate law gives all conductances one") {
    auto env = StaticEnvironment::sample(ConductanceLaw::constant_law(1.0), Window{10}, 7);
    for (int y = -10; y <= 10; ++y)
        for (int x = -10; x < 10; ++x) CHECK(env.omega({x, y}, 0) == 1.0);
    CHECK(env.num_open_edges() == env.num_edges());
}

TEST_CASE("open fraction concentrates around p_open") {
    auto env = StaticEnvironment::sample(ConductanceLaw::constant_law(1.0, 0.7), Window{100}, 11);
    double frac = double(env.num_open_edges()) / double(env.num_edges());
    CHECK(env.num_edges() == 2u * 201u * 200u);
    CHECK(std::abs(frac - 0.7) < 0.01);
}

TEST_CASE("sampling is deterministic and independent of the window size") {
    auto law = ConductanceLaw::uniform_law(0.5, 2.0, 0.8);
    auto a = StaticEnvironment::sample(law, Window{20}, 99);
    auto b = StaticEnvironment::sample(law, Window{20}, 99);
    CHECK(a.east() == b.east());
    CHECK(a.north() == b.north());
    auto big = StaticEnvironment::sample(law, Window{35}, 99);
    for (int y = -19; y <= 19; ++y)
        for (int x = -19; x <= 19; ++x)
            for (int d = 0; d < 4; ++d) CHECK(a.omega({x, y}, d) == big.omega({x, y}, d));
    auto c = StaticEnvironment::sample(law, Window{20}, 100);
    CHECK(a.east() != c.east());
}

TEST_CASE("moment condition examples") {
    auto r = check_moment_condition(ConductanceLaw::constant_law(1.0, 0.6), 2.0, 2.0);
    CHECK(r.moment_p == doctest::Approx(0.6));
    CHECK(r.moment_minus_q == doctest::Approx(0.6));
    CHECK_FALSE(r.satisfied);
    CHECK(check_moment_condition(ConductanceLaw::constant_law(1.0), 4.0, 4.0).satisfied);
    auto par = check_moment_condition(ConductanceLaw::pareto_law(3.0, 1.0), 4.0, 4.0);
    CHECK(std::isinf(par.moment_p));
    CHECK_FALSE(par.satisfied);
    CHECK(check_moment_condition(ConductanceLaw::pareto_law(5.0, 1.0), 4.0, 4.0).satisfied);
    auto inv = check_moment_condition(ConductanceLaw::inverse_pareto_law(3.0, 1.0), 4.0, 4.0);
    CHECK(std::isinf(inv.moment_minus_q));
    CHECK_FALSE(inv.clock_bounded_below);
    CHECK_THROWS_AS(check_moment_condition(ConductanceLaw::constant_law(1.0), 1.0, 3.0), ConfigError);
}

TEST_CASE("closed-form moments match Monte Carlo draws") {
    std::vector<ConductanceLaw> laws{ConductanceLaw::uniform_law(0.5, 1.5), ConductanceLaw::pareto_law(6.0, 1.0),
                                     ConductanceLaw::inverse_pareto_law(4.0, 2.0)};
    for (const auto& law : laws) {
        const int N = 200000;
        double s1 = 0.0, s2 = 0.0;
        for (int i = 0; i < N; ++i) {
            double w = sample_edge(law, 5, {i, 0}, 0);
            s1 += w;
            s2 += w * w;
        }
        double mean = s1 / N;
        double sd = std::sqrt(s2 / N - mean * mean);
        CHECK(std::abs(mean - law.mean()) < 4.0 * sd / std::sqrt(double(N)));
    }
}

TEST_CASE("mu sums the four incident conductances") {
    auto env = StaticEnvironment::constant(Window{5}, 1.0);
    CHECK(env.mu({0, 0}) == 4.0);
    CHECK_THROWS_AS(env.mu({5, 0}), DomainError);
    for (int d = 0; d < 4; ++d) env.set_omega({1, 1}, d, 0.0);
    CHECK(env.mu({1, 1}) == 0.0);
    auto rnd = StaticEnvironment::sample(ConductanceLaw::uniform_law(0.1, 3.0, 0.7), Window{8}, 3);
    for (int y = -7; y <= 7; ++y)
        for (int x = -7; x <= 7; ++x) {
            double s = rnd.east()[rnd.window().index({x, y})] + rnd.east()[rnd.window().index({x - 1, y})] +
                       rnd.north()[rnd.window().index({x, y})] + rnd.north()[rnd.window().index({x, y - 1})];
            CHECK(rnd.mu({x, y}) == doctest::Approx(s).epsilon(1e-15));
        }
}

TEST_CASE("shift view follows the group law") {
    auto env = StaticEnvironment::sample(ConductanceLaw::uniform_law(0.5, 2.0, 0.8), Window{12}, 21);
    ShiftView id(env, {0, 0});
    ShiftView sz(env, {3, -2});
    for (int y = -5; y <= 5; ++y)
        for (int x = -5; x <= 5; ++x)
            for (int d = 0; d < 4; ++d) {
                CHECK(id.omega({x, y}, d) == env.omega({x, y}, d));
                CHECK(sz.omega({x, y}, d) == env.omega(Site{x, y} + Site{3, -2}, d));
            }
    auto shifted = env.shifted({3, -2}, 8);
    auto back = shifted.shifted({-3, 2}, 5);
    for (int y = -5; y <= 5; ++y)
        for (int x = -5; x < 5; ++x) CHECK(back.omega({x, y}, 0) == env.omega({x, y}, 0));
    CHECK_THROWS_AS(sz.omega({12, 0}, 0), DomainError);
}

TEST_CASE("CSRW speed is bounded below by the smallest open conductance") {
    auto law = ConductanceLaw::uniform_law(0.25, 2.0, 0.7);
    auto env = StaticEnvironment::sample(law, Window{20}, 5);
    for (int y = -19; y <= 19; ++y)
        for (int x = -19; x <= 19; ++x) {
            double m = env.mu({x, y});
            if (m > 0.0) CHECK(env.theta(Speed::csrw, {x, y}) >= 0.25);
        }
}
