#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "rcm/percolation.hpp"
#include "rcm/potential.hpp"

using namespace rcm;

namespace {

StaticEnvironment random_env(int L, std::uint64_t seed, double p_open = 1.0) {
    return StaticEnvironment::sample(ConductanceLaw::uniform_law(0.3, 2.5, p_open), Window{L}, seed);
}

}  // namespace

TEST_CASE("potential kernel vanishes at the base point") {
    auto env = random_env(20, 5);
    auto f = potential_field(env, Speed::vsrw, {0, 0}, 16);
    CHECK(f.at({0, 0}) == 0.0);
    CHECK(f.at({1, 0}) > 0.0);
}

TEST_CASE("homogeneous potential kernel matches the lattice kernel") {
    auto env = StaticEnvironment::constant(Window{140}, 1.0);
    PotentialOptions opts;
    opts.solve.tol = 1e-12;
    auto big = potential_field(env, Speed::vsrw, {0, 0}, 128, opts);
    auto half = potential_field(env, Speed::vsrw, {0, 0}, 64, opts);
    CHECK(2 * big.at({1, 0}) - half.at({1, 0}) == doctest::Approx(0.25).epsilon(2e-3));
    for (Site x : {Site{1, 1}, Site{2, 0}, Site{3, 1}}) {
        double exact = oracle::srw_potential_kernel(x.x, x.y) / 4.0;
        double rich = 2 * big.at(x) - half.at(x);
        CHECK(rich == doctest::Approx(exact).epsilon(5e-3));
    }
    CHECK(oracle::srw_potential_kernel(1, 1) == doctest::Approx(4.0 / M_PI).epsilon(1e-6));
    CHECK(oracle::srw_potential_kernel(2, 0) == doctest::Approx(4.0 - 8.0 / M_PI).epsilon(1e-6));
}

TEST_CASE("green-difference kernel is symmetric and speed invariant") {
    auto env = random_env(24, 17, 0.8);
    auto geom = clusters(env);
    if (!geom.in_giant({0, 0})) return;
    Domain D = cluster_ball(env, {0, 0}, 20, BallShape::diamond);
    REQUIRE(D.size() > 50);
    Site x = D[D.size() / 3], y = D[D.size() / 2];
    PotentialOptions opts;
    opts.solve.tol = 1e-13;
    auto fy = potential_field(env, Speed::vsrw, y, 20, opts);
    auto fx = potential_field(env, Speed::vsrw, x, 20, opts);
    CHECK(fy.at(x) == doctest::Approx(fx.at(y)).epsilon(1e-9));
    auto cy = potential_field(env, Speed::csrw, y, 20, opts);
    CHECK(cy.at(x) == doctest::Approx(fy.at(x)).epsilon(1e-9));
}

TEST_CASE("time-integral route agrees with the green-difference route") {
    auto env = StaticEnvironment::constant(Window{200}, 1.0);
    PotentialOptions opts;
    auto t = potential_time_integral(env, Speed::vsrw, {1, 0}, {0, 0}, 2000.0, opts);
    CHECK(t.value == doctest::Approx(0.25).epsilon(0.02));
    auto t2 = potential_time_integral(env, Speed::vsrw, {2, 1}, {0, 0}, 2000.0, opts);
    CHECK(t2.value == doctest::Approx(oracle::srw_potential_kernel(2, 1) / 4.0).epsilon(0.02));
    CHECK(std::abs(t.richardson_delta) < 0.01);
}

TEST_CASE("last-exit identity holds on random domains") {
    auto env = random_env(30, 23);
    PotentialOptions opts;
    opts.solve.tol = 1e-13;
    Domain A(ball({2, 1}, 6));
    auto rep = check_lemma22_identity(env, Speed::vsrw, A, {3, 2}, {1, 0}, 24, PotentialRoute::green_difference, opts);
    CHECK(rep.g_A > 0.0);
    CHECK(rep.residual < 1e-9);
    auto outside = check_lemma22_identity(env, Speed::csrw, A, {3, 2}, {9, 0}, 24, PotentialRoute::green_difference, opts);
    CHECK(outside.g_A == 0.0);
    CHECK(outside.residual < 1e-9);
}

TEST_CASE("last-exit identity residual shrinks with the time horizon") {
    auto env = random_env(60, 29);
    Domain A(ball({0, 0}, 5));
    auto r1 = check_lemma22_identity(env, Speed::vsrw, A, {1, 1}, {0, 2}, 200.0, PotentialRoute::time_integral);
    auto r2 = check_lemma22_identity(env, Speed::vsrw, A, {1, 1}, {0, 2}, 800.0, PotentialRoute::time_integral);
    CHECK(r2.residual < r1.residual);
}

TEST_CASE("punctured-ball green function on the homogeneous lattice") {
    auto env = StaticEnvironment::constant(Window{80}, 1.0);
    PotentialOptions opts;
    opts.solve.tol = 1e-12;
    auto rep = check_corollary23(env, Speed::vsrw, {1, 0}, {1, 0}, 32, 72, opts);
    CHECK(rep.g_A_x0 == 0.0);
    CHECK(rep.combination == doctest::Approx(0.5).epsilon(0.02));
    CHECK(rep.residual < 0.1);
    auto far = check_corollary23(env, Speed::vsrw, {1, 0}, {3, 2}, 16, 72, opts);
    auto nearer = check_corollary23(env, Speed::vsrw, {1, 0}, {3, 2}, 32, 72, opts);
    CHECK(nearer.residual < far.residual);
    REQUIRE(!nearer.limit_table.empty());
    CHECK(nearer.limit_table.front().second < rep.g_A);
}

TEST_CASE("corrected shift covariance") {
    auto env = random_env(30, 41);
    Site z{2, -1}, x{1, 2};
    PotentialOptions opts;
    opts.solve.tol = 1e-13;
    auto shifted = env.shifted(z, 26);
    auto lhs = potential_field(shifted, Speed::vsrw, x, 20, opts, {0, 0}, {-z.x, -z.y});
    auto at_z = potential_field(env, Speed::vsrw, z, 20, opts);
    auto at_xz = potential_field(env, Speed::vsrw, x + z, 20, opts);
    CHECK(lhs.at({0, 0}) == doctest::Approx(at_xz.at(z) - at_z.at(z)).epsilon(1e-9));
}

TEST_CASE("escape probabilities decrease with the radius") {
    auto env = random_env(70, 53);
    auto rows = f_term_estimate(env, Speed::vsrw, {1, 0}, {8, 16, 32, 64}, 1.0 / (2 * M_PI));
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].escape < rows[i - 1].escape);
    for (const auto& r : rows) CHECK(r.scaled > 0.0);
}

TEST_CASE("balls must fit in the window") {
    auto env = random_env(10, 3);
    CHECK_THROWS_AS(cluster_ball(env, {0, 0}, 12, BallShape::diamond), ConfigError);
    StaticEnvironment blocked(Window{10});
    CHECK_THROWS_AS(cluster_ball(blocked, {0, 0}, 4, BallShape::diamond), DomainError);
}
