#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "rcm/operator.hpp"
#include "rcm/percolation.hpp"
#include "rcm/rng.hpp"

using namespace rcm;

namespace {

// random connected subset of the open cluster grown from a seed site
std::vector<Site> grow_domain(const StaticEnvironment& env, Site start, std::size_t target, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    std::vector<Site> sites{start};
    std::set<Site> in{start};
    for (int attempts = 0; sites.size() < target && attempts < 100000; ++attempts) {
        Site s = sites[std::size_t(rng.below(int(sites.size())))];
        int d = rng.below(4);
        Site t = s + kSteps[d];
        if (!env.window().interior(t) || env.omega(s, d) <= 0.0 || in.count(t)) continue;
        in.insert(t);
        sites.push_back(t);
    }
    return sites;
}

}  // namespace

TEST_CASE("generator stencil on the homogeneous lattice") {
    auto env = StaticEnvironment::constant(Window{4}, 1.0);
    Domain A({{0, 0}});
    auto gv = assemble(env, Speed::vsrw, A);
    auto f = [](Site s) { return s == Site{0, 0} ? 1.0 : 0.0; };
    CHECK(apply(gv, f)[0] == -4.0);
    auto gc = assemble(env, Speed::csrw, A);
    CHECK(apply(gc, f)[0] == -1.0);
    Domain B(ball({0, 0}, 3));
    auto gb = assemble(env, Speed::vsrw, B);
    auto ones = apply(gb, [](Site) { return 1.0; });
    auto lin = apply(gb, [](Site s) { return double(s.x); });
    for (std::size_t i = 0; i < B.size(); ++i) {
        CHECK(ones[i] == 0.0);
        CHECK(lin[i] == 0.0);
    }
}

TEST_CASE("generator matches a direct stencil evaluation") {
    auto env = StaticEnvironment::sample(ConductanceLaw::uniform_law(0.2, 3.0, 0.8), Window{10}, 3);
    auto geom = clusters(env);
    Site x0 = nearest_cluster_point(geom, {0, 0});
    Domain A(component_in_ball(env, geom, x0, 6));
    for (Speed sp : {Speed::vsrw, Speed::csrw}) {
        auto gen = assemble(env, sp, A);
        auto f = [](Site s) { return std::sin(1.3 * s.x) + std::cos(0.7 * s.y * s.x); };
        auto Lf = apply(gen, f);
        for (std::size_t i = 0; i < A.size(); ++i) {
            Site s = A[i];
            double th = sp == Speed::vsrw ? 1.0 : env.mu(s);
            double acc = 0.0;
            for (Site nb : neighbors(s)) acc += double(oracle::edge_weight(env, s, nb)) * (f(nb) - f(s));
            CHECK(Lf[i] == doctest::Approx(acc / th).epsilon(1e-13));
            // detailed balance
            for (int d = 0; d < 4; ++d) {
                int j = gen.nbr[i][d];
                if (j < 0) continue;
                CHECK(gen.theta[i] * gen.rate(i, d) ==
                      doctest::Approx(gen.theta[std::size_t(j)] * gen.rate(std::size_t(j), opposite(d))));
            }
        }
    }
}

TEST_CASE("killed Green function on tiny domains") {
    auto env = StaticEnvironment::constant(Window{5}, 1.0);
    CHECK(killed_green(env, Speed::vsrw, Domain({{0, 0}}), {0, 0}).values[0] == doctest::Approx(0.25));
    CHECK(killed_green(env, Speed::csrw, Domain({{0, 0}}), {0, 0}).values[0] == doctest::Approx(0.25));
    Domain B(ball({0, 0}, 2));
    auto g = killed_green(env, Speed::vsrw, B, {0, 0});
    CHECK(g.at({0, 0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    for (Site v : neighbors({0, 0})) CHECK(g.at(v) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(g.report.converged);
    CHECK(g.report.residual <= 1e-10);
}

TEST_CASE("killed Green matches dense elimination on small domains") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto law = seed % 2 ? ConductanceLaw::uniform_law(0.1, 5.0, 0.75) : ConductanceLaw::pareto_law(2.5, 0.5, 0.9);
        auto env = StaticEnvironment::sample(law, Window{8}, seed);
        auto geom = clusters(env);
        Site s0 = nearest_cluster_point(geom, {0, 0});
        auto sites = grow_domain(env, s0, 2 + seed % 11, seed);
        Domain A(sites);
        for (SolverKind kind : {SolverKind::cg, SolverKind::cholesky}) {
            SolveOptions opt;
            opt.kind = kind;
            opt.tol = 1e-14;
            auto gen = assemble(env, Speed::vsrw, A);
            DirichletSolver solver(gen, opt);
            for (std::size_t yi = 0; yi < sites.size(); ++yi) {
                auto ref = oracle::dense_green(env, sites, yi);
                auto got = killed_green(solver, sites[yi]);
                for (std::size_t i = 0; i < sites.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-12);
            }
        }
    }
}

TEST_CASE("Green symmetry, speed invariance and domain monotonicity") {
    auto env = StaticEnvironment::sample(ConductanceLaw::uniform_law(0.2, 2.0, 0.7), Window{30}, 17);
    auto geom = clusters(env);
    Site x0 = nearest_cluster_point(geom, {0, 0});
    Domain A(component_in_ball(env, geom, x0, 15));
    Domain A2(component_in_ball(env, geom, x0, 22));
    auto gv = assemble(env, Speed::vsrw, A);
    auto gc = assemble(env, Speed::csrw, A);
    auto gbig = assemble(env, Speed::vsrw, A2);
    DirichletSolver sv(gv), sc(gc), sbig(gbig);
    std::vector<Site> probes{x0};
    for (std::size_t k = 7; k < A.size(); k += A.size() / 6) probes.push_back(A[k]);
    for (Site y : probes) {
        auto g_v = killed_green(sv, y);
        auto g_c = killed_green(sc, y);
        auto g_b = killed_green(sbig, y);
        for (std::size_t i = 0; i < A.size(); ++i) {
            CHECK(std::abs(g_v[i] - g_c[i]) < 1e-8);
            CHECK(g_v[i] >= -1e-12);
            CHECK(g_v[i] <= g_b[std::size_t(A2.index(A[i]))] + 1e-9);
        }
        for (Site x : probes) {
            auto g_x = killed_green(sv, x);
            CHECK(std::abs(g_v[std::size_t(A.index(x))] - g_x[std::size_t(A.index(y))]) < 1e-8);
        }
    }
}

TEST_CASE("harmonic extension and exit functionals") {
    auto env = StaticEnvironment::constant(Window{6}, 1.0);
    Domain B(ball({0, 0}, 3));
    auto h = harmonic_extension(env, Speed::vsrw, B, [](Site) { return 2.5; });
    for (double v : h) CHECK(v == doctest::Approx(2.5));
    Domain O({{0, 0}});
    auto F = [](Site s) { return double(3 * s.x + 7 * s.y + 11); };
    CHECK(exit_functional(env, Speed::vsrw, {0, 0}, O, F) == doctest::Approx(11.0));
    CHECK(exit_functional(env, Speed::vsrw, {0, 0}, B, [](Site) { return 1.0; }) == doctest::Approx(1.0));

    auto asym = StaticEnvironment::constant(Window{3}, 1.0);
    asym.set_omega({0, 0}, 0, 3.0);
    asym.set_omega({0, 0}, 2, 0.5);
    double mu0 = asym.mu({0, 0});
    for (int d = 0; d < 4; ++d) {
        Site target = Site{0, 0} + kSteps[d];
        double p = exit_functional(asym, Speed::csrw, {0, 0}, O, [&](Site s) { return s == target ? 1.0 : 0.0; });
        CHECK(p == doctest::Approx(asym.omega({0, 0}, d) / mu0));
    }

    auto rnd = StaticEnvironment::sample(ConductanceLaw::uniform_law(0.1, 4.0, 0.8), Window{12}, 9);
    auto geom = clusters(rnd);
    Site x0 = nearest_cluster_point(geom, {0, 0});
    Domain A(component_in_ball(rnd, geom, x0, 8));
    auto G = [](Site s) { return std::cos(0.3 * s.x) * s.y; };
    auto hv = harmonic_extension(rnd, Speed::vsrw, A, G);
    auto hc = harmonic_extension(rnd, Speed::csrw, A, G);
    auto gen = assemble(rnd, Speed::vsrw, A);
    DirichletSolver solver(gen);
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < A.size(); ++i)
        for (int d = 0; d < 4; ++d)
            if (gen.nbr[i][d] < 0 && gen.weight[i][d] > 0.0) {
                lo = std::min(lo, G(A[i] + kSteps[d]));
                hi = std::max(hi, G(A[i] + kSteps[d]));
            }
    auto dist = exit_distribution(solver, x0);
    double total = 0.0, via_dist = 0.0;
    for (auto& [z, p] : dist) {
        total += p;
        via_dist += p * G(z);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(via_dist == doctest::Approx(hv[std::size_t(A.index(x0))]).epsilon(1e-8));
    for (std::size_t i = 0; i < A.size(); ++i) {
        CHECK(hv[i] == doctest::Approx(hc[i]).epsilon(1e-8));
        CHECK(hv[i] >= lo - 1e-9);
        CHECK(hv[i] <= hi + 1e-9);
    }
}

TEST_CASE("trapped components and bad domains are reported") {
    auto env = StaticEnvironment::constant(Window{4}, 1.0);
    CHECK_THROWS_AS(assemble(env, Speed::vsrw, Domain({{4, 0}})), DomainError);
    StaticEnvironment iso(Window{4});
    CHECK_THROWS_AS(assemble(iso, Speed::csrw, Domain({{0, 0}})), DomainError);
    // a single open edge whose endpoints both lie in A: the walk never leaves
    iso.set_omega({0, 0}, 0, 1.0);
    auto gen = assemble(iso, Speed::vsrw, Domain({{0, 0}, {1, 0}}));
    DirichletSolver solver(gen);
    CHECK(solver.trapped(0));
    CHECK_THROWS_AS(killed_green(solver, {0, 0}), DomainError);
}

TEST_CASE("occupation times sum to the mean exit time") {
    auto env = StaticEnvironment::constant(Window{4}, 1.0);
    auto gen = assemble(env, Speed::vsrw, Domain({{0, 0}}));
    DirichletSolver solver(gen);
    CHECK(mean_exit_time(solver, {0, 0}) == doctest::Approx(0.25));
    auto dist = exit_distribution(solver, {0, 0});
    REQUIRE(dist.size() == 4);
    for (auto& [z, p] : dist) CHECK(p == doctest::Approx(0.25));
}
