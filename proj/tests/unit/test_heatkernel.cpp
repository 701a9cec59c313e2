#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "rcm/heatkernel.hpp"
#include "rcm/operator.hpp"
#include "rcm/percolation.hpp"

using namespace rcm;

namespace {

StaticEnvironment small_random(std::uint64_t seed, double p_open = 0.85) {
    return StaticEnvironment::sample(ConductanceLaw::uniform_law(0.3, 2.5, p_open), Window{6}, seed);
}

}  // namespace

TEST_CASE("density at time zero is the normalized point mass") {
    auto env = small_random(1, 1.0);
    for (Speed sp : {Speed::vsrw, Speed::csrw}) {
        auto sl = transition_density(env, sp, {0, 0}, 0.0, 4);
        double th = sp == Speed::vsrw ? 1.0 : env.mu({0, 0});
        CHECK(sl.at({0, 0}) == doctest::Approx(1.0 / th));
        CHECK(sl.at({1, 0}) == 0.0);
    }
}

TEST_CASE("uniformization matches the dense matrix exponential and is reversible") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto env = small_random(seed);
        std::vector<Site> box;
        for (int y = -4; y <= 4; ++y)
            for (int x = -4; x <= 4; ++x) box.push_back({x, y});
        Domain A(box);
        for (Speed sp : {Speed::vsrw, Speed::csrw}) {
            if (env.mu({0, 0}) == 0.0) continue;
            auto Q = oracle::dense_generator(env, sp, box);
            bool ok = true;
            for (Site s : box) ok = ok && env.mu(s) > 0.0;
            if (sp == Speed::csrw && !ok) continue;
            double t = 1.7;
            HeatOptions opt;
            opt.tol = 1e-13;
            auto P = oracle::dense_expm(Q, t);
            auto sl = transition_density(env, sp, {0, 0}, t, 4, opt);
            std::size_t i0 = std::size_t(A.index({0, 0}));
            for (std::size_t j = 0; j < box.size(); ++j) {
                double th_j = sp == Speed::vsrw ? 1.0 : env.mu(box[j]);
                CHECK(std::abs(sl.at(box[j]) - P[i0][j] / th_j) < 1e-10);
            }
            Site y{2, -1};
            if (env.mu(y) == 0.0) continue;
            // same Dirichlet box, started from y
            HeatPropagator back(Site{0, 0}, 4, env.window().L, sp, opt);
            back.load(env);
            back.set_point_mass(y);
            back.advance(t);
            CHECK(std::abs(sl.at(y) - back.density({0, 0})) < 1e-10);
        }
    }
}

TEST_CASE("Chapman-Kolmogorov and mass conservation") {
    auto env = StaticEnvironment::sample(ConductanceLaw::uniform_law(0.5, 1.5, 0.9), Window{40}, 3);
    auto geom = clusters(env);
    REQUIRE(geom.in_giant({0, 0}));
    HeatOptions opt;
    double t = 3.0, s = 2.0;
    auto pt = transition_density(env, Speed::vsrw, {0, 0}, t, 0, opt);
    auto pts = transition_density(env, Speed::vsrw, {0, 0}, t + s, 0, opt);
    CHECK(pts.eps_leak < 1e-6);
    double mass = 0.0;
    for (int y = pts.lo.y; y <= pts.hi.y; ++y)
        for (int x = pts.lo.x; x <= pts.hi.x; ++x) mass += pts.at({x, y}) * pts.theta_at({x, y});
    CHECK(mass <= 1.0 + 10 * opt.tol);
    CHECK(mass >= 1.0 - pts.eps_leak - 1e-12);
    for (Site y : {Site{1, 1}, Site{-3, 2}, Site{0, 5}}) {
        double ck = 0.0;
        for (int zy = pt.lo.y; zy <= pt.hi.y; ++zy)
            for (int zx = pt.lo.x; zx <= pt.hi.x; ++zx) {
                Site z{zx, zy};
                double pz = pt.at(z);
                if (pz == 0.0) continue;
                auto from_z = transition_density(env, Speed::vsrw, y, s, 0, opt);
                ck += pz * pt.theta_at(z) * from_z.at(z);
            }
        CHECK(std::abs(ck - pts.at(y)) < 10 * opt.tol + 1e-6 * pts.at(y));
        break;
    }
}

TEST_CASE("killed time integral reproduces the killed Green function") {
    auto env = StaticEnvironment::sample(ConductanceLaw::uniform_law(0.4, 2.0, 0.85), Window{12}, 5);
    auto geom = clusters(env);
    Site x0 = nearest_cluster_point(geom, {0, 0});
    Domain A(component_in_ball(env, geom, x0, 6));
    for (Speed sp : {Speed::vsrw, Speed::csrw}) {
        auto I = killed_time_integral(env, sp, A, x0);
        auto g = killed_green(env, sp, A, x0);
        for (std::size_t i = 0; i < A.size(); ++i) CHECK(std::abs(I[i] - g.values[i]) < 1e-4);
    }
}

TEST_CASE("homogeneous local limit at t = 500") {
    auto env = StaticEnvironment::constant(Window{400}, 1.0);
    auto curve = llt_curve(env, Speed::vsrw, {500.0});
    double target = 1.0 / (4.0 * std::numbers::pi);
    CHECK(std::abs(curve[0].tp / target - 1.0) < 0.02);
}

TEST_CASE("homogeneous CSRW curve is the VSRW curve at a quarter of the time") {
    // with omega = 1 the CSRW is the VSRW slowed down by mu = 4, so
    // t p^CSRW_t(0,0) = (t/4) p^VSRW_{t/4}(0,0); both tend to 1/(4 pi)
    auto env = StaticEnvironment::constant(Window{150}, 1.0);
    std::vector<double> grid{25.0, 50.0, 100.0};
    std::vector<double> grid4{100.0, 200.0, 400.0};
    auto v = llt_curve(env, Speed::vsrw, grid);
    auto c = llt_curve(env, Speed::csrw, grid4);
    auto wide = llt_curve(env, Speed::vsrw, grid, 2 * leak_radius(4.0, 100.0, 1e-6));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(std::abs(v[k].tp - c[k].tp) < 1e-9);
        CHECK(std::abs(v[k].tp - wide[k].tp) < 1e-6);
        if (k > 0) CHECK(v[k].tp < v[k - 1].tp + 1e-12);
    }
}

TEST_CASE("gaussian diagnostic on the homogeneous lattice") {
    auto env = StaticEnvironment::constant(Window{120}, 1.0);
    double t = 40.0;
    auto rep = gaussian_diagnostic(env, Speed::vsrw, t, 60, {0.05, 0.1, 0.15, 0.2});
    REQUIRE(rep.fits.size() == 4);
    for (std::size_t k = 1; k < rep.fits.size(); ++k) CHECK(rep.fits[k].C_near >= rep.fits[k - 1].C_near);
    // Gaussian shape with the exact variance 2t per coordinate: c = 1/4 is the borderline,
    // anything smaller is uniformly bounded on |y| <= t
    CHECK(rep.fits[3].C_near < 1.0);
    CHECK(rep.fits[0].C_far > 0.0);
}
