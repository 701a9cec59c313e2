#include <algorithm>
#include <set>

#include "doctest.h"
#include "rcm/errors.hpp"
#include "rcm/lattice.hpp"

using namespace rcm;

TEST_CASE("neighbors come in east, west, north, south order") {
    auto n0 = neighbors({0, 0});
    CHECK(n0[0] == Site{1, 0});
    CHECK(n0[1] == Site{-1, 0});
    CHECK(n0[2] == Site{0, 1});
    CHECK(n0[3] == Site{0, -1});
    auto n1 = neighbors({2, -3});
    CHECK(n1[0] == Site{3, -3});
    CHECK(n1[1] == Site{1, -3});
    CHECK(n1[2] == Site{2, -2});
    CHECK(n1[3] == Site{2, -4});
    for (Site s : n1) CHECK(l1_distance(s, {2, -3}) == 1);
}

TEST_CASE("ball uses the strict l1 inequality") {
    auto b1 = ball({0, 0}, 1);
    REQUIRE(b1.size() == 1);
    CHECK(b1[0] == Site{0, 0});
    auto b2 = ball({0, 0}, 2);
    std::set<Site> s2(b2.begin(), b2.end());
    CHECK(s2 == std::set<Site>{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}});
    CHECK(ball({0, 0}, 0).empty());
}

TEST_CASE("ball and sphere cardinalities match brute force") {
    for (int r = 1; r <= 50; ++r) {
        std::size_t count_ball = 0, count_sphere = 0;
        for (int y = -r - 1; y <= r + 1; ++y)
            for (int x = -r - 1; x <= r + 1; ++x) {
                int d = std::abs(x) + std::abs(y);
                count_ball += d < r;
                count_sphere += d == r;
            }
        CHECK(ball({3, -7}, r).size() == count_ball);
        CHECK(count_ball == std::size_t(2 * r * r - 2 * r + 1));
        CHECK(sphere({3, -7}, r).size() == count_sphere);
        CHECK(count_sphere == std::size_t(4 * r));
    }
}

TEST_CASE("sphere joined with ball gives the next ball") {
    for (int r = 1; r <= 12; ++r) {
        std::set<Site> u;
        for (Site s : ball({1, 2}, r)) u.insert(s);
        for (Site s : sphere({1, 2}, r)) u.insert(s);
        auto next = ball({1, 2}, r + 1);
        CHECK(u == std::set<Site>(next.begin(), next.end()));
    }
    auto s1 = sphere({0, 0}, 1);
    CHECK(std::set<Site>(s1.begin(), s1.end()) == std::set<Site>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
}

TEST_CASE("ball membership is symmetric and strictly nested") {
    for (int r = 0; r <= 6; ++r) {
        auto b = ball({0, 0}, r);
        auto bn = ball({0, 0}, r + 1);
        CHECK(bn.size() > b.size());
        std::set<Site> big(bn.begin(), bn.end());
        for (Site s : b) CHECK(big.count(s) == 1);
    }
    Site a{2, 5}, c{-1, 3};
    for (int r = 0; r < 10; ++r) {
        auto ba = ball(a, r), bc = ball(c, r);
        bool c_in_a = std::find(ba.begin(), ba.end(), c) != ba.end();
        bool a_in_c = std::find(bc.begin(), bc.end(), a) != bc.end();
        CHECK(c_in_a == a_in_c);
    }
}

TEST_CASE("edge canonicalization is order insensitive") {
    Edge e1 = Edge::make({0, 0}, {1, 0});
    Edge e2 = Edge::make({1, 0}, {0, 0});
    CHECK(e1 == e2);
    CHECK(Edge::make(e1.a, e1.b) == e1);
    CHECK(e1.a == Site{0, 0});
    CHECK_THROWS_AS(Edge::make({0, 0}, {1, 1}), DomainError);
}

TEST_CASE("annulus targets lie in the annulus") {
    auto pts = annulus_targets({1.0, 2.0}, {4, 8});
    CHECK(pts.size() == 32);
    for (Point p : pts) {
        CHECK(euclid(p) >= 1.0 - 1e-12);
        CHECK(euclid(p) <= 2.0 + 1e-12);
    }
    auto fine = annulus_targets({1.0, 2.0}, {7, 16});
    // the finer mesh contains the coarse one, so its sup statistic can only grow
    for (Point p : pts) {
        bool found = std::any_of(fine.begin(), fine.end(), [&](Point q) {
            return std::abs(p.x - q.x) < 1e-12 && std::abs(p.y - q.y) < 1e-12;
        });
        CHECK(found);
    }
    CHECK_THROWS_AS(annulus_targets({1.0, 2.0}, {0, 8}), ConfigError);
    CHECK_THROWS_AS(annulus_targets({2.0, 1.0}, {4, 8}), ConfigError);
}

TEST_CASE("domain index round-trips and ignores duplicates") {
    Domain d({{0, 0}, {3, 1}, {0, 0}, {-2, 5}});
    CHECK(d.size() == 3);
    CHECK(d.index({3, 1}) == 1);
    CHECK(d.index({-2, 5}) == 2);
    CHECK(d.index({1, 1}) == -1);
    CHECK(d.index({100, 100}) == -1);
}

TEST_CASE("window indexing is row-major") {
    Window w{3};
    CHECK(w.num_sites() == 49);
    CHECK(w.index({-3, -3}) == 0);
    CHECK(w.index({-2, -3}) == 1);
    CHECK(w.index({-3, -2}) == 7);
    for (std::size_t i = 0; i < w.num_sites(); ++i) CHECK(w.index(w.site(i)) == i);
}
