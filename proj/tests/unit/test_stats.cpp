#include <cmath>

#include "doctest.h"
#include "rcm/stats.hpp"

using namespace rcm;

TEST_CASE("mean and standard error") {
    auto me = mean_error({1.0, 2.0, 3.0, 4.0});
    CHECK(me.mean == doctest::Approx(2.5));
    CHECK(me.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("jackknife of a mean reproduces the standard error") {
    std::vector<double> v{0.3, 1.7, 2.2, 0.9, 1.4, 3.1};
    auto je = jackknife(v.size(), [&](std::size_t g) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (i != g) s += v[i];
        return s / double(v.size() - 1);
    });
    auto me = mean_error(v);
    CHECK(je.mean == doctest::Approx(me.mean));
    CHECK(je.std_error == doctest::Approx(me.std_error));
}

TEST_CASE("chi-square test") {
    auto exact = chi_square_test({25, 25, 25, 25}, {0.25, 0.25, 0.25, 0.25});
    CHECK(exact.statistic == 0.0);
    CHECK(exact.dof == 3);
    CHECK(exact.p_value == doctest::Approx(1.0));
    // statistic 2 on 3 degrees of freedom: upper tail 0.572407
    auto r = chi_square_test({30, 20, 25, 25}, {0.25, 0.25, 0.25, 0.25});
    CHECK(r.statistic == doctest::Approx(2.0));
    CHECK(r.p_value == doctest::Approx(0.572407).epsilon(1e-5));
    auto pooled = chi_square_test({50, 48, 1, 1}, {0.49, 0.49, 0.01, 0.01});
    CHECK(pooled.dof == 1);
}

TEST_CASE("linear fit") {
    auto f = linear_fit({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.rms_residual == doctest::Approx(0.0).epsilon(1e-12));
    auto g = linear_fit({0, 1, 2}, {0, 1, 0});
    CHECK(g.slope == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.slope_error > 0.0);
}

TEST_CASE("batch means flags drift") {
    std::vector<double> flat(2000, 1.0), ramp(2000);
    for (std::size_t i = 0; i < flat.size(); ++i) flat[i] += 0.01 * std::sin(double(i));
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = double(i) + std::sin(double(i));
    CHECK(!batch_means(flat).drift);
    CHECK(batch_means(flat).mean == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(batch_means(ramp).drift);
}
