#include "rcm/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rcm/errors.hpp"
#include "rcm/parallel.hpp"
#include "rcm/percolation.hpp"
#include "rcm/rng.hpp"
#include "rcm/stats.hpp"

namespace rcm {

namespace {

struct Walker {
    const StaticEnvironment& env;
    Speed speed;
    Xoshiro256 rng;
    Site pos;
    double w[4] = {0, 0, 0, 0};
    double total = 0.0;
    double rate = 0.0;

    Walker(const StaticEnvironment& e, Speed sp, Site x0, std::uint64_t seed) : env(e), speed(sp), rng(seed), pos(x0) {
        if (!env.window().interior(x0)) throw DomainError("start site is outside the window interior");
        load();
        if (total <= 0.0) throw DomainError("start site is isolated (no open edge)");
    }

    void load() {
        total = 0.0;
        for (int d = 0; d < 4; ++d) {
            w[d] = env.omega(pos, d);
            total += w[d];
        }
        rate = speed == Speed::vsrw ? total : 1.0;
    }

    double hold() { return rng.exponential(rate); }

    void jump() {
        double u = rng.uniform() * total;
        int d = 0;
        double cum = w[0];
        while (d < 3 && (u >= cum || w[d] <= 0.0)) cum += w[++d];
        while (w[d] <= 0.0) --d;  // rounding past the last open edge
        pos = pos + kSteps[d];
    }

    bool at_frame() const { return !env.window().interior(pos); }
};

}  // namespace

Site Trajectory::position(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return start;
    return sites[std::size_t(it - times.begin() - 1)];
}

Trajectory simulate(const StaticEnvironment& env, Speed speed, Site x0, double T, std::uint64_t seed, bool record) {
    Trajectory tr;
    tr.start = x0;
    tr.horizon = T;
    tr.seed = seed;
    Walker wk(env, speed, x0, seed);
    double t = 0.0;
    for (;;) {
        t += wk.hold();
        if (t > T) break;
        wk.jump();
        ++tr.jumps;
        if (record) {
            tr.times.push_back(t);
            tr.sites.push_back(wk.pos);
        }
        if (wk.at_frame()) {
            tr.boundary_hit = true;
            break;
        }
        wk.load();
    }
    tr.end = wk.pos;
    return tr;
}

ExitSample simulate_exit(const StaticEnvironment& env, Speed speed, Site x0, const Domain& A, std::uint64_t seed) {
    if (!A.contains(x0)) throw DomainError("start site is not in A");
    Walker wk(env, speed, x0, seed);
    ExitSample s;
    double t = 0.0;
    for (;;) {
        t += wk.hold();
        wk.jump();
        if (!A.contains(wk.pos)) break;
        if (wk.at_frame()) {
            s.boundary_hit = true;
            break;
        }
        wk.load();
    }
    s.time = t;
    s.exit = wk.pos;
    return s;
}

SigmaEstimate estimate_sigma(const ConductanceLaw& law, Speed speed, const SigmaOptions& opts,
                             std::uint64_t master_seed) {
    law.validate();
    if (!(opts.horizon > 0.0) || opts.num_env < 2 || opts.num_walk < 1)
        throw ConfigError("sigma estimation needs horizon > 0, at least 2 environments and 1 walk");
    int L = opts.window_L;
    if (L <= 0) {
        double c = std::isfinite(law.max_positive()) ? law.max_positive() : 4.0 * law.conditional_moment(1.0);
        L = int(std::ceil(6.0 * std::sqrt(2.0 * c * opts.horizon))) + opts.start_radius + 2;
    }
    const std::size_t M = std::size_t(opts.num_env);
    std::vector<std::array<double, 3>> per_env(M);
    std::vector<std::int64_t> leaked(M, 0);
    parallel_for(M, opts.threads, [&](std::size_t m) {
        StaticEnvironment env;
        ClusterGeometry geom;
        std::vector<Site> starts;
        for (int attempt = 0; starts.empty(); ++attempt) {
            if (attempt > 100) throw DomainError("no giant-cluster sites near the center; law may be subcritical");
            env = StaticEnvironment::sample(law, Window{L}, derive_seed(master_seed, 2, std::int64_t(m) * 1000 + attempt));
            geom = clusters(env);
            for (int y = -opts.start_radius; y <= opts.start_radius; ++y)
                for (int x = -opts.start_radius; x <= opts.start_radius; ++x)
                    if (geom.in_giant({x, y})) starts.push_back({x, y});
        }
        std::array<double, 3> acc{};
        int used = 0;
        for (int w = 0; w < opts.num_walk; ++w) {
            auto pick = make_stream(master_seed, {4, std::int64_t(m), w});
            Site x0 = starts[std::size_t(pick.below(int(starts.size())))];
            auto tr = simulate(env, speed, x0, opts.horizon, hash_keys(master_seed, {3, std::int64_t(m), w}), false);
            if (tr.boundary_hit) {
                ++leaked[m];
                continue;
            }
            double dx = tr.end.x - x0.x, dy = tr.end.y - x0.y;
            acc[0] += dx * dx;
            acc[1] += dy * dy;
            acc[2] += dx * dy;
            ++used;
        }
        for (auto& a : acc) a /= std::max(used, 1) * opts.horizon;
        per_env[m] = acc;
    });
    SigmaEstimate est;
    est.per_env = per_env;
    est.num_env = opts.num_env;
    est.num_walk = opts.num_walk;
    est.horizon = opts.horizon;
    for (auto l : leaked) est.leaked += l;
    est.leak_fraction = double(est.leaked) / (double(M) * opts.num_walk);
    if (est.leak_fraction > opts.leak_budget)
        throw ConfigError("boundary leak " + std::to_string(est.leak_fraction) + " exceeds budget " +
                          std::to_string(opts.leak_budget) + "; raise L above " + std::to_string(L));
    for (int k = 0; k < 3; ++k) {
        auto je = jackknife(M, [&](std::size_t g) {
            double s = 0.0;
            for (std::size_t i = 0; i < M; ++i)
                if (i != g) s += per_env[i][std::size_t(k)];
            return s / double(M - 1);
        });
        est.error[std::size_t(k)] = je.std_error;
        est.sigma[std::size_t(k)] = 0.0;
        for (auto& v : per_env) est.sigma[std::size_t(k)] += v[std::size_t(k)] / double(M);
    }
    const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    for (int p = 0; p < 6; ++p) {
        std::size_t a = std::size_t(pairs[p][0]), b = std::size_t(pairs[p][1]);
        double c = 0.0;
        for (auto& v : per_env) c += (v[a] - est.sigma[a]) * (v[b] - est.sigma[b]);
        est.cov[std::size_t(p)] = c / double(M - 1) / double(M);
    }
    return est;
}

GbarEstimate gbar_from(const SigmaEstimate& s, double theta_hat, double theta_error) {
    double det = s.det();
    if (!(det > 0.0)) throw DomainError("non-positive covariance determinant");
    if (!(theta_hat > 0.0)) throw DomainError("cluster density must be positive");
    GbarEstimate g;
    g.gbar = 1.0 / (std::numbers::pi * std::sqrt(det) * theta_hat);
    // d gbar / d(xx, yy, xy)
    double k = -g.gbar / (2.0 * det);
    double d0 = k * s.sigma[1], d1 = k * s.sigma[0], d2 = k * (-2.0 * s.sigma[2]);
    const auto& c = s.cov;
    double var = d0 * d0 * c[0] + d1 * d1 * c[1] + d2 * d2 * c[2] + 2 * d0 * d1 * c[3] + 2 * d0 * d2 * c[4] +
                 2 * d1 * d2 * c[5];
    double rel_theta = theta_error / theta_hat;
    var += g.gbar * g.gbar * rel_theta * rel_theta;
    g.std_error = std::sqrt(std::max(var, 0.0));
    return g;
}

ExitStatistics exit_statistics(const StaticEnvironment& env, Speed speed, Site x0, const Domain& A, int num_walks,
                               std::uint64_t seed) {
    std::vector<double> times;
    std::map<Site, double> hist;
    ExitStatistics st;
    for (int w = 0; w < num_walks; ++w) {
        auto s = simulate_exit(env, speed, x0, A, hash_keys(seed, {5, w}));
        if (s.boundary_hit) {
            ++st.boundary_hits;
            continue;
        }
        times.push_back(s.time);
        hist[s.exit] += 1.0;
    }
    auto me = mean_error(times);
    st.mean_time = me.mean;
    st.time_error = me.std_error;
    st.walks = int(times.size());
    for (auto& [site, c] : hist) {
        st.exit_sites.push_back(site);
        st.counts.push_back(c);
    }
    return st;
}

}  // namespace rcm
