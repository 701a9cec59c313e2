#include <cmath>
#include <numbers>

#include "rcm/errors.hpp"
#include "rcm/harness/experiments.hpp"
#include "rcm/montecarlo.hpp"
#include "rcm/percolation.hpp"
#include "rcm/rng.hpp"

namespace rcm::harness {

ConductanceLaw law_from(const Config& cfg) {
    ConductanceLaw law;
    law.kind = parse_law_kind(cfg.get_string("law", "constant"));
    law.p_open = cfg.get_double("p_open", 1.0);
    law.c = cfg.get_double("c", 1.0);
    law.lo = cfg.get_double("lo", 0.0);
    law.hi = cfg.get_double("hi", 0.0);
    law.shape = cfg.get_double("shape", 0.0);
    law.scale = cfg.get_double("scale", 1.0);
    law.validate();
    return law;
}

Speed speed_from(const Config& cfg) {
    return parse_speed(cfg.get_string("speed", "vsrw"));
}

PotentialOptions potential_options_from(const Config& cfg) {
    PotentialOptions o;
    o.shape = parse_ball_shape(cfg.get_string("ball_shape", "diamond"));
    o.solve.kind = parse_solver(cfg.get_string("solver", "cholesky"));
    o.solve.tol = cfg.get_double("solver_tol", 1e-10);
    o.heat.tol = cfg.get_double("heat_tol", 1e-10);
    o.heat.leak = cfg.get_double("heat_leak", 1e-6);
    return o;
}

GbarValue resolve_gbar(const Config& cfg, const Context& ctx) {
    GbarValue g;
    if (cfg.has("gbar")) {
        g.value = cfg.get_double("gbar", 0.0);
        g.std_error = cfg.get_double("gbar_err", 0.0);
        g.method = "config";
        return g;
    }
    ConductanceLaw law = law_from(cfg);
    if (law.kind == LawKind::constant && law.p_open == 1.0) {
        g.value = 1.0 / (2.0 * std::numbers::pi * law.c);
        g.method = "exact";
        g.theta_hat = 1.0;
        g.sigma_det = 4.0 * law.c * law.c;
        return g;
    }
    std::uint64_t seed = hash_keys(ctx.master_seed, {9});
    SigmaOptions so;
    so.horizon = cfg.get_double("sigma_T", 5000.0);
    so.num_env = cfg.get_int("sigma_env", 20);
    so.num_walk = cfg.get_int("sigma_walk", 500);
    so.window_L = cfg.get_int("sigma_L", 0);
    so.threads = ctx.threads;
    SigmaEstimate sig = estimate_sigma(law, Speed::vsrw, so, seed);
    ThetaEstimate th = estimate_theta(law, cfg.get_int("theta_L", 400), cfg.get_int("theta_seeds", 20),
                                      hash_keys(seed, {10}), true, ctx.threads);
    GbarEstimate ge = gbar_from(sig, th.theta_hat, th.std_error);
    g.value = ge.gbar;
    g.std_error = ge.std_error;
    g.method = "estimated";
    g.theta_hat = th.theta_hat;
    g.theta_error = th.std_error;
    g.sigma_det = sig.det();
    return g;
}

StaticEnvironment centered_environment(const ConductanceLaw& law, int L, std::uint64_t seed) {
    const int pad = 16;
    auto env = StaticEnvironment::sample(law, Window{L + pad}, seed);
    auto geom = clusters(env);
    Site z = nearest_cluster_point(geom, {0.0, 0.0});
    if (std::max(std::abs(z.x), std::abs(z.y)) >= pad) throw DomainError("no giant-cluster site near the origin");
    return env.shifted(z, L);
}

Site nearest_in(const Domain& D, Point p) {
    if (D.empty()) throw DomainError("empty domain");
    Site best = D[0];
    double best_d2 = -1.0;
    for (Site s : D.sites()) {
        double dx = s.x - p.x, dy = s.y - p.y, d2 = dx * dx + dy * dy;
        if (best_d2 < 0.0 || d2 < best_d2 || (d2 == best_d2 && s < best)) {
            best = s;
            best_d2 = d2;
        }
    }
    return best;
}

double green_value(const DirichletSolver& solver, Site x, Site y) {
    const Domain& D = solver.generator().domain;
    if (!D.contains(x) || !D.contains(y)) return 0.0;
    return killed_green(solver, y)[std::size_t(D.index(x))];
}

bool decreasing_top_half(const std::vector<double>& v) {
    for (std::size_t i = v.size() / 2; i + 1 < v.size(); ++i)
        if (!(v[i + 1] < v[i])) return false;
    return true;
}

}  // namespace rcm::harness
