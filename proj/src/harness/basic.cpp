#include <algorithm>
#include <cmath>
#include <filesystem>

#include "rcm/errors.hpp"
#include "rcm/harness/experiments.hpp"
#include "rcm/heatkernel.hpp"
#include "rcm/montecarlo.hpp"
#include "rcm/percolation.hpp"
#include "rcm/rng.hpp"

namespace rcm::harness {

ExperimentResult run_theta(const Config& cfg, const Context& ctx) {
    ExperimentResult res;
    res.id = "theta";
    const ConductanceLaw law = law_from(cfg);
    const int L = cfg.get_int("theta_L", 400);
    const int seeds = cfg.get_int("theta_seeds", 20);
    ThetaEstimate th = estimate_theta(law, L, seeds, ctx.master_seed, true, ctx.threads);
    Table t{"theta", {"law", "p_open", "L", "num_seeds", "theta_hat", "std_error", "spanning_runs", "subcritical_warning"}, {}};
    t.add({law_kind_name(law.kind), fmt(law.p_open), fmt(L), fmt(seeds), fmt(th.theta_hat), fmt(th.std_error),
           fmt(th.spanning_runs), fmt(int(th.subcritical_warning))});
    res.tables = {t};
    res.estimates["theta_hat"] = th.theta_hat;
    res.estimates["theta_err"] = th.std_error;
    res.estimates["subcritical_warning"] = th.subcritical_warning;
    return res;
}

ExperimentResult run_sigma(const Config& cfg, const Context& ctx) {
    ExperimentResult res;
    res.id = "sigma";
    const ConductanceLaw law = law_from(cfg);
    const Speed speed = speed_from(cfg);
    SigmaOptions so;
    so.horizon = cfg.get_double("sigma_T", 5000.0);
    so.num_env = cfg.get_int("sigma_env", 20);
    so.num_walk = cfg.get_int("sigma_walk", 500);
    so.window_L = cfg.get_int("sigma_L", 0);
    so.threads = ctx.threads;
    SigmaEstimate s = estimate_sigma(law, speed, so, ctx.master_seed);
    Table per{"sigma_env", {"env", "sxx", "syy", "sxy"}, {}};
    for (std::size_t m = 0; m < s.per_env.size(); ++m)
        per.add({fmt(int(m)), fmt(s.per_env[m][0]), fmt(s.per_env[m][1]), fmt(s.per_env[m][2])});
    Table t{"sigma", {"sxx", "syy", "sxy", "err_xx", "err_yy", "err_xy", "det", "horizon", "num_env", "num_walk", "leak_fraction"}, {}};
    t.add({fmt(s.sigma[0]), fmt(s.sigma[1]), fmt(s.sigma[2]), fmt(s.error[0]), fmt(s.error[1]), fmt(s.error[2]),
           fmt(s.det()), fmt(s.horizon), fmt(s.num_env), fmt(s.num_walk), fmt(s.leak_fraction)});
    res.estimates["sigma"] = s.sigma;
    res.estimates["sigma_err"] = s.error;
    res.estimates["det"] = s.det();
    if (speed == Speed::vsrw) {
        ThetaEstimate th = estimate_theta(law, cfg.get_int("theta_L", 400), cfg.get_int("theta_seeds", 20),
                                          hash_keys(ctx.master_seed, {10}), true, ctx.threads);
        GbarEstimate g = gbar_from(s, th.theta_hat, th.std_error);
        res.estimates["theta_hat"] = th.theta_hat;
        res.estimates["theta_err"] = th.std_error;
        res.estimates["gbar_hat"] = g.gbar;
        res.estimates["gbar_err"] = g.std_error;
    }
    res.tables = {t, per};
    return res;
}

ExperimentResult run_green(const Config& cfg, const Context& ctx) {
    ExperimentResult res;
    res.id = "green";
    const ConductanceLaw law = law_from(cfg);
    const Speed speed = speed_from(cfg);
    const PotentialOptions po = potential_options_from(cfg);
    const int r = cfg.get_int("A_radius", 16);
    auto env = centered_environment(law, r + 4, derive_seed(ctx.master_seed, 1, 0));
    Domain A = cluster_ball(env, {0, 0}, r, po.shape);
    Site y = nearest_in(A, {double(cfg.get_site("y", {0, 0}).x), double(cfg.get_site("y", {0, 0}).y)});
    GreenField g = killed_green(env, speed, A, y, po.solve);
    Table t{"green", {"x", "y", "g"}, {}};
    for (std::size_t i = 0; i < A.size(); ++i) t.add({fmt(A[i].x), fmt(A[i].y), fmt(g.values[i])});
    res.tables = {t};
    res.estimates["source"] = {y.x, y.y};
    res.estimates["domain_size"] = A.size();
    res.estimates["solver_residual"] = g.report.residual;
    res.estimates["mean_exit_time"] = [&] {
        Generator gen = assemble(env, speed, A);
        DirichletSolver solver(gen, po.solve);
        return mean_exit_time(solver, y);
    }();
    return res;
}

ExperimentResult run_potential(const Config& cfg, const Context& ctx) {
    ExperimentResult res;
    res.id = "potential";
    const ConductanceLaw law = law_from(cfg);
    const Speed speed = speed_from(cfg);
    const PotentialOptions po = potential_options_from(cfg);
    const int n = cfg.get_int("n_ref", 128);
    const double T = cfg.get_double("T_cut", 0.0);
    const Site x = cfg.get_site("x", {4, 0});
    const Site y = cfg.get_site("y", {0, 0});
    int L = n + l1_distance(x, {0, 0}) + l1_distance(y, {0, 0}) + 4;
    if (T > 0.0) L = std::max(L, leak_radius(4.0 * std::min(law.max_positive(), 1e6), T, po.heat.leak) + 4);
    auto env = centered_environment(law, L, derive_seed(ctx.master_seed, 1, 0));
    Table t{"potential", {"method", "cutoff", "x", "y", "x2", "y2", "a", "delta", "truncation"}, {}};
    auto g = potential_green_difference(env, speed, x, y, n, po);
    t.add({g.method, fmt(g.cutoff), fmt(x.x), fmt(x.y), fmt(y.x), fmt(y.y), fmt(g.value), fmt(g.richardson_delta),
           fmt(g.solver_residual)});
    res.estimates["a_green"] = g.value;
    if (T > 0.0) {
        auto e = potential_time_integral(env, speed, x, y, T, po);
        t.add({e.method, fmt(e.cutoff), fmt(x.x), fmt(x.y), fmt(y.x), fmt(y.y), fmt(e.value), fmt(e.richardson_delta),
               fmt(e.truncation)});
        res.estimates["a_time"] = e.value;
    }
    res.tables = {t};
    return res;
}

ExperimentResult run_llt(const Config& cfg, const Context& ctx) {
    ExperimentResult res;
    res.id = "llt";
    const ConductanceLaw law = law_from(cfg);
    const Speed speed = speed_from(cfg);
    const PotentialOptions po = potential_options_from(cfg);
    const auto t_grid = cfg.get_double_list("t_grid", geometric_grid(10.0, 1000.0, 2.0));
    if (t_grid.empty()) throw ConfigError("t_grid is empty");
    double rate_bound = 4.0 * law.max_positive();
    if (!std::isfinite(rate_bound)) rate_bound = 4.0 * law.mean() * 8.0;
    const int L = cfg.get_int("window_L", leak_radius(rate_bound, t_grid.back(), po.heat.leak) + 4);
    auto env = centered_environment(law, L, derive_seed(ctx.master_seed, 1, 0));
    auto curve = llt_curve(env, speed, t_grid, 0, po.heat);
    double reference = 0.0;
    if (cfg.has("gbar") || (law.kind == LawKind::constant && law.p_open == 1.0)) reference = resolve_gbar(cfg, ctx).value / 2.0;
    Table t{"llt", {"t", "t_p", "reference"}, {}};
    for (const auto& p : curve) t.add({fmt(p.t), fmt(p.tp), fmt(reference)});
    res.tables = {t};
    res.estimates["final_tp"] = curve.back().tp;
    res.estimates["reference"] = reference;
    return res;
}

ExperimentResult run_env_sample(const Config& cfg, const Context& ctx) {
    ExperimentResult res;
    res.id = "env-sample";
    const ConductanceLaw law = law_from(cfg);
    const int L = cfg.get_int("window_L", 64);
    auto env = StaticEnvironment::sample(law, Window{L}, derive_seed(ctx.master_seed, 1, 0));
    std::string path = cfg.get_string("snapshot", (std::filesystem::path(ctx.out_dir) / "env.rcm").string());
    write_snapshot(path, env);
    auto geom = clusters(env);
    Table t{"env_sample", {"L", "edges", "open_edges", "giant_size", "giant_spans", "snapshot"}, {}};
    t.add({fmt(L), fmt(static_cast<long long>(env.num_edges())), fmt(static_cast<long long>(env.num_open_edges())),
           fmt(static_cast<long long>(geom.giant_size())), fmt(int(geom.giant_spans)), path});
    res.tables = {t};
    res.estimates["snapshot"] = path;
    res.estimates["law"] = law.describe();
    return res;
}

ExperimentResult run_env_inspect(const Config& cfg, const Context&) {
    ExperimentResult res;
    res.id = "env-inspect";
    if (!cfg.has("snapshot")) throw ConfigError("env inspect needs the 'snapshot' key");
    std::string path = cfg.get_string("snapshot", "");
    auto env = read_snapshot(path);
    auto geom = clusters(env);
    double lo = 0.0, hi = 0.0, sum = 0.0;
    std::size_t open = 0;
    for (const auto* v : {&env.east(), &env.north()})
        for (double w : *v)
            if (w > 0.0) {
                lo = open ? std::min(lo, w) : w;
                hi = std::max(hi, w);
                sum += w;
                ++open;
            }
    Table t{"env_inspect", {"L", "edges", "open_edges", "min_open", "max_open", "mean_open", "giant_size", "giant_fraction", "giant_spans"}, {}};
    t.add({fmt(env.window().L), fmt(static_cast<long long>(env.num_edges())), fmt(static_cast<long long>(open)), fmt(lo),
           fmt(hi), fmt(open ? sum / double(open) : 0.0), fmt(static_cast<long long>(geom.giant_size())),
           fmt(double(geom.giant_size()) / double(env.window().num_sites())), fmt(int(geom.giant_spans))});
    res.tables = {t};
    res.estimates["snapshot"] = path;
    return res;
}

}  // namespace rcm::harness
