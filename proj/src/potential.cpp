#include "rcm/potential.hpp"

#include <cmath>

#include "rcm/errors.hpp"

namespace rcm {

Domain cluster_ball(const StaticEnvironment& env, Site center, double radius, BallShape shape) {
    const Window& w = env.window();
    auto sites = make_ball(shape, center, radius);
    Domain ballset(sites);
    for (Site s : sites)
        if (!w.interior(s)) {
            int need = std::max(std::abs(s.x), std::abs(s.y)) + 1;
            throw ConfigError("window half-width " + std::to_string(w.L) + " too small for a ball of radius " +
                              std::to_string(radius) + " around (" + std::to_string(center.x) + "," +
                              std::to_string(center.y) + "); need L >= " + std::to_string(need));
        }
    if (!ballset.contains(center) || env.mu(center) <= 0.0) throw DomainError("ball center is not on the open cluster");
    std::vector<Site> comp{center};
    std::vector<char> seen(ballset.size(), 0);
    seen[std::size_t(ballset.index(center))] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
        Site s = comp[head];
        for (int d = 0; d < 4; ++d) {
            Site t = s + kSteps[d];
            int j = ballset.index(t);
            if (j < 0 || seen[std::size_t(j)] || env.omega(s, d) <= 0.0) continue;
            seen[std::size_t(j)] = 1;
            comp.push_back(t);
        }
    }
    return Domain(std::move(comp));
}

double PotentialField::at(Site z) const {
    int i = domain.index(z);
    return g_base - (i < 0 ? 0.0 : green[std::size_t(i)]);
}

PotentialField potential_field(const DirichletSolver& solver, Site source, Site base) {
    const Domain& D = solver.generator().domain;
    if (!D.contains(source)) throw DomainError("source is outside the reference ball component");
    if (!D.contains(base)) throw DomainError("base point is outside the reference ball component");
    PotentialField f;
    f.domain = D;
    f.base = base;
    f.source = source;
    f.green = killed_green(solver, source, &f.report);
    if (source == base) {
        f.g_base = f.green[std::size_t(D.index(base))];
    } else {
        SolveReport r2;
        auto gb = killed_green(solver, base, &r2);
        f.g_base = gb[std::size_t(D.index(base))];
        f.report.residual = std::max(f.report.residual, r2.residual);
        f.report.iterations += r2.iterations;
        f.report.wall_seconds += r2.wall_seconds;
    }
    return f;
}

PotentialField potential_field(const StaticEnvironment& env, Speed speed, Site source, double radius,
                               const PotentialOptions& opts, Site base, Site center) {
    Domain D = cluster_ball(env, center, radius, opts.shape);
    Generator gen = assemble(env, speed, D);
    DirichletSolver solver(gen, opts.solve);
    return potential_field(solver, source, base);
}

PotentialEstimate potential_green_difference(const StaticEnvironment& env, Speed speed, Site x, Site y, int n,
                                             const PotentialOptions& opts) {
    PotentialEstimate est;
    est.method = "green_difference";
    est.cutoff = n;
    auto at_radius = [&](int r, double* residual) {
        Domain D = cluster_ball(env, {0, 0}, r, opts.shape);
        if (!D.contains(x) || !D.contains(y)) throw DomainError("point outside C_n(0): not connected to the origin inside the ball");
        Generator gen = assemble(env, speed, D);
        DirichletSolver solver(gen, opts.solve);
        auto f = potential_field(solver, y, {0, 0});
        if (residual) *residual = f.report.residual;
        return f.at(x);
    };
    est.value = at_radius(n, &est.solver_residual);
    if (n / 2 > l1_distance(x, {0, 0}) && n / 2 > l1_distance(y, {0, 0})) {
        try {
            est.richardson_delta = est.value - at_radius(n / 2, nullptr);
        } catch (const DomainError&) {
            est.richardson_delta = std::nan("");
        }
    } else {
        est.richardson_delta = std::nan("");
    }
    return est;
}

namespace {

// Integrated heat kernels from a base point, sampled at increasing horizons.
struct Integrator {
    HeatPropagator prop;
    Integrator(const StaticEnvironment& env, Speed speed, Site base, int R, const HeatOptions& h)
        : prop(base, R, env.window().L, speed, h) {
        prop.load(env);
        prop.set_point_mass(base);
    }
    void run_to(double T) { prop.advance(T - prop.time(), true); }
};

}  // namespace

TimePotentialField potential_time_field(const StaticEnvironment& env, Speed speed, Site y, double T,
                                        const PotentialOptions& opts) {
    if (!(T > 0.0)) throw ConfigError("time horizon must be positive");
    Site o{0, 0};
    if (!env.window().interior(o) || env.mu(o) <= 0.0) throw DomainError("origin is not on the open cluster");
    if (!env.window().interior(y) || env.mu(y) <= 0.0) throw DomainError("source is not on the open cluster");
    int R = leak_radius(max_jump_rate(env, speed), T, opts.heat.leak) + l1_distance(o, y);
    TimePotentialField f;
    f.T = T;
    Integrator i0(env, speed, o, R, opts.heat);
    i0.run_to(T);
    f.I00 = i0.prop.integral(o);
    Integrator iy(env, speed, y, R, opts.heat);
    iy.run_to(T);
    auto& sl = f.slice;
    sl.base = y;
    sl.t = T;
    sl.lo = iy.prop.lo();
    sl.hi = iy.prop.hi();
    for (int yy = sl.lo.y; yy <= sl.hi.y; ++yy)
        for (int xx = sl.lo.x; xx <= sl.hi.x; ++xx) {
            sl.p.push_back(iy.prop.integral({xx, yy}));
            sl.theta.push_back(iy.prop.theta_at({xx, yy}));
        }
    sl.eps_trunc = iy.prop.truncation_error();
    sl.eps_leak = std::max(0.0, 1.0 - iy.prop.mass());
    f.truncation = (i0.prop.truncation_error() + iy.prop.truncation_error()) * T;
    return f;
}

PotentialEstimate potential_time_integral(const StaticEnvironment& env, Speed speed, Site x, Site y, double T,
                                          const PotentialOptions& opts) {
    PotentialEstimate est;
    est.method = "time_integral";
    est.cutoff = T;
    if (x == Site{0, 0} && y == Site{0, 0}) return est;
    Site o{0, 0};
    if (!env.window().interior(o) || env.mu(o) <= 0.0) throw DomainError("origin is not on the open cluster");
    if (env.mu(y) <= 0.0) throw DomainError("source is not on the open cluster");
    int R = leak_radius(max_jump_rate(env, speed), T, opts.heat.leak) + l1_distance(o, y) + l1_distance(x, y);
    Integrator i0(env, speed, o, R, opts.heat);
    Integrator iy(env, speed, y, R, opts.heat);
    i0.run_to(T / 10.0);
    iy.run_to(T / 10.0);
    double early = i0.prop.integral(o) - iy.prop.integral(x);
    i0.run_to(T);
    iy.run_to(T);
    est.value = i0.prop.integral(o) - iy.prop.integral(x);
    est.richardson_delta = est.value - early;
    est.truncation = (i0.prop.truncation_error() + iy.prop.truncation_error()) * T;
    return est;
}

Lemma22Report check_lemma22_identity(const StaticEnvironment& env, Speed speed, const Domain& A, Site x, Site y,
                                     double n_ref, PotentialRoute route, const PotentialOptions& opts) {
    if (!A.contains(x)) throw DomainError("x is not in A");
    Lemma22Report rep;
    rep.route = route;
    rep.cutoff = n_ref;
    Generator gen = assemble(env, speed, A);
    DirichletSolver solver(gen, opts.solve);
    int ix = A.index(x);
    if (A.contains(y)) rep.g_A = killed_green(solver, y)[std::size_t(ix)];
    std::function<double(Site)> a;
    PotentialField pf;
    TimePotentialField tf;
    if (route == PotentialRoute::green_difference) {
        pf = potential_field(env, speed, y, n_ref, opts);
        for (Site s : A.sites())
            if (!pf.contains(s)) throw DomainError("A is not inside the reference ball component");
        a = [&pf](Site z) { return pf.at(z); };
    } else {
        tf = potential_time_field(env, speed, y, n_ref, opts);
        a = [&tf](Site z) { return tf.at(z); };
    }
    auto h = harmonic_extension(solver, a);
    rep.exit_term = h[std::size_t(ix)];
    rep.a_xy = a(x);
    rep.residual = std::abs(rep.g_A - (rep.exit_term - rep.a_xy));
    return rep;
}

Corollary23Report check_corollary23(const StaticEnvironment& env, Speed speed, Site x, Site y, int n_outer,
                                    int n_ref, const PotentialOptions& opts) {
    Site o{0, 0};
    if (x == o || y == o) throw DomainError("x and y must differ from the origin");
    Corollary23Report rep;
    Domain ref = cluster_ball(env, o, n_ref, opts.shape);
    Generator ref_gen = assemble(env, speed, ref);
    DirichletSolver ref_solver(ref_gen, opts.solve);
    auto fy = potential_field(ref_solver, y, o);
    auto f0 = potential_field(ref_solver, o, o);
    rep.combination = fy.at(o) - fy.at(x) + f0.at(x);
    rep.a_x0 = f0.at(x);

    Domain outer = cluster_ball(env, o, n_outer, opts.shape);
    std::vector<Site> punctured;
    for (Site s : outer.sites())
        if (s != o) punctured.push_back(s);
    Domain A(std::move(punctured));
    if (!A.contains(x) || !A.contains(y)) throw DomainError("x or y not in the punctured ball component");
    Generator gen = assemble(env, speed, A);
    DirichletSolver solver(gen, opts.solve);
    GreenField gy{A, killed_green(solver, y), {}};
    rep.g_A = gy.at(x);
    rep.residual = std::abs(rep.g_A - rep.combination);
    GreenField gx{A, killed_green(solver, x), {}};
    rep.g_A_x0 = gx.at(o);
    for (int k = 2; k <= n_outer / 2; k *= 2) {
        Site yk{k, 0};
        if (A.contains(yk)) rep.limit_table.emplace_back(yk, gx.at(yk));
    }
    return rep;
}

std::vector<FTermRow> f_term_estimate(const StaticEnvironment& env, Speed speed, Site x, const std::vector<int>& n_grid,
                                      double gbar, const PotentialOptions& opts) {
    Site o{0, 0};
    if (x == o) throw DomainError("x must differ from the origin");
    std::vector<FTermRow> rows;
    for (int n : n_grid) {
        Domain ballc = cluster_ball(env, o, n, opts.shape);
        std::vector<Site> punctured;
        for (Site s : ballc.sites())
            if (s != o) punctured.push_back(s);
        Domain D(std::move(punctured));
        if (!D.contains(x)) throw DomainError("x is not connected to the origin inside the ball");
        Generator gen = assemble(env, speed, D);
        DirichletSolver solver(gen, opts.solve);
        auto h = harmonic_extension(solver, [o](Site z) { return z == o ? 0.0 : 1.0; });
        FTermRow r;
        r.n = n;
        r.escape = h[std::size_t(D.index(x))];
        r.scaled = gbar * r.escape * std::log(double(n));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace rcm
