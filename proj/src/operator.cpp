#include "rcm/operator.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

namespace rcm {

double Generator::total_rate(std::size_t i) const {
    return (weight[i][0] + weight[i][1] + weight[i][2] + weight[i][3]) / theta[i];
}

Generator assemble(const StaticEnvironment& env, Speed speed, const Domain& domain) {
    Generator g;
    g.speed = speed;
    g.domain = domain;
    const std::size_t n = domain.size();
    g.theta.resize(n);
    g.weight.resize(n);
    g.nbr.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Site s = domain[i];
        if (!env.window().interior(s))
            throw DomainError("domain site (" + std::to_string(s.x) + "," + std::to_string(s.y) +
                              ") lacks a full stencil inside the window");
        double th = env.theta(speed, s);
        if (!(th > 0.0)) throw DomainError("domain site with zero speed measure");
        g.theta[i] = th;
        for (int d = 0; d < 4; ++d) {
            g.weight[i][d] = env.omega(s, d);
            g.nbr[i][d] = domain.index(s + kSteps[d]);
        }
    }
    return g;
}

std::vector<double> apply(const Generator& gen, const std::function<double(Site)>& f) {
    std::vector<double> out(gen.size());
    for (std::size_t i = 0; i < gen.size(); ++i) {
        Site s = gen.domain[i];
        double fx = f(s);
        double acc = 0.0;
        for (int d = 0; d < 4; ++d)
            if (gen.weight[i][d] > 0.0) acc += gen.rate(i, d) * (f(s + kSteps[d]) - fx);
        out[i] = acc;
    }
    return out;
}

SolverKind parse_solver(const std::string& s) {
    if (s == "cg") return SolverKind::cg;
    if (s == "cholesky") return SolverKind::cholesky;
    throw ConfigError("unknown solver '" + s + "' (expected cg or cholesky)");
}

struct DirichletSolver::Factor {
    std::vector<int> compact;  // domain index -> row, -1 if trapped
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

DirichletSolver::DirichletSolver(const Generator& gen, SolveOptions opts) : gen_(&gen), opts_(opts) {
    const std::size_t n = gen.size();
    active_.assign(n, 0);
    diag_.assign(n, 0.0);
    std::vector<int> comp(n, -1);
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<std::size_t> members;
        bool exits = false;
        comp[s] = int(s);
        stack.push_back(s);
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            members.push_back(i);
            for (int d = 0; d < 4; ++d) {
                if (gen.weight[i][d] <= 0.0) continue;
                int j = gen.nbr[i][d];
                if (j < 0) {
                    exits = true;
                } else if (comp[std::size_t(j)] < 0) {
                    comp[std::size_t(j)] = int(s);
                    stack.push_back(std::size_t(j));
                }
            }
        }
        if (exits)
            for (std::size_t i : members) active_[i] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int d = 0; d < 4; ++d) acc += gen.theta[i] * gen.rate(i, d);
        diag_[i] = acc;
    }
    if (opts_.kind == SolverKind::cholesky) {
        factor_ = std::make_unique<Factor>();
        factor_->compact.assign(n, -1);
        int m = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (active_[i]) factor_->compact[i] = m++;
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(std::size_t(m) * 3);
        for (std::size_t i = 0; i < n; ++i) {
            int r = factor_->compact[i];
            if (r < 0) continue;
            trip.emplace_back(r, r, diag_[i]);
            for (int d = 0; d < 4; ++d) {
                int j = gen.nbr[i][d];
                if (j < 0 || gen.weight[i][d] <= 0.0) continue;
                int c = factor_->compact[std::size_t(j)];
                if (c >= 0 && c < r) trip.emplace_back(r, c, -gen.theta[i] * gen.rate(i, d));
            }
        }
        Eigen::SparseMatrix<double> M(m, m);
        M.setFromTriplets(trip.begin(), trip.end());
        factor_->ldlt.compute(M);
        if (factor_->ldlt.info() != Eigen::Success) {
            SolveReport rep;
            rep.tolerance = opts_.tol;
            throw SolverError("sparse factorization failed", rep);
        }
    }
}

DirichletSolver::~DirichletSolver() = default;

std::vector<double> DirichletSolver::solve_cg(const std::vector<double>& b, SolveReport& rep) const {
    const Generator& g = *gen_;
    const std::size_t n = g.size();
    int cap = opts_.max_iter > 0 ? opts_.max_iter : int(std::ceil(50.0 * std::sqrt(double(n))));
    auto matvec = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!active_[i]) {
                y[i] = 0.0;
                continue;
            }
            double acc = diag_[i] * x[i];
            for (int d = 0; d < 4; ++d) {
                int j = g.nbr[i][d];
                if (j >= 0) acc -= g.theta[i] * g.rate(i, d) * x[std::size_t(j)];
            }
            y[i] = acc;
        }
    };
    std::vector<double> x(n, 0.0), r(n, 0.0), z(n), p(n), q(n);
    double bnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (active_[i]) r[i] = b[i];
        bnorm += r[i] * r[i];
    }
    bnorm = std::sqrt(bnorm);
    rep.tolerance = opts_.tol;
    if (bnorm == 0.0) {
        rep.converged = true;
        return x;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = active_[i] ? r[i] / diag_[i] : 0.0;
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
    double rnorm = bnorm;
    int it = 0;
    while (it < cap) {
        matvec(p, q);
        double pq = 0.0;
        for (std::size_t i = 0; i < n; ++i) pq += p[i] * q[i];
        double alpha = rz / pq;
        double rr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            rr += r[i] * r[i];
        }
        ++it;
        rnorm = std::sqrt(rr);
        if (rnorm <= opts_.tol * bnorm) break;
        double rz_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = active_[i] ? r[i] / diag_[i] : 0.0;
            rz_new += r[i] * z[i];
        }
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    // recompute the true residual so the report does not rely on the recursion
    matvec(x, q);
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (active_[i]) tr += (b[i] - q[i]) * (b[i] - q[i]);
    rep.iterations = it;
    rep.residual = std::sqrt(tr) / bnorm;
    rep.converged = rnorm <= opts_.tol * bnorm;
    if (!rep.converged) throw SolverError("conjugate gradient did not converge within the iteration cap", rep);
    return x;
}

std::vector<double> DirichletSolver::solve(const std::vector<double>& b, SolveReport* report) const {
    auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    std::vector<double> x;
    if (opts_.kind == SolverKind::cg) {
        x = solve_cg(b, rep);
    } else {
        const std::size_t n = gen_->size();
        const auto& compact = factor_->compact;
        Eigen::VectorXd rhs(factor_->ldlt.rows());
        for (std::size_t i = 0; i < n; ++i)
            if (compact[i] >= 0) rhs[compact[i]] = b[i];
        Eigen::VectorXd sol = factor_->ldlt.solve(rhs);
        x.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            if (compact[i] >= 0) x[i] = sol[compact[i]];
        double bn = 0.0, rn = 0.0;
        const Generator& g = *gen_;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active_[i]) continue;
            double acc = diag_[i] * x[i];
            for (int d = 0; d < 4; ++d) {
                int j = g.nbr[i][d];
                if (j >= 0) acc -= g.theta[i] * g.rate(i, d) * x[std::size_t(j)];
            }
            rn += (b[i] - acc) * (b[i] - acc);
            bn += b[i] * b[i];
        }
        rep.tolerance = opts_.tol;
        rep.residual = bn > 0.0 ? std::sqrt(rn / bn) : 0.0;
        rep.iterations = 1;
        rep.converged = rep.residual <= opts_.tol;
        if (!rep.converged) throw SolverError("direct solve residual above tolerance", rep);
    }
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report) *report = rep;
    return x;
}

std::vector<double> killed_green(const DirichletSolver& solver, Site y, SolveReport* report) {
    const Generator& g = solver.generator();
    int iy = g.domain.index(y);
    if (iy < 0) throw DomainError("source site is not in the domain");
    if (solver.trapped(std::size_t(iy))) throw DomainError("source site lies in a component that never exits the domain");
    std::vector<double> b(g.size(), 0.0);
    // theta(x) (-L u)(x) = theta(x) 1_y(x) / theta(y) = 1_y(x)
    b[std::size_t(iy)] = 1.0;
    return solver.solve(b, report);
}

GreenField killed_green(const StaticEnvironment& env, Speed speed, const Domain& A, Site y, SolveOptions opts) {
    Generator g = assemble(env, speed, A);
    DirichletSolver solver(g, opts);
    GreenField out;
    out.values = killed_green(solver, y, &out.report);
    out.domain = A;
    return out;
}

std::vector<double> harmonic_extension(const DirichletSolver& solver, const std::function<double(Site)>& F,
                                       SolveReport* report) {
    const Generator& g = solver.generator();
    const std::size_t n = g.size();
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (solver.trapped(i)) continue;
        for (int d = 0; d < 4; ++d)
            if (g.nbr[i][d] < 0 && g.weight[i][d] > 0.0)
                b[i] += g.theta[i] * g.rate(i, d) * F(g.domain[i] + kSteps[d]);
    }
    auto h = solver.solve(b, report);
    for (std::size_t i = 0; i < n; ++i)
        if (solver.trapped(i)) h[i] = std::numeric_limits<double>::quiet_NaN();
    return h;
}

std::vector<double> harmonic_extension(const StaticEnvironment& env, Speed speed, const Domain& A,
                                       const std::function<double(Site)>& F, SolveOptions opts) {
    Generator g = assemble(env, speed, A);
    DirichletSolver solver(g, opts);
    return harmonic_extension(solver, F);
}

double exit_functional(const StaticEnvironment& env, Speed speed, Site x, const Domain& A,
                       const std::function<double(Site)>& F, SolveOptions opts) {
    int ix = A.index(x);
    if (ix < 0) throw DomainError("start site is not in the domain");
    auto h = harmonic_extension(env, speed, A, F, opts);
    if (std::isnan(h[std::size_t(ix)])) throw DomainError("start site never exits the domain");
    return h[std::size_t(ix)];
}

double mean_exit_time(const DirichletSolver& solver, Site x) {
    const Generator& g = solver.generator();
    auto gx = killed_green(solver, x);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += gx[i] * g.theta[i];
    return acc;
}

std::vector<std::pair<Site, double>> exit_distribution(const DirichletSolver& solver, Site x) {
    const Generator& g = solver.generator();
    auto gx = killed_green(solver, x);
    std::vector<std::pair<Site, double>> out;
    std::map<Site, std::size_t> slot;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int d = 0; d < 4; ++d) {
            if (g.nbr[i][d] >= 0 || g.weight[i][d] <= 0.0) continue;
            Site z = g.domain[i] + kSteps[d];
            auto [it, fresh] = slot.try_emplace(z, out.size());
            if (fresh) out.emplace_back(z, 0.0);
            out[it->second].second += gx[i] * g.weight[i][d];
        }
    }
    return out;
}

}  // namespace rcm
