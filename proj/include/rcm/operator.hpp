#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/errors.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

// Generator L_theta restricted to a domain: (L f)(x) = (1/theta(x)) sum_y omega(x,y) (f(y) - f(x)).
struct Generator {
    Speed speed = Speed::vsrw;
    Domain domain;
    std::vector<double> theta;
    std::vector<std::array<double, 4>> weight; // omega along each direction
    std::vector<std::array<int, 4>> nbr;       // domain index of each neighbour, -1 if outside

    std::size_t size() const { return domain.size(); }
    double rate(std::size_t i, int d) const { return weight[i][d] / theta[i]; }
    double total_rate(std::size_t i) const;
};

Generator assemble(const StaticEnvironment& env, Speed speed, const Domain& domain);

// f must be defined on the domain and on all its lattice neighbours.
std::vector<double> apply(const Generator& gen, const std::function<double(Site)>& f);

enum class SolverKind { cg, cholesky };
SolverKind parse_solver(const std::string& s);

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 0; // 0 means 50 * sqrt(n)
    SolverKind kind = SolverKind::cg;
};

// Symmetric form theta(x) * (-L) of the Dirichlet problem on the sites of the
// domain whose open component can leave the domain. Sites in closed-off
// components are marked trapped and excluded.
class DirichletSolver {
public:
    DirichletSolver(const Generator& gen, SolveOptions opts = {});
    ~DirichletSolver();
    DirichletSolver(const DirichletSolver&) = delete;
    DirichletSolver& operator=(const DirichletSolver&) = delete;

    const Generator& generator() const { return *gen_; }
    bool trapped(std::size_t i) const { return !active_[i]; }
    // Solves theta(x) (-L u)(x) = b(x) with u = 0 outside the domain.
    std::vector<double> solve(const std::vector<double>& b, SolveReport* report = nullptr) const;

private:
    std::vector<double> solve_cg(const std::vector<double>& b, SolveReport& rep) const;

    const Generator* gen_;
    SolveOptions opts_;
    std::vector<char> active_;
    std::vector<double> diag_;
    struct Factor;
    std::unique_ptr<Factor> factor_;
};

struct GreenField {
    Domain domain;
    std::vector<double> values;
    SolveReport report;
    double at(Site s) const {
        int i = domain.index(s);
        return i < 0 ? 0.0 : values[std::size_t(i)];
    }
};

// g_A(., y) on A; zero off the component of y.
std::vector<double> killed_green(const DirichletSolver& solver, Site y, SolveReport* report = nullptr);
GreenField killed_green(const StaticEnvironment& env, Speed speed, const Domain& A, Site y,
                        SolveOptions opts = {});

// Solution of L h = 0 in A, h = F outside A. Trapped sites get NaN.
std::vector<double> harmonic_extension(const DirichletSolver& solver, const std::function<double(Site)>& F,
                                       SolveReport* report = nullptr);
std::vector<double> harmonic_extension(const StaticEnvironment& env, Speed speed, const Domain& A,
                                       const std::function<double(Site)>& F, SolveOptions opts = {});

// E_x[F(X_{tau_A})]
double exit_functional(const StaticEnvironment& env, Speed speed, Site x, const Domain& A,
                       const std::function<double(Site)>& F, SolveOptions opts = {});

// E_x[tau_A] = sum_y g_A(x,y) theta(y)
double mean_exit_time(const DirichletSolver& solver, Site x);
// Law of X_{tau_A} started at x, as (exterior site, probability) pairs in a fixed order.
std::vector<std::pair<Site, double>> exit_distribution(const DirichletSolver& solver, Site x);

}  // namespace rcm
