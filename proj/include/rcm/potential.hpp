#pragma once

#include <string>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/heatkernel.hpp"
#include "rcm/lattice.hpp"
#include "rcm/operator.hpp"

namespace rcm {

struct PotentialOptions {
    BallShape shape = BallShape::diamond;
    SolveOptions solve;
    HeatOptions heat;
};

struct PotentialEstimate {
    double value = 0.0;
    std::string method;      // green_difference or time_integral
    double cutoff = 0.0;     // n or T
    double richardson_delta = 0.0;  // change from cutoff/2 (green) or last-decade contribution (time)
    double solver_residual = 0.0;
    double truncation = 0.0;
};

// Open component of `center` inside the ball of the given shape and radius.
Domain cluster_ball(const StaticEnvironment& env, Site center, double radius, BallShape shape);

// a_n(., y) = g_B(b,b) - g_B(., y) on B = component of the ball around `center`,
// where b is the base point playing the role of the origin in the definition of a.
struct PotentialField {
    Domain domain;
    Site base;
    Site source;
    double g_base = 0.0;         // g_B(b, b)
    std::vector<double> green;   // g_B(., y)
    SolveReport report;

    bool contains(Site s) const { return domain.contains(s); }
    double at(Site z) const;     // a(z, y)
};

PotentialField potential_field(const StaticEnvironment& env, Speed speed, Site source, double radius,
                               const PotentialOptions& opts = {}, Site base = {0, 0}, Site center = {0, 0});
// Same, reusing a solver on a prepared domain.
PotentialField potential_field(const DirichletSolver& solver, Site source, Site base = {0, 0});

PotentialEstimate potential_green_difference(const StaticEnvironment& env, Speed speed, Site x, Site y, int n,
                                             const PotentialOptions& opts = {});

// a^T(z, y) = int_0^T (p_t(0,0) - p_t(z,y)) dt on the box around y.
struct TimePotentialField {
    double T = 0.0;
    double I00 = 0.0;        // int_0^T p_t(0,0) dt
    HeatKernelSlice slice;   // holds int_0^T p_t(y, .) dt in place of p
    double truncation = 0.0;
    double at(Site z) const { return I00 - slice.at(z); }
    bool contains(Site z) const { return slice.contains(z); }
};

TimePotentialField potential_time_field(const StaticEnvironment& env, Speed speed, Site y, double T,
                                        const PotentialOptions& opts = {});

PotentialEstimate potential_time_integral(const StaticEnvironment& env, Speed speed, Site x, Site y, double T,
                                          const PotentialOptions& opts = {});

enum class PotentialRoute { green_difference, time_integral };

struct Lemma22Report {
    double g_A = 0.0;       // g_A(x, y)
    double exit_term = 0.0; // E_x[a(X_tau, y)]
    double a_xy = 0.0;
    double residual = 0.0;
    double cutoff = 0.0;
    PotentialRoute route = PotentialRoute::green_difference;
};

// |g_A(x,y) - (E_x[a(X_tau_A, y)] - a(x,y))| with a from the chosen route at cutoff n_ref
// (ball radius, or time horizon for the time-integral route).
Lemma22Report check_lemma22_identity(const StaticEnvironment& env, Speed speed, const Domain& A, Site x, Site y,
                                     double n_ref, PotentialRoute route = PotentialRoute::green_difference,
                                     const PotentialOptions& opts = {});

struct Corollary23Report {
    double g_A = 0.0;          // g_A(x, y), A = (ball cluster) minus the origin
    double combination = 0.0;  // a(0,y) - a(x,y) + a(x,0)
    double residual = 0.0;
    double g_A_x0 = 0.0;       // g_A(x, 0), zero by definition
    double a_x0 = 0.0;         // a(x, 0), the limit of g_A(x, y) as |y| grows
    std::vector<std::pair<Site, double>> limit_table;  // (y_k, g_A(x, y_k))
};

Corollary23Report check_corollary23(const StaticEnvironment& env, Speed speed, Site x, Site y, int n_outer,
                                    int n_ref, const PotentialOptions& opts = {});

struct FTermRow {
    int n = 0;
    double escape = 0.0;  // P_x[tau_B(0,n) < tau_A]
    double scaled = 0.0;  // gbar * escape * ln n
};

std::vector<FTermRow> f_term_estimate(const StaticEnvironment& env, Speed speed, Site x, const std::vector<int>& n_grid,
                                      double gbar, const PotentialOptions& opts = {});

}  // namespace rcm
