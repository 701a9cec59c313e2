#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

struct Trajectory {
    Site start;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> times;  // jump times, strictly increasing
    std::vector<Site> sites;    // site entered at each jump
    Site end;                   // position at the horizon (or at abort)
    std::int64_t jumps = 0;
    bool boundary_hit = false;  // reached the outer frame of the window; excluded from estimators

    Site position(double t) const;
};

// Exact simulation of the VSRW or CSRW up to time T. With record = false only
// the end point and jump count are kept.
Trajectory simulate(const StaticEnvironment& env, Speed speed, Site x0, double T, std::uint64_t seed,
                    bool record = true);

struct ExitSample {
    double time = 0.0;
    Site exit;
    bool boundary_hit = false;
};

// Runs until the first time the walk is outside A.
ExitSample simulate_exit(const StaticEnvironment& env, Speed speed, Site x0, const Domain& A, std::uint64_t seed);

struct SigmaEstimate {
    std::array<double, 3> sigma{};  // (xx, yy, xy)
    std::array<double, 3> error{};  // jackknife standard errors over environments
    std::array<double, 6> cov{};    // covariance of the three means: xx.xx, yy.yy, xy.xy, xx.yy, xx.xy, yy.xy
    std::vector<std::array<double, 3>> per_env;
    int num_env = 0;
    int num_walk = 0;
    double horizon = 0.0;
    std::int64_t leaked = 0;
    double leak_fraction = 0.0;

    double det() const { return sigma[0] * sigma[1] - sigma[2] * sigma[2]; }
};

struct SigmaOptions {
    double horizon = 5000.0;
    int num_env = 20;
    int num_walk = 500;
    int window_L = 0;         // 0: 6 sqrt(2 c T) rounded up
    int start_radius = 8;     // start sites drawn from giant sites in this box around the center
    double leak_budget = 1e-3;
    int threads = 1;
};

SigmaEstimate estimate_sigma(const ConductanceLaw& law, Speed speed, const SigmaOptions& opts,
                             std::uint64_t master_seed);

struct GbarEstimate {
    double gbar = 0.0;
    double std_error = 0.0;
};

// gbar = 1 / (pi sqrt(det Sigma^2) theta) with first-order error propagation.
GbarEstimate gbar_from(const SigmaEstimate& sigma, double theta_hat, double theta_error = 0.0);

struct ExitStatistics {
    double mean_time = 0.0;
    double time_error = 0.0;
    std::vector<Site> exit_sites;  // sorted
    std::vector<double> counts;
    int walks = 0;
    int boundary_hits = 0;
};

ExitStatistics exit_statistics(const StaticEnvironment& env, Speed speed, Site x0, const Domain& A, int num_walks,
                               std::uint64_t seed);

}  // namespace rcm
