#pragma once

#include <string>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/harness/config.hpp"
#include "rcm/harness/output.hpp"
#include "rcm/operator.hpp"
#include "rcm/potential.hpp"

namespace rcm::harness {

struct Context {
    std::uint64_t master_seed = 1;
    int threads = 1;
    std::string out_dir = "out";
};

// Experiment ids: thm12, thm13-on, thm13-off, lemma22, cor23, classical-constant, theta, sigma,
// green, potential, llt, env-sample, env-inspect, dynamic-annealed, dynamic-interface, dynamic-thm34.
ExperimentResult run_experiment(const std::string& id, const Config& cfg, const Context& ctx);
const std::vector<std::string>& experiment_ids();

ExperimentResult verify_thm12(const Config& cfg, const Context& ctx);
ExperimentResult verify_thm13_ondiag(const Config& cfg, const Context& ctx);
ExperimentResult verify_thm13_offdiag(const Config& cfg, const Context& ctx);
ExperimentResult verify_lemma22(const Config& cfg, const Context& ctx);
ExperimentResult verify_cor23(const Config& cfg, const Context& ctx);
ExperimentResult classical_constant(const Config& cfg, const Context& ctx);

ExperimentResult run_theta(const Config& cfg, const Context& ctx);
ExperimentResult run_sigma(const Config& cfg, const Context& ctx);
ExperimentResult run_green(const Config& cfg, const Context& ctx);
ExperimentResult run_potential(const Config& cfg, const Context& ctx);
ExperimentResult run_llt(const Config& cfg, const Context& ctx);
ExperimentResult run_env_sample(const Config& cfg, const Context& ctx);
ExperimentResult run_env_inspect(const Config& cfg, const Context& ctx);

ExperimentResult dynamic_annealed(const Config& cfg, const Context& ctx);
ExperimentResult dynamic_interface(const Config& cfg, const Context& ctx);
ExperimentResult dynamic_thm34(const Config& cfg, const Context& ctx);

// Shared helpers.
ConductanceLaw law_from(const Config& cfg);
Speed speed_from(const Config& cfg);
PotentialOptions potential_options_from(const Config& cfg);

struct GbarValue {
    double value = 0.0;
    double std_error = 0.0;
    std::string method;  // config, exact or estimated
    double theta_hat = 0.0, theta_error = 0.0;
    double sigma_det = 0.0;
};

// gbar from the config, the exact homogeneous value 1/(2 pi c), or (Sigma^2, theta) estimates.
GbarValue resolve_gbar(const Config& cfg, const Context& ctx);

// Environment m of an experiment, re-centred so that the origin is the giant-cluster
// site closest to it (tau_z omega for that z).
StaticEnvironment centered_environment(const ConductanceLaw& law, int L, std::uint64_t seed);
// Site of D closest to p in Euclidean distance, ties to the smallest (x, y).
Site nearest_in(const Domain& D, Point p);
// g_D(x, y) from a single solve.
double green_value(const DirichletSolver& solver, Site x, Site y);

// strictly decreasing over the upper half of the grid (indices size/2 and up)
bool decreasing_top_half(const std::vector<double>& v);

}  // namespace rcm::harness
