#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/heatkernel.hpp"
#include "rcm/lattice.hpp"
#include "rcm/montecarlo.hpp"

namespace rcm {

// V(r) = kappa r^2 / 2 + eps cos r, so kappa - |eps| <= V'' <= kappa + |eps|.
struct InterfacePotential {
    double kappa = 1.0;
    double eps = 0.0;

    double dV(double r) const { return kappa * r - eps * std::sin(r); }
    double d2V(double r) const { return kappa - eps * std::cos(r); }
    double c_minus() const { return kappa - std::abs(eps); }
    double c_plus() const { return kappa + std::abs(eps); }
    void validate() const;
};

// Heights on the torus of side L with tilt u: phi(x) = psi(x) + u . x with psi periodic.
struct InterfaceField {
    int L = 0;
    std::vector<double> psi;  // row-major over {0..L-1}^2
    InterfacePotential V;
    double ux = 0.0, uy = 0.0;
    double h = 0.0;
    double noise = 1.0;  // multiplies the sqrt(2h) Gaussian increment; 0 gives gradient flow
    std::uint64_t seed = 0;
    std::int64_t steps = 0;

    std::size_t index(int x, int y) const;  // wraps periodically
    double phi(Site s) const;
    // phi(s + e) - phi(s) for dir 0 (east) or 2 (north)
    double gradient(Site s, int dir) const;
};

// Flat field; h = 0 selects the default 0.05 / c_plus.
InterfaceField make_interface(int L, const InterfacePotential& V, double ux, double uy, double h, std::uint64_t seed);

// One Euler-Maruyama step; throws DomainError on non-finite heights.
void advance_interface(InterfaceField& field, std::int64_t steps = 1);
InterfaceField interface_step(InterfaceField field);

// Torus conductances V''(grad phi) on east and north edges.
struct TorusFrame {
    int L = 0;
    std::vector<double> east, north;
    double at(Site s, int dir) const;  // any direction, periodic
};

TorusFrame hs_frame(const InterfaceField& field);
// Periodic extension of the frame onto a window (half-width L/2 when window_L = 0).
StaticEnvironment hs_conductances(const InterfaceField& field, int window_L = 0);

// Piecewise-constant-in-time conductances: frame k is in force on [k delta, (k+1) delta).
class DynamicEnvironment {
public:
    enum class Kind { frames, law, interface };

    // Frames repeat cyclically.
    static DynamicEnvironment from_frames(double delta, std::vector<StaticEnvironment> frames);
    // Frame k draws every edge independently from the law (fresh i.i.d. environment per frame).
    static DynamicEnvironment from_law(const ConductanceLaw& law, double delta, std::uint64_t seed);
    // Frames from the Langevin interface, sampled every delta up to the horizon.
    static DynamicEnvironment from_interface(InterfaceField field, double delta, double horizon);

    Kind kind() const { return kind_; }
    double delta() const { return delta_; }
    double c_lo() const { return c_lo_; }
    double c_hi() const { return c_hi_; }
    bool elliptic() const { return c_lo_ > 0.0 && std::isfinite(c_hi_); }
    int frame_at(double t) const { return int(std::floor(t / delta_)); }
    // sites where conductances are defined (the window interior for frame lists)
    bool inside(Site s) const;
    double omega(int frame, Site s, int dir) const;
    std::string describe() const;

private:
    Kind kind_ = Kind::law;
    double delta_ = 1.0;
    double c_lo_ = 0.0, c_hi_ = 0.0;
    std::vector<StaticEnvironment> frames_;
    ConductanceLaw law_;
    std::uint64_t seed_ = 0;
    std::vector<TorusFrame> torus_;
};

// Thinning against the dominating rate 4 c_hi; VSRW (theta = 1).
Trajectory simulate_inhomogeneous(const DynamicEnvironment& denv, Site x0, double T, std::uint64_t seed,
                                  bool record = true);

// Quenched p_{0,t}(x, .) of the dynamic walk at increasing times, by uniformization frame by frame.
struct DynamicSnapshot {
    double t = 0.0;
    Site lo, hi;
    std::vector<double> p;         // density on [lo, hi], row-major
    std::vector<double> integral;  // int_0^t p_s(x, .) ds when requested
    double truncation = 0.0;
    double at(Site s) const;
    double integral_at(Site s) const;
};

struct DynamicHeatOptions {
    HeatOptions heat;
    int radius = 0;               // 0: leak-controlled box
    double crop = 0.0;            // > 0: snapshots keep |s - x|_inf <= crop * sqrt(c_hi t) + 4
    bool integrate = false;
};

std::vector<DynamicSnapshot> dynamic_density_path(const DynamicEnvironment& denv, Site x,
                                                  const std::vector<double>& times,
                                                  const DynamicHeatOptions& opts = {});

using DynamicFactory = std::function<DynamicEnvironment(int m)>;

struct AnnealedKernelEstimate {
    double value = 0.0;
    double std_error = 0.0;
    int samples = 0;
};

// Environment average of p_{0,t}(0, .) with per-site standard errors.
struct AnnealedField {
    double t = 0.0;
    Site lo, hi;
    std::vector<double> mean, std_error;
    int samples = 0;
    std::vector<double> grad_error_east, grad_error_north;  // standard errors of mean(s + e) - mean(s)
    bool contains(Site s) const { return s.x >= lo.x && s.x <= hi.x && s.y >= lo.y && s.y <= hi.y; }
    double at(Site s) const;
    double error_at(Site s) const;
    double total_mass() const;
    // largest |mean(x) - mean(y)| over nearest-neighbour pairs, its edge and standard error
    struct Gradient {
        double value = 0.0;
        double std_error = 0.0;
        Site x, y;
    };
    Gradient max_gradient() const;
};

std::vector<AnnealedField> annealed_density_path(const DynamicFactory& factory, const std::vector<double>& times,
                                                 int num_env, const DynamicHeatOptions& opts = {}, int threads = 1);

AnnealedKernelEstimate annealed_density(const DynamicFactory& factory, double t, Site y, int num_env,
                                        const DynamicHeatOptions& opts = {}, int threads = 1);

struct AnnealedPotentialEstimate {
    double value = 0.0;       // int_0^T (pbar_t(0,0) - pbar_t(0,x)) dt
    double std_error = 0.0;
    double tail_indicator = 0.0;  // 2 |x|_1 max_edges |grad pbar_T| T, the size of the t^{-3/2} tail beyond T
    double cutoff = 0.0;
    int samples = 0;
};

AnnealedPotentialEstimate annealed_potential(const DynamicFactory& factory, Site x, double T_cut, int num_env,
                                             const DynamicHeatOptions& opts = {}, int threads = 1);
// Several targets from the same environment runs.
std::vector<AnnealedPotentialEstimate> annealed_potential(const DynamicFactory& factory, const std::vector<Site>& xs,
                                                          double T_cut, int num_env,
                                                          const DynamicHeatOptions& opts = {}, int threads = 1);

struct DynamicMomentReport {
    double p = 0.0, q = 0.0;
    double exponent_sum = 0.0;  // 1/(p-1) + 1/((p-1) q) + 1/q
    bool exponents_ok = false;
    double moment_p = 0.0;
    double moment_minus_q = 0.0;
    bool finite = false;
    bool satisfied = false;
    bool elliptic = false;
};

DynamicMomentReport check_dynamic_moments(const ConductanceLaw& law, double p, double q);

struct VarianceRow {
    int n = 0;
    double var = 0.0;
    double std_error = 0.0;
    double var_reflected = 0.0;  // same statistic for -n e
    bool drift = false;
};

struct VarianceOptions {
    std::vector<int> n_grid{1, 2, 4, 8, 16, 32, 64};
    int dir = 0;                 // 0: along e1, 2: along e2, 1: diagonal (n, n)
    double burn_in = 1000.0;     // in time units
    int samples = 2000;
    int thin = 10;               // steps between samples
    int batches = 20;
};

struct VarianceTable {
    std::vector<VarianceRow> rows;
    double h = 0.0;
    int L = 0;
    double slope = 0.0;          // fit of var against ln n
    double slope_error = 0.0;
    bool drift = false;
    std::vector<double> mean_gradient;  // time-averaged (e1, e2) gradients
};

// Stationary var[phi(n x) - phi(0)] - with tilt removed - averaged over torus translations.
VarianceTable variance_scaling(InterfaceField field, const VarianceOptions& opts);

}  // namespace rcm
