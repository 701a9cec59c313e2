#pragma once

#include <functional>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

struct HeatOptions {
    double tol = 1e-10;  // Poisson tail dropped per propagation call
    double leak = 1e-6;  // mass budget for the auto-sized box
    bool reflecting = false;
    // largest Lambda * dt handled in one uniformization sweep; longer steps are split
    double max_sweep = 1000.0;
};

// Box radius beyond which a walk with total jump rate at most Lambda leaves with
// probability below eps by time t (Bernstein bound on each coordinate).
int leak_radius(double Lambda, double t, double eps);

// largest total jump rate mu/theta over the window interior
double max_jump_rate(const StaticEnvironment& env, Speed speed);

// Forward evolution of a mass distribution by uniformization on the box
// [c - R, c + R]^2 (clipped to the window interior). Outside the box, and on
// sites excluded by an optional mask, mass is absorbed.
class HeatPropagator {
public:
    using OmegaFn = std::function<double(Site, int)>;

    HeatPropagator(Site center, int R, int window_L, Speed speed, HeatOptions opts = {});

    // omega(s, dir) is queried for every box site and all four directions
    void load(const OmegaFn& omega);
    void load(const StaticEnvironment& env);
    // refresh conductances only on the active region grown by `margin`
    void reload_active(const OmegaFn& omega, int margin);
    void set_mask(const Domain* alive);
    // uniformization rate used when it exceeds the largest total jump rate
    void set_lambda_floor(double lam) { lambda_floor_ = lam; }

    void set_point_mass(Site x);
    void set_mass(Site x, double m);
    // nu <- nu P_dt; adds int_0^dt nu_s ds to the running integral when requested
    void advance(double dt, bool integrate = false);

    double time() const { return time_; }
    double lambda() const { return lambda_; }
    double truncation_error() const { return trunc_; }
    double mass() const;
    double mass_at(Site s) const;
    double density(Site s) const;      // nu(s) / theta(s)
    double integral(Site s) const;     // int_0^t nu_u(s) du / theta(s)
    double theta_at(Site s) const;
    bool in_box(Site s) const;
    Site lo() const { return lo_; }
    Site hi() const { return hi_; }
    // active bounding box of the mass
    Site active_lo() const { return {ax0_, ay0_}; }
    Site active_hi() const { return {ax1_, ay1_}; }

private:
    std::size_t idx(int x, int y) const { return std::size_t(y - lo_.y) * std::size_t(w_) + std::size_t(x - lo_.x); }
    void fetch(const OmegaFn& omega, int x0, int x1, int y0, int y1);
    void rebuild_rates();
    void sweep(double m, bool integrate);
    void clear_dead();

    HeatOptions opts_;
    Speed speed_;
    Site lo_, hi_;
    int w_ = 0, h_ = 0;
    std::vector<double> wE_, wW_, wN_, wS_, theta_;
    std::vector<double> qE_, qW_, qN_, qS_, stay_;
    std::vector<double> nu_, next_, acc_, integ_;
    std::vector<char> alive_;
    double lambda_ = 0.0;
    double lambda_floor_ = 0.0;
    double time_ = 0.0;
    double trunc_ = 0.0;
    int ax0_ = 0, ax1_ = -1, ay0_ = 0, ay1_ = -1;
};

struct HeatKernelSlice {
    Site base;
    double t = 0.0;
    Site lo, hi;
    std::vector<double> p;  // p_t(base, .) on the box, row-major
    std::vector<double> theta;
    double eps_trunc = 0.0;
    double eps_leak = 0.0;  // 1 - sum_y p_t(base,y) theta(y)

    bool contains(Site s) const { return s.x >= lo.x && s.x <= hi.x && s.y >= lo.y && s.y <= hi.y; }
    double at(Site s) const;
    double theta_at(Site s) const;
};

// p_t(x, .) by uniformization; radius 0 selects the leak-controlled box.
HeatKernelSlice transition_density(const StaticEnvironment& env, Speed speed, Site x, double t, int radius = 0,
                                   HeatOptions opts = {});

struct LltPoint {
    double t;
    double tp;  // t * p_t(0,0)
};

// t * p_t(0,0) along an increasing time grid.
std::vector<LltPoint> llt_curve(const StaticEnvironment& env, Speed speed, const std::vector<double>& t_grid,
                                int radius = 0, HeatOptions opts = {});

std::vector<double> geometric_grid(double t0, double t1, double ratio);

struct GaussianFit {
    double c = 0.0;
    double C_near = 0.0;  // max over |y| <= t of t p_t(0,y) exp(c |y|^2 / t)
    Site worst_near;
    double C_far = 0.0;   // max over |y| > t of t p_t(0,y) exp(c |y| (1 v log(|y|/t)))
    Site worst_far;
};

struct GaussianReport {
    double t = 0.0;
    int radius = 0;
    std::vector<GaussianFit> fits;
};

GaussianReport gaussian_diagnostic(const StaticEnvironment& env, Speed speed, double t, int radius,
                                   const std::vector<double>& trial_c, HeatOptions opts = {});

// int_0^infty p^A_t(x, .) dt for the walk killed on leaving A, by time integration.
std::vector<double> killed_time_integral(const StaticEnvironment& env, Speed speed, const Domain& A, Site x,
                                         double mass_cutoff = 1e-12, HeatOptions opts = {});

}  // namespace rcm
