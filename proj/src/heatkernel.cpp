#include "rcm/heatkernel.hpp"

#include <algorithm>
#include <cmath>

#include "rcm/errors.hpp"

namespace rcm {

int leak_radius(double Lambda, double t, double eps) {
    double l = std::log(4.0 / eps);
    return int(std::ceil(std::sqrt(2.0 * Lambda * t * l) + 2.0 * l / 3.0)) + 2;
}

HeatPropagator::HeatPropagator(Site center, int R, int window_L, Speed speed, HeatOptions opts)
    : opts_(opts), speed_(speed) {
    if (R < 0) throw ConfigError("negative propagation radius");
    int lim = window_L - 1;
    lo_ = {std::max(center.x - R, -lim), std::max(center.y - R, -lim)};
    hi_ = {std::min(center.x + R, lim), std::min(center.y + R, lim)};
    if (lo_.x > hi_.x || lo_.y > hi_.y) throw DomainError("propagation box is empty");
    w_ = hi_.x - lo_.x + 1;
    h_ = hi_.y - lo_.y + 1;
    std::size_t n = std::size_t(w_) * std::size_t(h_);
    for (auto* v : {&wE_, &wW_, &wN_, &wS_, &qE_, &qW_, &qN_, &qS_, &stay_, &nu_, &next_, &acc_, &integ_})
        v->assign(n, 0.0);
    theta_.assign(n, 1.0);
    alive_.assign(n, 1);
}

bool HeatPropagator::in_box(Site s) const {
    return s.x >= lo_.x && s.x <= hi_.x && s.y >= lo_.y && s.y <= hi_.y;
}

void HeatPropagator::fetch(const OmegaFn& omega, int x0, int x1, int y0, int y1) {
    x0 = std::max(x0, lo_.x);
    x1 = std::min(x1, hi_.x);
    y0 = std::max(y0, lo_.y);
    y1 = std::min(y1, hi_.y);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            std::size_t i = idx(x, y);
            Site s{x, y};
            wE_[i] = omega(s, 0);
            wW_[i] = omega(s, 1);
            wN_[i] = omega(s, 2);
            wS_[i] = omega(s, 3);
            if (opts_.reflecting) {
                if (x == hi_.x) wE_[i] = 0.0;
                if (x == lo_.x) wW_[i] = 0.0;
                if (y == hi_.y) wN_[i] = 0.0;
                if (y == lo_.y) wS_[i] = 0.0;
            }
            double mu = wE_[i] + wW_[i] + wN_[i] + wS_[i];
            theta_[i] = (speed_ == Speed::csrw && mu > 0.0) ? mu : 1.0;
        }
    }
}

void HeatPropagator::rebuild_rates() {
    double lam = lambda_floor_;
    const std::size_t n = nu_.size();
    for (std::size_t i = 0; i < n; ++i)
        if (alive_[i]) lam = std::max(lam, (wE_[i] + wW_[i] + wN_[i] + wS_[i]) / theta_[i]);
    if (!(lam > 0.0)) lam = 1.0;
    lambda_ = lam;
    for (std::size_t i = 0; i < n; ++i) {
        if (!alive_[i]) {
            qE_[i] = qW_[i] = qN_[i] = qS_[i] = stay_[i] = 0.0;
            continue;
        }
        double s = 1.0 / (lam * theta_[i]);
        qE_[i] = wE_[i] * s;
        qW_[i] = wW_[i] * s;
        qN_[i] = wN_[i] * s;
        qS_[i] = wS_[i] * s;
        stay_[i] = 1.0 - (qE_[i] + qW_[i] + qN_[i] + qS_[i]);
    }
    // moves into masked-out sites are absorbed there
}

void HeatPropagator::load(const OmegaFn& omega) {
    fetch(omega, lo_.x, hi_.x, lo_.y, hi_.y);
    rebuild_rates();
}

void HeatPropagator::load(const StaticEnvironment& env) {
    load([&env](Site s, int d) { return env.omega(s, d); });
}

void HeatPropagator::reload_active(const OmegaFn& omega, int margin) {
    if (ax1_ < ax0_) return;
    fetch(omega, ax0_ - margin, ax1_ + margin, ay0_ - margin, ay1_ + margin);
    rebuild_rates();
}

void HeatPropagator::set_mask(const Domain* alive) {
    for (int y = lo_.y; y <= hi_.y; ++y)
        for (int x = lo_.x; x <= hi_.x; ++x) alive_[idx(x, y)] = alive ? alive->contains({x, y}) : 1;
    rebuild_rates();
    clear_dead();
}

void HeatPropagator::clear_dead() {
    for (std::size_t i = 0; i < nu_.size(); ++i)
        if (!alive_[i]) nu_[i] = 0.0;
}

void HeatPropagator::set_point_mass(Site x) {
    std::fill(nu_.begin(), nu_.end(), 0.0);
    std::fill(integ_.begin(), integ_.end(), 0.0);
    time_ = 0.0;
    trunc_ = 0.0;
    ax0_ = ax1_ = x.x;
    ay0_ = ay1_ = x.y;
    set_mass(x, 1.0);
}

void HeatPropagator::set_mass(Site x, double m) {
    if (!in_box(x)) throw DomainError("initial mass outside the propagation box");
    nu_[idx(x.x, x.y)] = m;
    ax0_ = std::min(ax0_, x.x);
    ax1_ = std::max(ax1_, x.x);
    ay0_ = std::min(ay0_, x.y);
    ay1_ = std::max(ay1_, x.y);
}

void HeatPropagator::advance(double dt, bool integrate) {
    if (dt < 0.0) throw DomainError("negative time step");
    if (dt == 0.0) return;
    double total = lambda_ * dt;
    int pieces = std::max(1, int(std::ceil(total / opts_.max_sweep)));
    for (int k = 0; k < pieces; ++k) sweep(total / pieces, integrate);
    time_ += dt;
}

void HeatPropagator::sweep(double m, bool integrate) {
    // Poisson(m) weights in log space, normalized, with suffix sums for the tail
    int kmax = int(std::ceil(m + 12.0 * std::sqrt(m) + 40.0));
    std::vector<double> w(std::size_t(kmax) + 2, 0.0);
    double logm = std::log(m);
    double top = -1e300;
    std::vector<double> lw(std::size_t(kmax) + 1);
    for (int k = 0; k <= kmax; ++k) {
        lw[std::size_t(k)] = -m + k * logm - std::lgamma(double(k) + 1.0);
        top = std::max(top, lw[std::size_t(k)]);
    }
    double norm = 0.0;
    for (int k = 0; k <= kmax; ++k) norm += std::exp(lw[std::size_t(k)] - top);
    for (int k = 0; k <= kmax; ++k) w[std::size_t(k)] = std::exp(lw[std::size_t(k)] - top) / norm;
    std::vector<double> tail(std::size_t(kmax) + 2, 0.0);  // tail[k] = P(N >= k)
    for (int k = kmax; k >= 0; --k) tail[std::size_t(k)] = tail[std::size_t(k) + 1] + w[std::size_t(k)];
    int K = 0;
    while (K < kmax && tail[std::size_t(K) + 1] >= opts_.tol) ++K;
    trunc_ += tail[std::size_t(K) + 1];

    std::fill(acc_.begin(), acc_.end(), 0.0);
    const double inv_lam = 1.0 / lambda_;
    for (int k = 0; k <= K; ++k) {
        double wk = w[std::size_t(k)];
        double ik = tail[std::size_t(k) + 1] * inv_lam;
        for (int y = ay0_; y <= ay1_; ++y) {
            std::size_t row = idx(ax0_, y);
            for (int x = ax0_; x <= ax1_; ++x) {
                std::size_t i = row + std::size_t(x - ax0_);
                acc_[i] += wk * nu_[i];
                if (integrate) integ_[i] += ik * nu_[i];
            }
        }
        if (k == K) break;
        int nx0 = std::max(ax0_ - 1, lo_.x), nx1 = std::min(ax1_ + 1, hi_.x);
        int ny0 = std::max(ay0_ - 1, lo_.y), ny1 = std::min(ay1_ + 1, hi_.y);
        const std::size_t W = std::size_t(w_);
        for (int y = ny0; y <= ny1; ++y) {
            for (int x = nx0; x <= nx1; ++x) {
                std::size_t i = idx(x, y);
                double v = nu_[i] * stay_[i];
                if (x > lo_.x) v += nu_[i - 1] * qE_[i - 1];
                if (x < hi_.x) v += nu_[i + 1] * qW_[i + 1];
                if (y > lo_.y) v += nu_[i - W] * qN_[i - W];
                if (y < hi_.y) v += nu_[i + W] * qS_[i + W];
                next_[i] = v;
            }
        }
        for (int y = ny0; y <= ny1; ++y) {
            std::size_t row = idx(nx0, y);
            std::copy(next_.begin() + std::ptrdiff_t(row), next_.begin() + std::ptrdiff_t(row + std::size_t(nx1 - nx0 + 1)),
                      nu_.begin() + std::ptrdiff_t(row));
        }
        ax0_ = nx0;
        ax1_ = nx1;
        ay0_ = ny0;
        ay1_ = ny1;
    }
    std::swap(nu_, acc_);
    clear_dead();
}

double HeatPropagator::mass() const {
    double s = 0.0;
    for (int y = ay0_; y <= ay1_; ++y)
        for (int x = ax0_; x <= ax1_; ++x) s += nu_[idx(x, y)];
    return s;
}

double HeatPropagator::mass_at(Site s) const { return in_box(s) ? nu_[idx(s.x, s.y)] : 0.0; }

double HeatPropagator::theta_at(Site s) const { return in_box(s) ? theta_[idx(s.x, s.y)] : 0.0; }

double HeatPropagator::density(Site s) const {
    if (!in_box(s)) return 0.0;
    std::size_t i = idx(s.x, s.y);
    return nu_[i] / theta_[i];
}

double HeatPropagator::integral(Site s) const {
    if (!in_box(s)) return 0.0;
    std::size_t i = idx(s.x, s.y);
    return alive_[i] ? integ_[i] / theta_[i] : 0.0;
}

double HeatKernelSlice::at(Site s) const {
    if (!contains(s)) return 0.0;
    return p[std::size_t(s.y - lo.y) * std::size_t(hi.x - lo.x + 1) + std::size_t(s.x - lo.x)];
}

double HeatKernelSlice::theta_at(Site s) const {
    if (!contains(s)) return 0.0;
    return theta[std::size_t(s.y - lo.y) * std::size_t(hi.x - lo.x + 1) + std::size_t(s.x - lo.x)];
}

double max_jump_rate(const StaticEnvironment& env, Speed speed) {
    const Window& w = env.window();
    double lam = 0.0;
    for (int y = -w.L + 1; y < w.L; ++y)
        for (int x = -w.L + 1; x < w.L; ++x) {
            double mu = env.mu({x, y});
            if (mu > 0.0) lam = std::max(lam, speed == Speed::vsrw ? mu : 1.0);
        }
    return lam > 0.0 ? lam : 1.0;
}

namespace {

HeatKernelSlice snapshot(const HeatPropagator& prop, Site base) {
    HeatKernelSlice sl;
    sl.base = base;
    sl.t = prop.time();
    sl.lo = prop.lo();
    sl.hi = prop.hi();
    double total = 0.0;
    for (int y = sl.lo.y; y <= sl.hi.y; ++y)
        for (int x = sl.lo.x; x <= sl.hi.x; ++x) {
            sl.p.push_back(prop.density({x, y}));
            sl.theta.push_back(prop.theta_at({x, y}));
            total += prop.mass_at({x, y});
        }
    sl.eps_trunc = prop.truncation_error();
    sl.eps_leak = std::max(0.0, 1.0 - total);
    return sl;
}

}  // namespace

HeatKernelSlice transition_density(const StaticEnvironment& env, Speed speed, Site x, double t, int radius,
                                   HeatOptions opts) {
    if (t < 0.0) throw DomainError("negative time");
    if (!env.window().interior(x) || env.mu(x) <= 0.0) throw DomainError("base point is not on the open cluster");
    int R = radius > 0 ? radius : leak_radius(max_jump_rate(env, speed), t, opts.leak);
    HeatPropagator prop(x, R, env.window().L, speed, opts);
    prop.load(env);
    prop.set_point_mass(x);
    prop.advance(t);
    return snapshot(prop, x);
}

std::vector<LltPoint> llt_curve(const StaticEnvironment& env, Speed speed, const std::vector<double>& t_grid,
                                int radius, HeatOptions opts) {
    Site o{0, 0};
    if (!env.window().interior(o) || env.mu(o) <= 0.0) throw DomainError("origin is not on the open cluster");
    double tmax = t_grid.empty() ? 0.0 : *std::max_element(t_grid.begin(), t_grid.end());
    int R = radius > 0 ? radius : leak_radius(max_jump_rate(env, speed), tmax, opts.leak);
    HeatPropagator prop(o, R, env.window().L, speed, opts);
    prop.load(env);
    prop.set_point_mass(o);
    std::vector<LltPoint> out;
    for (double t : t_grid) {
        if (t < prop.time()) throw ConfigError("time grid must be increasing");
        prop.advance(t - prop.time());
        out.push_back({t, t * prop.density(o)});
    }
    return out;
}

std::vector<double> geometric_grid(double t0, double t1, double ratio) {
    if (!(t0 > 0.0) || !(t1 >= t0) || !(ratio > 1.0)) throw ConfigError("geometric grid needs 0 < t0 <= t1, ratio > 1");
    std::vector<double> g;
    for (double t = t0; t <= t1 * (1.0 + 1e-12); t *= ratio) g.push_back(t);
    return g;
}

GaussianReport gaussian_diagnostic(const StaticEnvironment& env, Speed speed, double t, int radius,
                                   const std::vector<double>& trial_c, HeatOptions opts) {
    if (t < 1.0) throw DomainError("gaussian diagnostic needs t >= 1");
    int R = std::max(radius, leak_radius(max_jump_rate(env, speed), t, opts.leak));
    auto sl = transition_density(env, speed, {0, 0}, t, R, opts);
    GaussianReport rep;
    rep.t = t;
    rep.radius = radius;
    for (double c : trial_c) {
        GaussianFit f;
        f.c = c;
        for (int y = -radius; y <= radius; ++y)
            for (int x = -radius; x <= radius; ++x) {
                Site s{x, y};
                double p = sl.at(s);
                if (!(p > 0.0)) continue;
                double r = euclid(s);
                if (r <= t) {
                    double v = t * p * std::exp(c * r * r / t);
                    if (v > f.C_near) {
                        f.C_near = v;
                        f.worst_near = s;
                    }
                } else {
                    double v = t * p * std::exp(c * r * std::max(1.0, std::log(r / t)));
                    if (v > f.C_far) {
                        f.C_far = v;
                        f.worst_far = s;
                    }
                }
            }
        rep.fits.push_back(f);
    }
    return rep;
}

std::vector<double> killed_time_integral(const StaticEnvironment& env, Speed speed, const Domain& A, Site x,
                                         double mass_cutoff, HeatOptions opts) {
    if (!A.contains(x)) throw DomainError("start site is not in the domain");
    Site c{(A.lo().x + A.hi().x) / 2, (A.lo().y + A.hi().y) / 2};
    int R = std::max({c.x - A.lo().x, A.hi().x - c.x, c.y - A.lo().y, A.hi().y - c.y}) + 1;
    HeatPropagator prop(c, R, env.window().L, speed, opts);
    prop.load(env);
    prop.set_mask(&A);
    prop.set_point_mass(x);
    double dt = 1.0 / prop.lambda();
    for (int guard = 0; prop.mass() > mass_cutoff; ++guard) {
        if (guard > 200000) throw SolverError("killed walk did not leave the domain", SolveReport{});
        prop.advance(dt, true);
        dt = std::min(dt * 1.5, opts.max_sweep / prop.lambda());
    }
    std::vector<double> out(A.size());
    for (std::size_t i = 0; i < A.size(); ++i) out[i] = prop.integral(A[i]);
    return out;
}

}  // namespace rcm
