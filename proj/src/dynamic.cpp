#include "rcm/dynamic.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <limits>
#include <sstream>

#include "rcm/errors.hpp"
#include "rcm/parallel.hpp"
#include "rcm/rng.hpp"
#include "rcm/stats.hpp"

namespace rcm {

namespace {

int wrap(int v, int L) {
    int r = v % L;
    return r < 0 ? r + L : r;
}

}  // namespace

void InterfacePotential::validate() const {
    if (!std::isfinite(kappa) || !std::isfinite(eps)) throw ConfigError("interface potential parameters must be finite");
    if (!(c_minus() > 0.0)) throw ConfigError("interface potential must be strictly convex: need kappa > |eps|");
}

std::size_t InterfaceField::index(int x, int y) const {
    return std::size_t(wrap(y, L)) * std::size_t(L) + std::size_t(wrap(x, L));
}

double InterfaceField::phi(Site s) const {
    return psi[index(s.x, s.y)] + ux * s.x + uy * s.y;
}

double InterfaceField::gradient(Site s, int dir) const {
    if (dir == 0) return psi[index(s.x + 1, s.y)] - psi[index(s.x, s.y)] + ux;
    if (dir == 2) return psi[index(s.x, s.y + 1)] - psi[index(s.x, s.y)] + uy;
    throw DomainError("gradient direction must be east (0) or north (2)");
}

InterfaceField make_interface(int L, const InterfacePotential& V, double ux, double uy, double h, std::uint64_t seed) {
    V.validate();
    if (L < 2) throw ConfigError("torus side must be at least 2");
    if (h == 0.0) h = 0.05 / V.c_plus();
    if (!(h > 0.0) || h > 0.1 / V.c_plus() * (1 + 1e-12))
        throw ConfigError("Euler-Maruyama step must satisfy 0 < h <= 0.1 / c_plus");
    InterfaceField f;
    f.L = L;
    f.psi.assign(std::size_t(L) * std::size_t(L), 0.0);
    f.V = V;
    f.ux = ux;
    f.uy = uy;
    f.h = h;
    f.seed = seed;
    return f;
}

void advance_interface(InterfaceField& f, std::int64_t steps) {
    const int L = f.L;
    const std::size_t N = f.psi.size();
    std::vector<double> fe(N), fn(N);
    const double amp = f.noise * std::sqrt(2.0 * f.h);
    const bool harmonic = f.V.eps == 0.0;
    for (std::int64_t s = 0; s < steps; ++s) {
        // V' on every east and north edge
        for (int y = 0; y < L; ++y) {
            const std::size_t row = std::size_t(y) * std::size_t(L);
            const std::size_t up = std::size_t(y + 1 == L ? 0 : y + 1) * std::size_t(L);
            for (int x = 0; x < L; ++x) {
                const std::size_t i = row + std::size_t(x);
                const std::size_t e = row + std::size_t(x + 1 == L ? 0 : x + 1);
                double ge = f.psi[e] - f.psi[i] + f.ux, gn = f.psi[up + std::size_t(x)] - f.psi[i] + f.uy;
                if (harmonic) {
                    fe[i] = f.V.kappa * ge;
                    fn[i] = f.V.kappa * gn;
                } else {
                    fe[i] = f.V.dV(ge);
                    fn[i] = f.V.dV(gn);
                }
            }
        }
        auto rng = make_stream(f.seed, {7, f.steps});
        boost::random::normal_distribution<double> gauss;
        bool finite = true;
        for (int y = 0; y < L; ++y) {
            const std::size_t row = std::size_t(y) * std::size_t(L);
            const std::size_t down = std::size_t(y == 0 ? L - 1 : y - 1) * std::size_t(L);
            for (int x = 0; x < L; ++x) {
                const std::size_t i = row + std::size_t(x);
                const std::size_t w = row + std::size_t(x == 0 ? L - 1 : x - 1);
                // sum over neighbours y of V'(phi(x) - phi(y))
                double force = -fe[i] + fe[w] - fn[i] + fn[down + std::size_t(x)];
                double v = f.psi[i] - f.h * force;
                if (amp != 0.0) v += amp * gauss(rng);
                finite = finite && std::isfinite(v);
                f.psi[i] = v;
            }
        }
        ++f.steps;
        if (!finite) throw DomainError("non-finite interface heights after step " + std::to_string(f.steps));
    }
}

InterfaceField interface_step(InterfaceField field) {
    advance_interface(field, 1);
    return field;
}

double TorusFrame::at(Site s, int dir) const {
    switch (dir) {
        case 0: return east[std::size_t(wrap(s.y, L)) * std::size_t(L) + std::size_t(wrap(s.x, L))];
        case 1: return east[std::size_t(wrap(s.y, L)) * std::size_t(L) + std::size_t(wrap(s.x - 1, L))];
        case 2: return north[std::size_t(wrap(s.y, L)) * std::size_t(L) + std::size_t(wrap(s.x, L))];
        default: return north[std::size_t(wrap(s.y - 1, L)) * std::size_t(L) + std::size_t(wrap(s.x, L))];
    }
}

TorusFrame hs_frame(const InterfaceField& f) {
    TorusFrame fr;
    fr.L = f.L;
    fr.east.resize(f.psi.size());
    fr.north.resize(f.psi.size());
    for (int y = 0; y < f.L; ++y)
        for (int x = 0; x < f.L; ++x) {
            std::size_t i = std::size_t(y) * std::size_t(f.L) + std::size_t(x);
            fr.east[i] = f.V.d2V(f.gradient({x, y}, 0));
            fr.north[i] = f.V.d2V(f.gradient({x, y}, 2));
        }
    return fr;
}

StaticEnvironment hs_conductances(const InterfaceField& field, int window_L) {
    if (window_L <= 0) window_L = std::max(1, field.L / 2);
    TorusFrame fr = hs_frame(field);
    StaticEnvironment env(Window{window_L});
    for (int y = -window_L; y <= window_L; ++y)
        for (int x = -window_L; x <= window_L; ++x) {
            if (x < window_L) env.set_omega({x, y}, 0, fr.at({x, y}, 0));
            if (y < window_L) env.set_omega({x, y}, 2, fr.at({x, y}, 2));
        }
    return env;
}

DynamicEnvironment DynamicEnvironment::from_frames(double delta, std::vector<StaticEnvironment> frames) {
    if (!(delta > 0.0)) throw ConfigError("frame duration must be positive");
    if (frames.empty()) throw ConfigError("at least one frame is required");
    DynamicEnvironment d;
    d.kind_ = Kind::frames;
    d.delta_ = delta;
    d.c_lo_ = std::numeric_limits<double>::infinity();
    d.c_hi_ = 0.0;
    const Window w = frames.front().window();
    for (const auto& f : frames) {
        if (f.window().L != w.L) throw ConfigError("all frames must share one window");
        for (int y = -w.L; y <= w.L; ++y)
            for (int x = -w.L; x <= w.L; ++x) {
                if (x < w.L) {
                    double v = f.omega({x, y}, 0);
                    d.c_lo_ = std::min(d.c_lo_, v);
                    d.c_hi_ = std::max(d.c_hi_, v);
                }
                if (y < w.L) {
                    double v = f.omega({x, y}, 2);
                    d.c_lo_ = std::min(d.c_lo_, v);
                    d.c_hi_ = std::max(d.c_hi_, v);
                }
            }
    }
    d.frames_ = std::move(frames);
    return d;
}

DynamicEnvironment DynamicEnvironment::from_law(const ConductanceLaw& law, double delta, std::uint64_t seed) {
    law.validate();
    if (!(delta > 0.0)) throw ConfigError("frame duration must be positive");
    DynamicEnvironment d;
    d.kind_ = Kind::law;
    d.delta_ = delta;
    d.law_ = law;
    d.seed_ = seed;
    d.c_lo_ = law.p_open < 1.0 ? 0.0 : law.min_positive();
    d.c_hi_ = law.max_positive();
    return d;
}

DynamicEnvironment DynamicEnvironment::from_interface(InterfaceField field, double delta, double horizon) {
    if (!(delta > 0.0) || !(horizon >= 0.0)) throw ConfigError("frame duration and horizon must be positive");
    double ratio = delta / field.h;
    auto steps = std::int64_t(std::llround(ratio));
    if (steps < 1 || std::abs(ratio - double(steps)) > 1e-9 * ratio)
        throw ConfigError("frame duration must be a multiple of the Langevin step");
    DynamicEnvironment d;
    d.kind_ = Kind::interface;
    d.delta_ = delta;
    d.c_lo_ = field.V.c_minus();
    d.c_hi_ = field.V.c_plus();
    auto frames = std::size_t(std::floor(horizon / delta)) + 1;
    for (std::size_t k = 0; k < frames; ++k) {
        if (k > 0) advance_interface(field, steps);
        TorusFrame fr = hs_frame(field);
        for (std::size_t i = 0; i < fr.east.size(); ++i)
            for (double v : {fr.east[i], fr.north[i]})
                if (v < d.c_lo_ * (1 - 1e-12) || v > d.c_hi_ * (1 + 1e-12))
                    throw EllipticityError("Helffer-Sjostrand conductance " + std::to_string(v) +
                                           " outside the ellipticity bounds");
        d.torus_.push_back(std::move(fr));
    }
    return d;
}

bool DynamicEnvironment::inside(Site s) const {
    return kind_ != Kind::frames || frames_.front().window().interior(s);
}

double DynamicEnvironment::omega(int frame, Site s, int dir) const {
    switch (kind_) {
        case Kind::frames: {
            auto n = int(frames_.size());
            return frames_[std::size_t(wrap(frame, n))].omega(s, dir);
        }
        case Kind::law: {
            Site base = s;
            int d = dir;
            if (dir == 1) base = s + kSteps[1], d = 0;
            if (dir == 3) base = s + kSteps[3], d = 2;
            return sample_edge(law_, seed_, base, d, frame);
        }
        default:
            if (frame < 0 || std::size_t(frame) >= torus_.size())
                throw DomainError("time beyond the prepared interface frames");
            return torus_[std::size_t(frame)].at(s, dir);
    }
}

std::string DynamicEnvironment::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::frames: os << "frames(" << frames_.size() << ", delta=" << delta_ << ")"; break;
        case Kind::law: os << "law(" << law_.describe() << ", delta=" << delta_ << ")"; break;
        default: os << "interface(" << torus_.size() << " frames, delta=" << delta_ << ")"; break;
    }
    return os.str();
}

Trajectory simulate_inhomogeneous(const DynamicEnvironment& denv, Site x0, double T, std::uint64_t seed,
                                  bool record) {
    if (!denv.elliptic())
        throw EllipticityError("thinning needs uniformly elliptic dynamics (0 < c_lo <= c_hi < inf)");
    if (!denv.inside(x0)) throw DomainError("start site outside the dynamic environment");
    const double c_lo = denv.c_lo(), c_hi = denv.c_hi();
    Trajectory tr;
    tr.start = x0;
    tr.horizon = T;
    tr.seed = seed;
    Xoshiro256 rng(seed);
    Site pos = x0;
    double t = 0.0;
    for (;;) {
        t += rng.exponential(4.0 * c_hi);
        if (t > T) break;
        int d = rng.below(4);
        double w = denv.omega(denv.frame_at(t), pos, d);
        if (w < c_lo * (1 - 1e-12) || w > c_hi * (1 + 1e-12))
            throw EllipticityError("conductance " + std::to_string(w) + " at time " + std::to_string(t) +
                                   " outside [" + std::to_string(c_lo) + ", " + std::to_string(c_hi) + "]");
        if (rng.uniform() * c_hi >= w) continue;
        pos = pos + kSteps[d];
        ++tr.jumps;
        if (record) {
            tr.times.push_back(t);
            tr.sites.push_back(pos);
        }
        if (!denv.inside(pos)) {
            tr.boundary_hit = true;
            break;
        }
    }
    tr.end = pos;
    return tr;
}

double DynamicSnapshot::at(Site s) const {
    if (s.x < lo.x || s.x > hi.x || s.y < lo.y || s.y > hi.y) return 0.0;
    return p[std::size_t(s.y - lo.y) * std::size_t(hi.x - lo.x + 1) + std::size_t(s.x - lo.x)];
}

double DynamicSnapshot::integral_at(Site s) const {
    if (integral.empty() || s.x < lo.x || s.x > hi.x || s.y < lo.y || s.y > hi.y) return 0.0;
    return integral[std::size_t(s.y - lo.y) * std::size_t(hi.x - lo.x + 1) + std::size_t(s.x - lo.x)];
}

std::vector<DynamicSnapshot> dynamic_density_path(const DynamicEnvironment& denv, Site x,
                                                  const std::vector<double>& times, const DynamicHeatOptions& opts) {
    if (times.empty()) return {};
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!(times[i] > 0.0) || (i > 0 && times[i] <= times[i - 1]))
            throw ConfigError("snapshot times must be positive and increasing");
    if (!denv.elliptic()) throw EllipticityError("uniformization needs bounded conductances");
    const double lam = 4.0 * denv.c_hi();
    const double t_end = times.back();
    int R = opts.radius > 0 ? opts.radius : leak_radius(lam, t_end, opts.heat.leak);
    int window_L = std::abs(x.x) + std::abs(x.y) + R + 2;
    if (denv.kind() == DynamicEnvironment::Kind::frames) {
        window_L = 0;
        for (int L = 1;; ++L)
            if (!denv.inside({L, 0})) {
                window_L = L;
                break;
            }
    }
    HeatPropagator prop(x, R, window_L, Speed::vsrw, opts.heat);
    prop.set_lambda_floor(lam);
    int frame = denv.frame_at(0.0);
    auto omega_of = [&denv](int k) {
        return [&denv, k](Site s, int d) { return denv.omega(k, s, d); };
    };
    prop.load(omega_of(frame));
    prop.set_point_mass(x);
    const double m = lam * denv.delta();
    const int margin = int(std::ceil(m + 12.0 * std::sqrt(m) + 42.0));
    std::vector<DynamicSnapshot> out;
    std::size_t next = 0;
    while (next < times.size()) {
        double frame_end = (frame + 1) * denv.delta();
        double target = std::min(frame_end, times[next]);
        if (target > prop.time()) prop.advance(target - prop.time(), opts.integrate);
        if (std::abs(prop.time() - times[next]) <= 1e-12 * std::max(1.0, times[next])) {
            DynamicSnapshot s;
            s.t = times[next];
            int r = R;
            if (opts.crop > 0.0) r = std::min(R, int(std::ceil(opts.crop * std::sqrt(denv.c_hi() * s.t))) + 4);
            s.lo = {std::max(prop.lo().x, x.x - r), std::max(prop.lo().y, x.y - r)};
            s.hi = {std::min(prop.hi().x, x.x + r), std::min(prop.hi().y, x.y + r)};
            for (int yy = s.lo.y; yy <= s.hi.y; ++yy)
                for (int xx = s.lo.x; xx <= s.hi.x; ++xx) {
                    s.p.push_back(prop.density({xx, yy}));
                    if (opts.integrate) s.integral.push_back(prop.integral({xx, yy}));
                }
            s.truncation = prop.truncation_error();
            out.push_back(std::move(s));
            ++next;
        }
        if (prop.time() >= frame_end * (1 - 1e-15) && next < times.size()) {
            ++frame;
            prop.reload_active(omega_of(frame), margin);
        }
    }
    return out;
}

double AnnealedField::at(Site s) const {
    if (!contains(s)) return 0.0;
    return mean[std::size_t(s.y - lo.y) * std::size_t(hi.x - lo.x + 1) + std::size_t(s.x - lo.x)];
}

double AnnealedField::error_at(Site s) const {
    if (!contains(s)) return 0.0;
    return std_error[std::size_t(s.y - lo.y) * std::size_t(hi.x - lo.x + 1) + std::size_t(s.x - lo.x)];
}

double AnnealedField::total_mass() const {
    double s = 0.0;
    for (double v : mean) s += v;
    return s;
}

AnnealedField::Gradient AnnealedField::max_gradient() const {
    Gradient g;
    const std::size_t W = std::size_t(hi.x - lo.x + 1);
    for (int y = lo.y; y <= hi.y; ++y)
        for (int x = lo.x; x <= hi.x; ++x)
            for (int d : {0, 2}) {
                Site s{x, y}, t = s + kSteps[d];
                if (!contains(t)) continue;
                double v = std::abs(at(t) - at(s));
                if (v > g.value) {
                    g.value = v;
                    g.x = s;
                    g.y = t;
                    std::size_t i = std::size_t(y - lo.y) * W + std::size_t(x - lo.x);
                    g.std_error = d == 0 ? grad_error_east[i] : grad_error_north[i];
                }
            }
    return g;
}

namespace {

struct Accumulator {
    AnnealedField field;
    std::vector<double> sum, sumsq, ge, ge2, gn, gn2;
    int count = 0;

    void add(const DynamicSnapshot& s) {
        if (count == 0) {
            field.t = s.t;
            field.lo = s.lo;
            field.hi = s.hi;
            std::size_t n = s.p.size();
            sum.assign(n, 0.0);
            sumsq.assign(n, 0.0);
            ge.assign(n, 0.0);
            ge2.assign(n, 0.0);
            gn.assign(n, 0.0);
            gn2.assign(n, 0.0);
        }
        ++count;
        const Site lo = field.lo, hi = field.hi;
        const std::size_t W = std::size_t(hi.x - lo.x + 1);
        for (int y = lo.y; y <= hi.y; ++y)
            for (int x = lo.x; x <= hi.x; ++x) {
                std::size_t i = std::size_t(y - lo.y) * W + std::size_t(x - lo.x);
                double v = s.at({x, y});
                sum[i] += v;
                sumsq[i] += v * v;
                double e = s.at({x + 1, y}) - v, n = s.at({x, y + 1}) - v;
                ge[i] += e;
                ge2[i] += e * e;
                gn[i] += n;
                gn2[i] += n * n;
            }
    }

    AnnealedField finish() {
        AnnealedField f = field;
        f.samples = count;
        const std::size_t n = sum.size();
        f.mean.resize(n);
        f.std_error.resize(n);
        f.grad_error_east.resize(n);
        f.grad_error_north.resize(n);
        auto se = [this](double s, double s2) {
            if (count < 2) return 0.0;
            double m = s / count;
            return std::sqrt(std::max(0.0, s2 / count - m * m) / double(count - 1));
        };
        for (std::size_t i = 0; i < n; ++i) {
            f.mean[i] = sum[i] / count;
            f.std_error[i] = se(sum[i], sumsq[i]);
            f.grad_error_east[i] = se(ge[i], ge2[i]);
            f.grad_error_north[i] = se(gn[i], gn2[i]);
        }
        return f;
    }
};

// Runs the quenched path for every environment, `threads` at a time, and feeds
// the snapshots to `consume` in environment order.
template <class Consume>
void for_each_environment(const DynamicFactory& factory, const std::vector<double>& times, int num_env,
                          const DynamicHeatOptions& opts, int threads, Consume&& consume) {
    if (num_env < 1) throw ConfigError("at least one environment is required");
    int chunk = std::max(1, threads);
    for (int start = 0; start < num_env; start += chunk) {
        int n = std::min(chunk, num_env - start);
        std::vector<std::vector<DynamicSnapshot>> paths(static_cast<std::size_t>(n));
        parallel_for(std::size_t(n), threads, [&](std::size_t i) {
            DynamicEnvironment denv = factory(start + int(i));
            paths[i] = dynamic_density_path(denv, {0, 0}, times, opts);
        });
        for (int i = 0; i < n; ++i) consume(start + i, paths[std::size_t(i)]);
    }
}

}  // namespace

std::vector<AnnealedField> annealed_density_path(const DynamicFactory& factory, const std::vector<double>& times,
                                                 int num_env, const DynamicHeatOptions& opts, int threads) {
    std::vector<Accumulator> acc(times.size());
    for_each_environment(factory, times, num_env, opts, threads, [&](int, const std::vector<DynamicSnapshot>& path) {
        for (std::size_t k = 0; k < path.size(); ++k) acc[k].add(path[k]);
    });
    std::vector<AnnealedField> out;
    for (auto& a : acc) out.push_back(a.finish());
    return out;
}

AnnealedKernelEstimate annealed_density(const DynamicFactory& factory, double t, Site y, int num_env,
                                        const DynamicHeatOptions& opts, int threads) {
    std::vector<double> vals;
    for_each_environment(factory, {t}, num_env, opts, threads,
                         [&](int, const std::vector<DynamicSnapshot>& path) { vals.push_back(path[0].at(y)); });
    auto me = mean_error(vals);
    return {me.mean, me.std_error, num_env};
}

std::vector<AnnealedPotentialEstimate> annealed_potential(const DynamicFactory& factory, const std::vector<Site>& xs,
                                                          double T_cut, int num_env, const DynamicHeatOptions& opts,
                                                          int threads) {
    if (!(T_cut > 0.0)) throw ConfigError("time cutoff must be positive");
    DynamicHeatOptions o = opts;
    o.integrate = true;
    std::vector<std::vector<double>> vals(xs.size());
    Accumulator acc;
    for_each_environment(factory, {T_cut}, num_env, o, threads, [&](int, const std::vector<DynamicSnapshot>& path) {
        for (std::size_t i = 0; i < xs.size(); ++i)
            vals[i].push_back(path[0].integral_at({0, 0}) - path[0].integral_at(xs[i]));
        acc.add(path[0]);
    });
    double grad = acc.finish().max_gradient().value;
    std::vector<AnnealedPotentialEstimate> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        AnnealedPotentialEstimate est;
        est.cutoff = T_cut;
        est.samples = num_env;
        if (xs[i] != Site{0, 0}) {
            auto me = mean_error(vals[i]);
            est.value = me.mean;
            est.std_error = me.std_error;
            est.tail_indicator = 2.0 * (std::abs(xs[i].x) + std::abs(xs[i].y)) * grad * T_cut;
        }
        out.push_back(est);
    }
    return out;
}

AnnealedPotentialEstimate annealed_potential(const DynamicFactory& factory, Site x, double T_cut, int num_env,
                                             const DynamicHeatOptions& opts, int threads) {
    if (x == Site{0, 0}) {
        if (!(T_cut > 0.0)) throw ConfigError("time cutoff must be positive");
        AnnealedPotentialEstimate est;
        est.cutoff = T_cut;
        est.samples = num_env;
        return est;
    }
    return annealed_potential(factory, std::vector<Site>{x}, T_cut, num_env, opts, threads).front();
}

DynamicMomentReport check_dynamic_moments(const ConductanceLaw& law, double p, double q) {
    law.validate();
    if (!(p > 1.0) || !(q > 1.0)) throw ConfigError("moment exponents must exceed 1");
    DynamicMomentReport r;
    r.p = p;
    r.q = q;
    r.exponent_sum = 1.0 / (p - 1.0) + 1.0 / ((p - 1.0) * q) + 1.0 / q;
    r.exponents_ok = r.exponent_sum < 1.0;
    r.moment_p = law.p_open * law.conditional_moment(p);
    r.moment_minus_q = law.p_open < 1.0 ? std::numeric_limits<double>::infinity()
                                        : law.conditional_moment(-q);
    r.finite = std::isfinite(r.moment_p) && std::isfinite(r.moment_minus_q);
    r.satisfied = r.exponents_ok && r.finite;
    r.elliptic = law.p_open >= 1.0 && law.min_positive() > 0.0 && std::isfinite(law.max_positive());
    return r;
}

VarianceTable variance_scaling(InterfaceField field, const VarianceOptions& opts) {
    if (opts.n_grid.empty() || opts.samples < 2 || opts.thin < 1) throw ConfigError("variance scaling needs a grid and samples");
    const int L = field.L;
    for (int n : opts.n_grid)
        if (n < 1 || 2 * n > L) throw ConfigError("every n must satisfy 1 <= n <= L/2");
    int sx = 1, sy = 0;
    if (opts.dir == 2) sx = 0, sy = 1;
    if (opts.dir == 1) sx = 1, sy = 1;
    advance_interface(field, std::int64_t(std::ceil(opts.burn_in / field.h)));
    const std::size_t G = opts.n_grid.size();
    std::vector<std::vector<double>> fwd(G), back(G);
    double ge = 0.0, gn = 0.0;
    const std::size_t N = field.psi.size();
    for (int k = 0; k < opts.samples; ++k) {
        advance_interface(field, opts.thin);
        for (std::size_t g = 0; g < G; ++g) {
            int n = opts.n_grid[g];
            double f = 0.0, b = 0.0;
            for (int y = 0; y < L; ++y) {
                const double* row = &field.psi[std::size_t(y) * std::size_t(L)];
                const double* fw = &field.psi[std::size_t(wrap(y + n * sy, L)) * std::size_t(L)];
                const double* bw = &field.psi[std::size_t(wrap(y - n * sy, L)) * std::size_t(L)];
                for (int x = 0; x < L; ++x) {
                    int xf = x + n * sx, xb = x - n * sx;
                    if (xf >= L) xf -= L;
                    if (xb < 0) xb += L;
                    double d1 = fw[xf] - row[x], d2 = bw[xb] - row[x];
                    f += d1 * d1;
                    b += d2 * d2;
                }
            }
            fwd[g].push_back(f / double(N));
            back[g].push_back(b / double(N));
        }
        for (int y = 0; y < L; ++y) {
            const double* row = &field.psi[std::size_t(y) * std::size_t(L)];
            const double* up = &field.psi[std::size_t(y + 1 == L ? 0 : y + 1) * std::size_t(L)];
            for (int x = 0; x < L; ++x) {
                ge += row[x + 1 == L ? 0 : x + 1] - row[x];
                gn += up[x] - row[x];
            }
        }
    }
    VarianceTable tab;
    tab.h = field.h;
    tab.L = L;
    double denom = double(opts.samples) * double(N);
    tab.mean_gradient = {ge / denom + field.ux, gn / denom + field.uy};
    std::vector<double> lx, vy, w;
    for (std::size_t g = 0; g < G; ++g) {
        auto bm = batch_means(fwd[g], std::size_t(opts.batches));
        auto br = batch_means(back[g], std::size_t(opts.batches));
        VarianceRow row;
        row.n = opts.n_grid[g];
        row.var = bm.mean;
        row.std_error = bm.std_error;
        row.var_reflected = br.mean;
        row.drift = bm.drift;
        tab.drift = tab.drift || bm.drift;
        tab.rows.push_back(row);
        lx.push_back(std::log(double(row.n)));
        vy.push_back(row.var);
        w.push_back(row.std_error > 0.0 ? 1.0 / (row.std_error * row.std_error) : 1.0);
    }
    if (G >= 2) {
        auto fit = linear_fit(lx, vy);
        tab.slope = fit.slope;
        tab.slope_error = fit.slope_error;
    }
    return tab;
}

}  // namespace rcm
