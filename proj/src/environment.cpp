#include "rcm/environment.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rcm/errors.hpp"
#include "rcm/rng.hpp"

namespace rcm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ConductanceLaw ConductanceLaw::constant_law(double c, double p_open) {
    ConductanceLaw l;
    l.p_open = p_open;
    l.kind = LawKind::constant;
    l.c = c;
    l.validate();
    return l;
}

ConductanceLaw ConductanceLaw::uniform_law(double lo, double hi, double p_open) {
    ConductanceLaw l;
    l.p_open = p_open;
    l.kind = LawKind::uniform;
    l.lo = lo;
    l.hi = hi;
    l.validate();
    return l;
}

ConductanceLaw ConductanceLaw::pareto_law(double alpha, double scale, double p_open) {
    ConductanceLaw l;
    l.p_open = p_open;
    l.kind = LawKind::pareto;
    l.shape = alpha;
    l.scale = scale;
    l.validate();
    return l;
}

ConductanceLaw ConductanceLaw::inverse_pareto_law(double beta, double scale, double p_open) {
    ConductanceLaw l;
    l.p_open = p_open;
    l.kind = LawKind::inverse_pareto;
    l.shape = beta;
    l.scale = scale;
    l.validate();
    return l;
}

void ConductanceLaw::validate() const {
    if (!(p_open > 0.0 && p_open <= 1.0)) throw ConfigError("p_open must lie in (0,1]");
    switch (kind) {
        case LawKind::constant:
            if (!(c > 0.0)) throw ConfigError("constant law needs c > 0");
            break;
        case LawKind::uniform:
            if (!(lo > 0.0 && hi > lo)) throw ConfigError("uniform law needs 0 < lo < hi");
            break;
        case LawKind::pareto:
        case LawKind::inverse_pareto:
            if (!(shape > 0.0 && scale > 0.0)) throw ConfigError("pareto laws need shape > 0 and scale > 0");
            break;
    }
}

double ConductanceLaw::draw(double u_open, double u_value) const {
    if (u_open >= p_open) return 0.0;
    switch (kind) {
        case LawKind::constant: return c;
        case LawKind::uniform: return lo + (hi - lo) * u_value;
        case LawKind::pareto: return scale * std::pow(u_value, -1.0 / shape);
        case LawKind::inverse_pareto: return scale * std::pow(u_value, 1.0 / shape);
    }
    return 0.0;
}

double ConductanceLaw::conditional_moment(double s) const {
    switch (kind) {
        case LawKind::constant: return std::pow(c, s);
        case LawKind::uniform:
            if (std::abs(s + 1.0) < 1e-12) return std::log(hi / lo) / (hi - lo);
            return (std::pow(hi, s + 1.0) - std::pow(lo, s + 1.0)) / ((s + 1.0) * (hi - lo));
        case LawKind::pareto:
            if (s >= shape) return kInf;
            return shape * std::pow(scale, s) / (shape - s);
        case LawKind::inverse_pareto:
            if (s <= -shape) return kInf;
            return shape * std::pow(scale, s) / (shape + s);
    }
    return kInf;
}

double ConductanceLaw::min_positive() const {
    switch (kind) {
        case LawKind::constant: return c;
        case LawKind::uniform: return lo;
        case LawKind::pareto: return scale;
        case LawKind::inverse_pareto: return 0.0;
    }
    return 0.0;
}

double ConductanceLaw::max_positive() const {
    switch (kind) {
        case LawKind::constant: return c;
        case LawKind::uniform: return hi;
        case LawKind::pareto: return kInf;
        case LawKind::inverse_pareto: return scale;
    }
    return kInf;
}

std::string ConductanceLaw::describe() const {
    std::ostringstream os;
    os << law_kind_name(kind) << "(";
    switch (kind) {
        case LawKind::constant: os << c; break;
        case LawKind::uniform: os << lo << "," << hi; break;
        case LawKind::pareto:
        case LawKind::inverse_pareto: os << shape << "," << scale; break;
    }
    os << ") p_open=" << p_open;
    return os.str();
}

LawKind parse_law_kind(const std::string& s) {
    if (s == "constant") return LawKind::constant;
    if (s == "uniform") return LawKind::uniform;
    if (s == "pareto") return LawKind::pareto;
    if (s == "inverse_pareto") return LawKind::inverse_pareto;
    throw ConfigError("unknown law '" + s + "'");
}

std::string law_kind_name(LawKind k) {
    switch (k) {
        case LawKind::constant: return "constant";
        case LawKind::uniform: return "uniform";
        case LawKind::pareto: return "pareto";
        case LawKind::inverse_pareto: return "inverse_pareto";
    }
    return "?";
}

Speed parse_speed(const std::string& s) {
    if (s == "vsrw" || s == "VSRW") return Speed::vsrw;
    if (s == "csrw" || s == "CSRW") return Speed::csrw;
    throw ConfigError("unknown speed measure '" + s + "'");
}

std::string speed_name(Speed s) { return s == Speed::vsrw ? "vsrw" : "csrw"; }

MomentReport check_moment_condition(const ConductanceLaw& law, double p, double q) {
    if (!(p > 1.0) || !(q > 1.0)) throw ConfigError("moment exponents must satisfy p > 1 and q > 1");
    law.validate();
    MomentReport r;
    r.p = p;
    r.q = q;
    r.moment_p = law.p_open * law.conditional_moment(p);
    r.moment_minus_q = law.p_open * law.conditional_moment(-q);
    r.finite = std::isfinite(r.moment_p) && std::isfinite(r.moment_minus_q);
    r.exponents_ok = 1.0 / p + 1.0 / q < 1.0;
    r.satisfied = r.finite && r.exponents_ok;
    r.clock_bounded_below = law.min_positive() > 0.0;
    return r;
}

double sample_edge(const ConductanceLaw& law, std::uint64_t seed, Site s, int dir, std::int64_t frame) {
    std::uint64_t h = hash_keys(seed, {frame, s.x, s.y, dir});
    return law.draw(u01(h), u01(splitmix64(h)));
}

StaticEnvironment::StaticEnvironment(Window w)
    : window_(w), east_(w.num_sites(), 0.0), north_(w.num_sites(), 0.0) {}

StaticEnvironment StaticEnvironment::sample(const ConductanceLaw& law, Window w, std::uint64_t seed) {
    law.validate();
    StaticEnvironment env(w);
    env.law_ = law;
    env.seed_ = seed;
    env.sampled_ = true;
    for (int y = -w.L; y <= w.L; ++y) {
        for (int x = -w.L; x <= w.L; ++x) {
            std::size_t i = w.index({x, y});
            if (x < w.L) env.east_[i] = sample_edge(law, seed, {x, y}, 0);
            if (y < w.L) env.north_[i] = sample_edge(law, seed, {x, y}, 2);
        }
    }
    return env;
}

StaticEnvironment StaticEnvironment::constant(Window w, double c) {
    return sample(ConductanceLaw::constant_law(c), w, 0);
}

double StaticEnvironment::omega(Site s, int dir) const {
    if (!window_.contains(s)) throw DomainError("site outside the environment window");
    Site t = s + kSteps[dir];
    if (!window_.contains(t)) return 0.0;
    switch (dir) {
        case 0: return east_[window_.index(s)];
        case 1: return east_[window_.index(t)];
        case 2: return north_[window_.index(s)];
        default: return north_[window_.index(t)];
    }
}

double StaticEnvironment::omega(const Edge& e) const {
    Site d = e.b - e.a;
    return omega(e.a, d.x == 1 ? 0 : 2);
}

void StaticEnvironment::set_omega(Site s, int dir, double value) {
    if (!(value >= 0.0)) throw DomainError("conductances must be nonnegative");
    Site t = s + kSteps[dir];
    if (!window_.contains(s) || !window_.contains(t)) throw DomainError("edge outside the environment window");
    switch (dir) {
        case 0: east_[window_.index(s)] = value; break;
        case 1: east_[window_.index(t)] = value; break;
        case 2: north_[window_.index(s)] = value; break;
        default: north_[window_.index(t)] = value; break;
    }
    sampled_ = false;
}

double StaticEnvironment::mu(Site s) const {
    if (!window_.interior(s)) throw DomainError("mu needs the full stencil; site is on the window boundary");
    std::size_t i = window_.index(s);
    std::size_t side = std::size_t(window_.side());
    return east_[i] + east_[i - 1] + north_[i] + north_[i - side];
}

std::size_t StaticEnvironment::num_edges() const {
    return 2 * std::size_t(window_.side()) * std::size_t(2 * window_.L);
}

std::size_t StaticEnvironment::num_open_edges() const {
    std::size_t n = 0;
    for (double v : east_) n += v > 0.0;
    for (double v : north_) n += v > 0.0;
    return n;
}

StaticEnvironment StaticEnvironment::shifted(Site z, int L_new) const {
    Window w{L_new};
    if (!window_.contains(z + Site{L_new, L_new}) || !window_.contains(z - Site{L_new, L_new}))
        throw DomainError("shifted window leaves the environment window");
    StaticEnvironment out(w);
    out.law_ = law_;
    out.seed_ = seed_;
    for (int y = -L_new; y <= L_new; ++y) {
        for (int x = -L_new; x <= L_new; ++x) {
            std::size_t i = w.index({x, y});
            std::size_t j = window_.index(Site{x, y} + z);
            if (x < L_new) out.east_[i] = east_[j];
            if (y < L_new) out.north_[i] = north_[j];
        }
    }
    return out;
}

double ShiftView::omega(Site s, int dir) const {
    Site a = s + z_;
    Site b = a + kSteps[dir];
    if (!env_->window().contains(a) || !env_->window().contains(b))
        throw DomainError("shifted query outside the environment window");
    return env_->omega(a, dir);
}

double ShiftView::mu(Site s) const { return env_->mu(s + z_); }

}  // namespace rcm
