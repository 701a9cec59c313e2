#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcm/lattice.hpp"

namespace rcm {

enum class LawKind { constant, uniform, pareto, inverse_pareto };

// Edges are open with probability p_open; open edges draw from the positive law.
//   constant:        omega = c
//   uniform:         omega ~ U(lo, hi)
//   pareto:          omega = scale * U^(-1/shape)   (heavy upper tail)
//   inverse_pareto:  omega = scale * U^(1/shape)    (heavy tail near 0)
struct ConductanceLaw {
    double p_open = 1.0;
    LawKind kind = LawKind::constant;
    double c = 1.0;
    double lo = 0.0;
    double hi = 0.0;
    double shape = 0.0;
    double scale = 1.0;

    static ConductanceLaw constant_law(double c, double p_open = 1.0);
    static ConductanceLaw uniform_law(double lo, double hi, double p_open = 1.0);
    static ConductanceLaw pareto_law(double alpha, double scale, double p_open = 1.0);
    static ConductanceLaw inverse_pareto_law(double beta, double scale, double p_open = 1.0);

    void validate() const;
    // value of an edge given two independent uniforms
    double draw(double u_open, double u_value) const;
    // E[omega^s | open]; +inf when the moment diverges, s may be negative
    double conditional_moment(double s) const;
    double mean() const { return p_open * conditional_moment(1.0); }
    // almost-sure bounds of the positive law (hi may be +inf)
    double min_positive() const;
    double max_positive() const;
    std::string describe() const;
};

LawKind parse_law_kind(const std::string& s);
std::string law_kind_name(LawKind k);

enum class Speed { vsrw, csrw };
Speed parse_speed(const std::string& s);
std::string speed_name(Speed s);

struct MomentReport {
    double p = 0.0;
    double q = 0.0;
    double moment_p = 0.0;       // E[omega^p]
    double moment_minus_q = 0.0; // E[omega^-q 1_open]
    bool finite = false;
    bool exponents_ok = false;
    bool satisfied = false;
    // theta-clock non-explosion: holds by construction when theta is bounded
    // below on the cluster, otherwise only noted
    bool clock_bounded_below = false;
};

MomentReport check_moment_condition(const ConductanceLaw& law, double p, double q);

class StaticEnvironment {
public:
    StaticEnvironment() = default;
    // all edges closed
    explicit StaticEnvironment(Window w);

    static StaticEnvironment sample(const ConductanceLaw& law, Window w, std::uint64_t seed);
    static StaticEnvironment constant(Window w, double c);

    const Window& window() const { return window_; }
    const ConductanceLaw& law() const { return law_; }
    std::uint64_t seed() const { return seed_; }
    bool sampled() const { return sampled_; }

    // conductance of the edge {s, s + step(dir)}; 0 if that edge leaves the window
    double omega(Site s, int dir) const;
    double omega(const Edge& e) const;
    void set_omega(Site s, int dir, double value);

    // raw storage: east[i] = omega({s, s+e1}), north[i] = omega({s, s+e2}), i = window index
    const std::vector<double>& east() const { return east_; }
    const std::vector<double>& north() const { return north_; }
    std::vector<double>& east() { return east_; }
    std::vector<double>& north() { return north_; }

    // sum of the four incident conductances; boundary sites are rejected
    double mu(Site s) const;
    double theta(Speed sp, Site s) const { return sp == Speed::vsrw ? 1.0 : mu(s); }

    std::size_t num_edges() const;
    std::size_t num_open_edges() const;

    // Copy of the shifted environment restricted to half-width L_new:
    // omega'({x,y}) = omega({x+z, y+z}).
    StaticEnvironment shifted(Site z, int L_new) const;

private:
    Window window_;
    ConductanceLaw law_;
    std::uint64_t seed_ = 0;
    bool sampled_ = false;
    std::vector<double> east_;
    std::vector<double> north_;
};

// Conductance of a single edge from the counter-based stream; independent of the window.
double sample_edge(const ConductanceLaw& law, std::uint64_t seed, Site s, int dir_east_or_north,
                   std::int64_t frame = 0);

// Lazy view of tau_z omega.
class ShiftView {
public:
    ShiftView(const StaticEnvironment& env, Site z) : env_(&env), z_(z) {}
    double omega(Site s, int dir) const;
    double mu(Site s) const;
    Site offset() const { return z_; }

private:
    const StaticEnvironment* env_;
    Site z_;
};

}  // namespace rcm
