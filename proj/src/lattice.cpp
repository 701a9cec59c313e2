#include "rcm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rcm/errors.hpp"

namespace rcm {

Edge Edge::make(Site p, Site q) {
    if (l1_distance(p, q) != 1) throw DomainError("edge endpoints are not nearest neighbours");
    if (q < p) std::swap(p, q);
    return {p, q};
}

std::array<Site, 4> neighbors(Site s) {
    return {{s + kSteps[0], s + kSteps[1], s + kSteps[2], s + kSteps[3]}};
}

int l1_distance(Site a, Site b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

double euclid(Point p) { return std::hypot(p.x, p.y); }
double euclid(Site s) { return std::hypot(double(s.x), double(s.y)); }

std::vector<Site> ball(Site c, int r) {
    std::vector<Site> out;
    if (r <= 0) return out;
    for (int dy = -(r - 1); dy <= r - 1; ++dy) {
        int w = r - 1 - std::abs(dy);
        for (int dx = -w; dx <= w; ++dx) out.push_back({c.x + dx, c.y + dy});
    }
    return out;
}

std::vector<Site> sphere(Site c, int r) {
    std::vector<Site> out;
    if (r <= 0) {
        out.push_back(c);
        return out;
    }
    for (int dy = -r; dy <= r; ++dy) {
        int w = r - std::abs(dy);
        out.push_back({c.x - w, c.y + dy});
        if (w != 0) out.push_back({c.x + w, c.y + dy});
    }
    return out;
}

std::vector<Site> disc(Site c, double r) {
    std::vector<Site> out;
    int R = int(std::ceil(r));
    double r2 = r * r;
    for (int dy = -R; dy <= R; ++dy)
        for (int dx = -R; dx <= R; ++dx)
            if (double(dx) * dx + double(dy) * dy < r2) out.push_back({c.x + dx, c.y + dy});
    return out;
}

std::vector<Site> make_ball(BallShape shape, Site center, double r) {
    if (shape == BallShape::disc) return disc(center, r);
    return ball(center, int(std::ceil(r)));
}

BallShape parse_ball_shape(const std::string& s) {
    if (s == "diamond") return BallShape::diamond;
    if (s == "disc") return BallShape::disc;
    throw ConfigError("unknown ball shape '" + s + "' (expected diamond or disc)");
}

std::vector<Point> annulus_targets(const Annulus& K, const Mesh& mesh) {
    if (!(K.k1 > 0.0) || !(K.k2 > K.k1) || !std::isfinite(K.k2))
        throw ConfigError("annulus needs 0 < k1 < k2 < inf");
    if (mesh.radii < 1 || mesh.angles < 1)
        throw ConfigError("annulus mesh needs at least one radius and one angle");
    std::vector<Point> pts;
    pts.reserve(std::size_t(mesh.radii) * mesh.angles);
    for (int i = 0; i < mesh.radii; ++i) {
        double r = mesh.radii == 1 ? K.k1 : K.k1 + (K.k2 - K.k1) * i / (mesh.radii - 1);
        for (int j = 0; j < mesh.angles; ++j) {
            double phi = 2.0 * std::numbers::pi * j / mesh.angles;
            pts.push_back({r * std::cos(phi), r * std::sin(phi)});
        }
    }
    return pts;
}

Domain::Domain(std::vector<Site> sites) {
    if (sites.empty()) return;
    lo_ = hi_ = sites.front();
    for (const Site& s : sites) {
        lo_.x = std::min(lo_.x, s.x);
        lo_.y = std::min(lo_.y, s.y);
        hi_.x = std::max(hi_.x, s.x);
        hi_.y = std::max(hi_.y, s.y);
    }
    std::size_t w = std::size_t(hi_.x - lo_.x + 1);
    std::size_t h = std::size_t(hi_.y - lo_.y + 1);
    slot_.assign(w * h, -1);
    sites_.reserve(sites.size());
    for (const Site& s : sites) {
        int& k = slot_[std::size_t(s.y - lo_.y) * w + std::size_t(s.x - lo_.x)];
        if (k >= 0) continue;
        k = int(sites_.size());
        sites_.push_back(s);
    }
}

int Domain::index(Site s) const {
    if (s.x < lo_.x || s.x > hi_.x || s.y < lo_.y || s.y > hi_.y) return -1;
    std::size_t w = std::size_t(hi_.x - lo_.x + 1);
    return slot_[std::size_t(s.y - lo_.y) * w + std::size_t(s.x - lo_.x)];
}

}  // namespace rcm
