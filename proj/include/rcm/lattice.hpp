#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

namespace rcm {

struct Site {
    int x = 0;
    int y = 0;
    friend bool operator==(const Site&, const Site&) = default;
    friend auto operator<=>(const Site&, const Site&) = default;
};

inline Site operator+(Site a, Site b) { return {a.x + b.x, a.y + b.y}; }
inline Site operator-(Site a, Site b) { return {a.x - b.x, a.y - b.y}; }

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// direction codes: 0 east, 1 west, 2 north, 3 south
inline constexpr std::array<Site, 4> kSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
inline constexpr int opposite(int dir) { return dir ^ 1; }

struct Edge {
    Site a;
    Site b;
    static Edge make(Site p, Site q);
    friend bool operator==(const Edge&, const Edge&) = default;
};

struct Window {
    int L = 1;

    bool contains(Site s) const { return std::abs(s.x) <= L && std::abs(s.y) <= L; }
    // sites whose four neighbours are all inside the window
    bool interior(Site s) const { return std::abs(s.x) < L && std::abs(s.y) < L; }
    int side() const { return 2 * L + 1; }
    std::size_t num_sites() const { return std::size_t(side()) * side(); }
    // row-major: y outer, x inner
    std::size_t index(Site s) const {
        return std::size_t(s.y + L) * side() + std::size_t(s.x + L);
    }
    Site site(std::size_t i) const {
        return {int(i % side()) - L, int(i / side()) - L};
    }
};

struct Annulus {
    double k1 = 1.0;
    double k2 = 2.0;
};

struct Mesh {
    int radii = 16;
    int angles = 64;
};

std::array<Site, 4> neighbors(Site s);
int l1_distance(Site a, Site b);
double euclid(Point p);
double euclid(Site s);

// B(c, r) = {y : |y - c|_1 < r}, row-major order
std::vector<Site> ball(Site center, int r);
// {y : |y - c|_1 = r}
std::vector<Site> sphere(Site center, int r);
// Euclidean disc {y : |y - c|_2 < r}
std::vector<Site> disc(Site center, double r);

enum class BallShape { diamond, disc };
std::vector<Site> make_ball(BallShape shape, Site center, double r);
BallShape parse_ball_shape(const std::string& s);

// Polar mesh of K: radii linearly spaced including both endpoints.
std::vector<Point> annulus_targets(const Annulus& K, const Mesh& mesh);

// Dense index over a site list, backed by its bounding box.
class Domain {
public:
    Domain() = default;
    explicit Domain(std::vector<Site> sites);

    std::size_t size() const { return sites_.size(); }
    bool empty() const { return sites_.empty(); }
    const std::vector<Site>& sites() const { return sites_; }
    const Site& operator[](std::size_t i) const { return sites_[i]; }
    int index(Site s) const;
    bool contains(Site s) const { return index(s) >= 0; }
    Site lo() const { return lo_; }
    Site hi() const { return hi_; }

private:
    std::vector<Site> sites_;
    std::vector<int> slot_;
    Site lo_{0, 0};
    Site hi_{-1, -1};
};

}  // namespace rcm
