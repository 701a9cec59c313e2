#include "rcm/percolation.hpp"

#include <cmath>
#include <deque>
#include <numeric>

#include "rcm/errors.hpp"
#include "rcm/parallel.hpp"
#include "rcm/rng.hpp"

namespace rcm {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent[b] = a;
        else parent[a] = b;
    }
};

void finish(ClusterGeometry& g) {
    const Window& w = g.window;
    int best = 0;
    int ties = 0;
    for (std::size_t id = 0; id < g.sizes.size(); ++id) {
        if (g.sizes[id] > g.sizes[std::size_t(best)]) {
            best = int(id);
            ties = 0;
        } else if (id != std::size_t(best) && g.sizes[id] == g.sizes[std::size_t(best)]) {
            ++ties;
        }
    }
    g.giant_id = best;
    g.giant_tie = ties > 0;
    g.giant_trivial = g.sizes[std::size_t(best)] <= 1;
    bool west = false, east = false, south = false, north = false;
    for (int t = -w.L; t <= w.L; ++t) {
        west |= g.id({-w.L, t}) == best;
        east |= g.id({w.L, t}) == best;
        south |= g.id({t, -w.L}) == best;
        north |= g.id({t, w.L}) == best;
    }
    g.giant_spans = west && east && south && north;
}

}  // namespace

ClusterGeometry clusters(const StaticEnvironment& env) {
    const Window& w = env.window();
    const std::size_t n = w.num_sites();
    const int side = w.side();
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        Site s = w.site(i);
        if (s.x < w.L && env.east()[i] > 0.0) uf.unite(int(i), int(i + 1));
        if (s.y < w.L && env.north()[i] > 0.0) uf.unite(int(i), int(i + side));
    }
    ClusterGeometry g;
    g.window = w;
    g.label.assign(n, -1);
    std::vector<int> root_id(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        int r = uf.find(int(i));
        if (root_id[r] < 0) {
            root_id[r] = int(g.sizes.size());
            g.sizes.push_back(0);
        }
        g.label[i] = root_id[r];
        ++g.sizes[std::size_t(root_id[r])];
    }
    finish(g);
    return g;
}

ClusterGeometry clusters_bfs(const StaticEnvironment& env) {
    const Window& w = env.window();
    const std::size_t n = w.num_sites();
    ClusterGeometry g;
    g.window = w;
    g.label.assign(n, -1);
    std::deque<Site> queue;
    for (std::size_t i = 0; i < n; ++i) {
        if (g.label[i] >= 0) continue;
        int id = int(g.sizes.size());
        g.sizes.push_back(1);
        g.label[i] = id;
        queue.push_back(w.site(i));
        while (!queue.empty()) {
            Site s = queue.front();
            queue.pop_front();
            for (int d = 0; d < 4; ++d) {
                Site t = s + kSteps[d];
                if (!w.contains(t) || env.omega(s, d) <= 0.0) continue;
                int& lt = g.label[w.index(t)];
                if (lt >= 0) continue;
                lt = id;
                ++g.sizes[std::size_t(id)];
                queue.push_back(t);
            }
        }
    }
    finish(g);
    return g;
}

std::vector<Site> component_in_ball(const StaticEnvironment& env, const ClusterGeometry& geom, Site x, int n) {
    const Window& w = env.window();
    if (!geom.in_giant(x)) throw DomainError("site is not on the giant cluster");
    std::vector<Site> out;
    if (n < 1) return out;
    std::vector<char> seen(w.num_sites(), 0);
    seen[w.index(x)] = 1;
    out.push_back(x);
    for (std::size_t head = 0; head < out.size(); ++head) {
        Site s = out[head];
        for (int d = 0; d < 4; ++d) {
            Site t = s + kSteps[d];
            if (!w.contains(t) || l1_distance(t, x) >= n) continue;
            if (env.omega(s, d) <= 0.0) continue;
            char& f = seen[w.index(t)];
            if (f) continue;
            f = 1;
            out.push_back(t);
        }
    }
    return out;
}

std::vector<Site> component_in_ball(const StaticEnvironment& env, Site x, int n) {
    return component_in_ball(env, clusters(env), x, n);
}

Site nearest_cluster_point(const ClusterGeometry& geom, Point target) {
    const Window& w = geom.window;
    if (geom.giant_size() <= 0) throw DomainError("giant cluster is empty");
    Site c{int(std::lround(target.x)), int(std::lround(target.y))};
    bool found = false;
    Site best{};
    double best_d2 = 0.0;
    auto consider = [&](Site s) {
        if (!w.contains(s) || geom.id(s) != geom.giant_id) return;
        double dx = s.x - target.x, dy = s.y - target.y;
        double d2 = dx * dx + dy * dy;
        if (!found || d2 < best_d2 || (d2 == best_d2 && s < best)) {
            found = true;
            best = s;
            best_d2 = d2;
        }
    };
    int r_max = std::abs(c.x) + std::abs(c.y) + 2 * w.L + 2;
    for (int r = 0; r <= r_max; ++r) {
        if (found && double(r) - 0.5 > std::sqrt(best_d2)) break;
        if (r == 0) {
            consider(c);
            continue;
        }
        for (int t = -r; t <= r; ++t) {
            consider({c.x + t, c.y - r});
            consider({c.x + t, c.y + r});
            if (t != -r && t != r) {
                consider({c.x - r, c.y + t});
                consider({c.x + r, c.y + t});
            }
        }
    }
    if (!found) throw DomainError("no giant-cluster site found");
    return best;
}

std::vector<Site> open_path(const StaticEnvironment& env, Site x, Site y, const Domain* allowed) {
    const Window& w = env.window();
    if (!w.contains(x) || !w.contains(y)) throw DomainError("path endpoints outside the window");
    std::vector<int> prev(w.num_sites(), -2);
    std::deque<Site> queue{x};
    prev[w.index(x)] = -1;
    while (!queue.empty()) {
        Site s = queue.front();
        queue.pop_front();
        if (s == y) break;
        for (int d = 0; d < 4; ++d) {
            Site t = s + kSteps[d];
            if (!w.contains(t) || env.omega(s, d) <= 0.0) continue;
            if (allowed && !allowed->contains(t)) continue;
            int& p = prev[w.index(t)];
            if (p != -2) continue;
            p = int(w.index(s));
            queue.push_back(t);
        }
    }
    std::vector<Site> path;
    if (prev[w.index(y)] == -2) return path;
    for (int i = int(w.index(y)); i != -1; i = prev[std::size_t(i)]) path.push_back(w.site(std::size_t(i)));
    return {path.rbegin(), path.rend()};
}

std::optional<int> chemical_distance(const StaticEnvironment& env, Site x, Site y) {
    auto path = open_path(env, x, y);
    if (path.empty()) return std::nullopt;
    return int(path.size()) - 1;
}

ThetaEstimate estimate_theta(const ConductanceLaw& law, int L, int num_seeds, std::uint64_t master_seed,
                             bool interior_only, int threads) {
    if (num_seeds < 1) throw ConfigError("estimate_theta needs at least one seed");
    ThetaEstimate est;
    est.num_seeds = num_seeds;
    est.subcritical_warning = law.p_open <= 0.5;
    std::vector<double> frac(std::size_t(num_seeds), 0.0);
    std::vector<int> spans(std::size_t(num_seeds), 0);
    parallel_for(std::size_t(num_seeds), threads, [&](std::size_t i) {
        auto env = StaticEnvironment::sample(law, Window{L}, derive_seed(master_seed, 1, std::int64_t(i)));
        auto g = clusters(env);
        spans[i] = g.giant_spans;
        if (!interior_only) {
            frac[i] = double(g.giant_size()) / double(env.window().num_sites());
            return;
        }
        int h = L / 2;
        std::size_t hit = 0, total = 0;
        for (int y = -h; y <= h; ++y)
            for (int x = -h; x <= h; ++x, ++total) hit += g.in_giant({x, y});
        frac[i] = double(hit) / double(total);
    });
    double mean = 0.0;
    for (double f : frac) mean += f;
    mean /= num_seeds;
    double var = 0.0;
    for (double f : frac) var += (f - mean) * (f - mean);
    est.theta_hat = mean;
    est.std_error = num_seeds > 1 ? std::sqrt(var / (num_seeds - 1) / num_seeds) : 0.0;
    for (int s : spans) est.spanning_runs += s;
    return est;
}

}  // namespace rcm
