#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

struct ClusterGeometry {
    Window window;
    std::vector<int> label;          // window index -> component id
    std::vector<std::int64_t> sizes; // component id -> number of sites
    int giant_id = 0;
    bool giant_tie = false;     // several components share the maximal size
    bool giant_trivial = false; // largest component is a single site
    bool giant_spans = false;   // giant touches all four window sides

    int id(Site s) const { return label[window.index(s)]; }
    bool in_giant(Site s) const { return window.contains(s) && id(s) == giant_id; }
    std::int64_t giant_size() const { return sizes[std::size_t(giant_id)]; }
};

// Union-find labeling; ids follow row-major first appearance.
ClusterGeometry clusters(const StaticEnvironment& env);
// Breadth-first labeling with the same id convention, used as a cross-check.
ClusterGeometry clusters_bfs(const StaticEnvironment& env);

// C_n(x) = open component of x inside B(x, n) intersected with the giant cluster
std::vector<Site> component_in_ball(const StaticEnvironment& env, const ClusterGeometry& geom, Site x, int n);
std::vector<Site> component_in_ball(const StaticEnvironment& env, Site x, int n);

// Closest giant-cluster site in Euclidean distance; ties go to the smallest (x, y).
Site nearest_cluster_point(const ClusterGeometry& geom, Point target);

// Shortest open-path length; nullopt when x and y are not connected.
std::optional<int> chemical_distance(const StaticEnvironment& env, Site x, Site y);
// Open path from x to y (inclusive) inside `allowed`, or empty if none.
std::vector<Site> open_path(const StaticEnvironment& env, Site x, Site y, const Domain* allowed = nullptr);

struct ThetaEstimate {
    double theta_hat = 0.0;
    double std_error = 0.0;
    int num_seeds = 0;
    int spanning_runs = 0;
    bool subcritical_warning = false;
};

// Fraction of window sites (or of the half-width interior box) in the giant component.
ThetaEstimate estimate_theta(const ConductanceLaw& law, int L, int num_seeds, std::uint64_t master_seed,
                             bool interior_only = false, int threads = 1);

}  // namespace rcm
