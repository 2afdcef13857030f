#pragma once

#include "cgot/transport.hpp"

#include <cstdint>
#include <vector>

namespace cgot {

/// Density with channel `channel` concentrated on `node` and every other channel uniform 1/n.
VectorField pseudo_dirac(int n, int d, int node, int channel);

/// Vertices with ||field(i)||_2 > threshold, ascending.
std::vector<int> nodal_support(const VectorField& field, double threshold = 1e-9);

/// Hop-distance rings around a vertex set: r_e = min(dist(i, S), dist(j, S)).
struct RingPartition {
    std::vector<int> vertex_distance;
    std::vector<int> ring;  ///< per edge

    int max_ring() const;
    /// Edge k-disk E_k = {e : r_e < k}.
    std::vector<bool> disk(int k) const;
};

RingPartition edge_rings(const ConnectionGraph& g, const std::vector<int>& support);

/// Largest BFS eccentricity over all vertices (unweighted).
int hop_diameter(const ConnectionGraph& g);

struct Trajectory {
    std::vector<VectorField> states;  ///< alpha_0 .. alpha_K
    std::vector<double> residual;     ///< ||alpha_k - (alpha - B J)||_2 per step
};

/// alpha_k = alpha - B (J restricted to E_k) for k = 0..steps.
Trajectory interpolate_trajectory(const ConnectionGraph& g, const VectorField& alpha, const EdgeFlow& flow,
                                  const RingPartition& rings, int steps);

/// Edges with ||J(e)||_2 > delta, ascending.
std::vector<int> active_edges(const EdgeFlow& flow, double delta);

enum class DistanceKind {
    Regularized,  ///< sum w||J|| + (lambda/2)||J||^2 at the regularized optimum
    Transport,    ///< sum w||J|| at the regularized optimum
};

struct DistanceOptions {
    SolveOptions solve;
    DistanceKind kind = DistanceKind::Regularized;
    int jobs = 1;
};

struct DistanceMatrix {
    Matrix values;  ///< k x k, +inf for infeasible pairs
    int unconverged = 0;
};

/// Pairwise transport costs. The diagonal is exactly zero and no solve is run for it;
/// entry (b, a) is a copy of (a, b).
DistanceMatrix distance_matrix(const ConnectionGraph& g, const std::vector<VectorField>& fields,
                               const DistanceOptions& opts = {});

/// exp(-gamma D) with exp(-inf) = 0.
Matrix affinity_from_distance(const Matrix& distance, double gamma = 0.1);

struct ClusterOptions {
    std::uint64_t seed = 0;
    int restarts = 20;
    int max_iters = 300;
};

struct ClusterResult {
    std::vector<int> labels;  ///< relabeled in order of first appearance
    bool converged = true;
    double inertia = 0.0;
};

/// Normalized-affinity spectral embedding (top num_clusters eigenvectors of
/// D^{-1/2} A D^{-1/2}, rows normalized) followed by seeded k-means++ / Lloyd.
ClusterResult spectral_cluster(const Matrix& affinity, int num_clusters, const ClusterOptions& opts = {});

/// Lloyd k-means with k-means++ seeding over `restarts` runs; the lowest-inertia run wins.
ClusterResult kmeans(const Matrix& points, int k, const ClusterOptions& opts = {});

}  // namespace cgot
