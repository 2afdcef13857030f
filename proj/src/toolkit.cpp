#include "cgot/toolkit.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <thread>

namespace cgot {

VectorField pseudo_dirac(int n, int d, int node, int channel) {
    if (n < 1 || d < 1) throw ValidationError("pseudo_dirac needs n >= 1 and d >= 1");
    if (node < 0 || node >= n) throw ValidationError("pseudo_dirac node index out of range");
    if (channel < 0 || channel >= d) throw ValidationError("pseudo_dirac channel index out of range");
    VectorField f(n, d);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < d; ++l) f(i, l) = l == channel ? (i == node ? 1.0 : 0.0) : 1.0 / n;
    return f;
}

std::vector<int> nodal_support(const VectorField& field, double threshold) {
    if (threshold < 0.0) throw ValidationError("support threshold must be nonnegative");
    std::vector<int> out;
    for (int i = 0; i < field.n; ++i)
        if (field.at(i).norm() > threshold) out.push_back(i);
    return out;
}

int RingPartition::max_ring() const { return ring.empty() ? 0 : *std::max_element(ring.begin(), ring.end()); }

std::vector<bool> RingPartition::disk(int k) const {
    std::vector<bool> in(ring.size());
    for (std::size_t e = 0; e < ring.size(); ++e) in[e] = ring[e] < k;
    return in;
}

namespace {

std::vector<int> bfs_distances(const ConnectionGraph& g, const std::vector<int>& sources) {
    auto adj = adjacency(g);
    std::vector<int> dist(g.n, -1);
    std::queue<int> q;
    for (int s : sources) {
        if (dist[s] == 0) continue;
        dist[s] = 0;
        q.push(s);
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (auto [u, e] : adj[v]) {
            if (dist[u] >= 0) continue;
            dist[u] = dist[v] + 1;
            q.push(u);
        }
    }
    return dist;
}

}  // namespace

RingPartition edge_rings(const ConnectionGraph& g, const std::vector<int>& support) {
    require_valid(g);
    if (support.empty()) throw ValidationError("edge_rings needs a nonempty support");
    for (int s : support)
        if (s < 0 || s >= g.n) throw ValidationError("support vertex out of range");
    RingPartition rp;
    rp.vertex_distance = bfs_distances(g, support);
    rp.ring.reserve(g.edges.size());
    for (const Edge& e : g.edges) rp.ring.push_back(std::min(rp.vertex_distance[e.i], rp.vertex_distance[e.j]));
    return rp;
}

int hop_diameter(const ConnectionGraph& g) {
    require_valid(g);
    int diam = 0;
    for (int v = 0; v < g.n; ++v) {
        auto dist = bfs_distances(g, {v});
        diam = std::max(diam, *std::max_element(dist.begin(), dist.end()));
    }
    return diam;
}

Trajectory interpolate_trajectory(const ConnectionGraph& g, const VectorField& alpha, const EdgeFlow& flow,
                                  const RingPartition& rings, int steps) {
    require_valid(g);
    if (alpha.n != g.n || alpha.d != g.d) throw DimensionError("alpha does not match graph");
    if (flow.m != g.num_edges() || flow.d != g.d) throw DimensionError("flow does not match graph");
    if (static_cast<int>(rings.ring.size()) != g.num_edges()) throw DimensionError("rings do not match graph");
    if (steps < 0) throw ValidationError("step count must be nonnegative");

    const VectorField target = alpha - apply_B(g, flow);
    Trajectory traj;
    for (int k = 0; k <= steps; ++k) {
        if (k == 0) {
            traj.states.push_back(alpha);
        } else {
            EdgeFlow restricted(flow.m, flow.d);
            for (int e = 0; e < flow.m; ++e)
                if (rings.ring[e] < k) restricted.at(e) = flow.at(e);
            traj.states.push_back(alpha - apply_B(g, restricted));
        }
        traj.residual.push_back((traj.states.back() - target).values.norm());
    }
    return traj;
}

std::vector<int> active_edges(const EdgeFlow& flow, double delta) {
    if (delta < 0.0) throw ValidationError("delta must be nonnegative");
    std::vector<int> out;
    for (int e = 0; e < flow.m; ++e)
        if (flow.at(e).norm() > delta) out.push_back(e);
    return out;
}

DistanceMatrix distance_matrix(const ConnectionGraph& g, const std::vector<VectorField>& fields,
                               const DistanceOptions& opts) {
    require_valid(g);
    for (const auto& f : fields)
        if (f.n != g.n || f.d != g.d) throw DimensionError("field does not match graph");
    const int k = static_cast<int>(fields.size());
    const KernelBasis kernel = kernel_numeric(g);

    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) pairs.emplace_back(a, b);

    DistanceMatrix out{Matrix::Zero(k, k), 0};
    std::vector<char> unconverged(pairs.size(), 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t p = next++; p < pairs.size(); p = next++) {
            auto [a, b] = pairs[p];
            WassersteinResult w = wasserstein(g, fields[a], fields[b], opts.solve, kernel);
            double value = opts.kind == DistanceKind::Regularized ? w.regularized_cost : w.distance;
            out.values(a, b) = value;
            if (w.solve && !w.solve->report.converged) unconverged[p] = 1;
        }
    };
    const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(pairs.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto [a, b] : pairs) out.values(b, a) = out.values(a, b);
    for (char u : unconverged) out.unconverged += u;
    return out;
}

Matrix affinity_from_distance(const Matrix& distance, double gamma) {
    Matrix a(distance.rows(), distance.cols());
    for (Eigen::Index i = 0; i < distance.rows(); ++i)
        for (Eigen::Index j = 0; j < distance.cols(); ++j)
            a(i, j) = std::isinf(distance(i, j)) ? 0.0 : std::exp(-gamma * distance(i, j));
    return a;
}

namespace {

struct LloydRun {
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
    bool converged = false;
};

LloydRun lloyd(const Matrix& x, int k, int max_iters, std::mt19937_64& rng) {
    const int n = static_cast<int>(x.rows());
    Matrix centers(k, x.cols());

    // k-means++ seeding
    std::uniform_int_distribution<int> pick(0, n - 1);
    centers.row(0) = x.row(pick(rng));
    Vector closest(n);
    for (int i = 0; i < n; ++i) closest[i] = (x.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = closest.sum();
        int chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng), acc = 0.0;
            chosen = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += closest[i];
                if (acc >= target) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = pick(rng);
        }
        centers.row(c) = x.row(chosen);
        for (int i = 0; i < n; ++i) closest[i] = std::min(closest[i], (x.row(i) - centers.row(c)).squaredNorm());
    }

    LloydRun run;
    run.labels.assign(n, -1);
    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double dist = (x.row(i) - centers.row(c)).squaredNorm();
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            if (run.labels[i] != best) {
                run.labels[i] = best;
                changed = true;
            }
        }
        if (!changed && it > 0) {
            run.converged = true;
            break;
        }
        Matrix sums = Matrix::Zero(k, x.cols());
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            sums.row(run.labels[i]) += x.row(i);
            ++counts[run.labels[i]];
        }
        for (int c = 0; c < k; ++c)
            if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];
    }
    run.inertia = 0.0;
    for (int i = 0; i < n; ++i) run.inertia += (x.row(i) - centers.row(run.labels[i])).squaredNorm();
    return run;
}

std::vector<int> relabel_by_first_appearance(const std::vector<int>& labels) {
    std::map<int, int> remap;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = remap.try_emplace(labels[i], static_cast<int>(remap.size())).first;
        out[i] = it->second;
    }
    return out;
}

}  // namespace

ClusterResult kmeans(const Matrix& points, int k, const ClusterOptions& opts) {
    if (k < 1 || k > points.rows()) throw ValidationError("cluster count must lie in [1, number of points]");
    std::mt19937_64 rng(opts.seed);
    LloydRun best;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        LloydRun run = lloyd(points, k, opts.max_iters, rng);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return {relabel_by_first_appearance(best.labels), best.converged, best.inertia};
}

ClusterResult spectral_cluster(const Matrix& affinity, int num_clusters, const ClusterOptions& opts) {
    const Eigen::Index n = affinity.rows();
    if (affinity.cols() != n) throw DimensionError("affinity must be square");
    if ((affinity - affinity.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw ValidationError("affinity must be symmetric");
    if ((affinity.array() < 0.0).any()) throw ValidationError("affinity must be nonnegative");
    if (num_clusters < 1 || num_clusters > n) throw ValidationError("cluster count must lie in [1, n]");

    Vector inv_sqrt_deg(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double deg = affinity.row(i).sum();
        inv_sqrt_deg[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
    }
    const Matrix normalized = inv_sqrt_deg.asDiagonal() * affinity * inv_sqrt_deg.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> es(normalized);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on normalized affinity");
    Matrix embedding = es.eigenvectors().rightCols(num_clusters);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double nrm = embedding.row(i).norm();
        if (nrm > 0.0) embedding.row(i) /= nrm;
    }
    return kmeans(embedding, num_clusters, opts);
}

}  // namespace cgot
