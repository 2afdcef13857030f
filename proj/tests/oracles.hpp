#pragma once

// Test-only generators and independent reference computations.

#include "cgot/graph.hpp"
#include "cgot/field.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace cgot::testing {

using Rng = std::mt19937_64;

inline Matrix random_orthogonal(int d, Rng& rng) {
    std::normal_distribution<double> nd;
    Matrix a(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = nd(rng);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    for (int k = 0; k < d; ++k)
        if (qr.matrixQR()(k, k) < 0) q.col(k) = -q.col(k);
    return q;
}

inline Matrix rotation2(double theta) {
    Matrix r(2, 2);
    r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return r;
}

/// Random spanning tree plus `extra` random chords; vertex pairs with i < j.
inline std::vector<std::pair<int, int>> random_connected_pairs(int n, int extra, Rng& rng) {
    std::set<std::pair<int, int>> pairs;
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> pick(0, v - 1);
        int u = pick(rng);
        pairs.insert({std::min(u, v), std::max(u, v)});
    }
    std::uniform_int_distribution<int> any(0, n - 1);
    const int max_edges = n * (n - 1) / 2;
    for (int k = 0; k < extra && int(pairs.size()) < max_edges; ++k) {
        int a = any(rng), b = any(rng);
        if (a == b) continue;
        pairs.insert({std::min(a, b), std::max(a, b)});
    }
    return {pairs.begin(), pairs.end()};
}

enum class ConnectionKind { Trivial, Consistent, Random };

inline ConnectionGraph random_graph(int n, int d, int extra, ConnectionKind kind, Rng& rng, bool random_weights = true) {
    auto pairs = random_connected_pairs(n, extra, rng);
    std::uniform_real_distribution<double> wd(0.5, 2.0);
    std::vector<Matrix> tau;
    for (int i = 0; i < n; ++i) tau.push_back(random_orthogonal(d, rng));
    ConnectionGraph g;
    g.n = n;
    g.d = d;
    for (auto [i, j] : pairs) {
        Matrix s = Matrix::Identity(d, d);
        if (kind == ConnectionKind::Consistent) s = tau[i] * tau[j].transpose();
        if (kind == ConnectionKind::Random) s = random_orthogonal(d, rng);
        g.edges.push_back({i, j, random_weights ? wd(rng) : 1.0, s});
    }
    return g;
}

inline VectorField random_field(int n, int d, Rng& rng) {
    std::normal_distribution<double> nd;
    VectorField f(n, d);
    for (Eigen::Index k = 0; k < f.values.size(); ++k) f.values[k] = nd(rng);
    return f;
}

/// Nonnegative entries, each channel summing to one.
inline VectorField random_density(int n, int d, Rng& rng) {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    VectorField f(n, d);
    for (int l = 0; l < d; ++l) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += (f(i, l) = ud(rng));
        for (int i = 0; i < n; ++i) f(i, l) /= s;
    }
    return f;
}

/// Field whose difference with zero is orthogonal to the given orthonormal columns.
inline VectorField orthogonalize(const VectorField& f, const Matrix& basis) {
    VectorField out = f;
    if (basis.cols()) out.values -= basis * (basis.transpose() * out.values);
    return out;
}

/// Dense B for the oracle side, assembled entry by entry from the edge list.
inline Matrix dense_incidence(const ConnectionGraph& g) {
    const int d = g.d;
    Matrix B = Matrix::Zero(g.n * d, g.num_edges() * d);
    for (int e = 0; e < g.num_edges(); ++e) {
        B.block(g.edges[e].i * d, e * d, d, d) = Matrix::Identity(d, d);
        B.block(g.edges[e].j * d, e * d, d, d) = -g.edges[e].sigma.transpose();
    }
    return B;
}

/// Unique flow on a tree by leaf elimination of B J = c.
inline EdgeFlow tree_flow(const ConnectionGraph& g, const VectorField& c) {
    const int d = g.d;
    std::vector<std::vector<int>> inc(g.n);
    for (int e = 0; e < g.num_edges(); ++e) {
        inc[g.edges[e].i].push_back(e);
        inc[g.edges[e].j].push_back(e);
    }
    std::vector<int> degree(g.n);
    for (int v = 0; v < g.n; ++v) degree[v] = int(inc[v].size());
    std::vector<bool> edge_done(g.num_edges(), false);
    VectorField rem = c;
    EdgeFlow J(g.num_edges(), d);
    std::vector<int> leaves;
    for (int v = 0; v < g.n; ++v)
        if (degree[v] == 1) leaves.push_back(v);
    while (!leaves.empty()) {
        int v = leaves.back();
        leaves.pop_back();
        if (degree[v] != 1) continue;
        int e = -1;
        for (int cand : inc[v])
            if (!edge_done[cand]) e = cand;
        const Edge& edge = g.edges[e];
        const int u = edge.i == v ? edge.j : edge.i;
        if (edge.i == v) {
            J.at(e) = rem.at(v);
            rem.at(u) += edge.sigma.transpose() * J.at(e);
        } else {
            J.at(e) = -edge.sigma * rem.at(v);
            rem.at(u) -= J.at(e);
        }
        rem.at(v).setZero();
        edge_done[e] = true;
        --degree[v];
        if (--degree[u] == 1) leaves.push_back(u);
    }
    return J;
}

/// Minimum-cost flow for d = 1 trivial connections: min sum w|J| with B J = c, by
/// successive shortest paths (Bellman-Ford) on the residual graph.
inline double min_cost_flow_d1(const ConnectionGraph& g, const VectorField& c) {
    struct Arc {
        int to;
        double cap, cost;
        int rev;
    };
    const int n = g.n, S = n, T = n + 1;
    std::vector<std::vector<Arc>> adj(n + 2);
    auto add = [&](int u, int v, double cap, double cost) {
        adj[u].push_back({v, cap, cost, int(adj[v].size())});
        adj[v].push_back({u, 0.0, -cost, int(adj[u].size()) - 1});
    };
    const double inf = std::numeric_limits<double>::infinity();
    for (const Edge& e : g.edges) {
        add(e.i, e.j, inf, e.w);
        add(e.j, e.i, inf, e.w);
    }
    double supply = 0.0;
    for (int i = 0; i < n; ++i) {
        if (c(i, 0) > 0) {
            add(S, i, c(i, 0), 0.0);
            supply += c(i, 0);
        } else if (c(i, 0) < 0) {
            add(i, T, -c(i, 0), 0.0);
        }
    }
    double total_cost = 0.0, sent = 0.0;
    while (sent < supply - 1e-13) {
        std::vector<double> dist(n + 2, inf);
        std::vector<int> pv(n + 2, -1), pa(n + 2, -1);
        dist[S] = 0.0;
        for (int it = 0; it < n + 2; ++it) {
            bool relaxed = false;
            for (int u = 0; u < n + 2; ++u) {
                if (dist[u] == inf) continue;
                for (int k = 0; k < int(adj[u].size()); ++k) {
                    const Arc& a = adj[u][k];
                    if (a.cap <= 1e-15) continue;
                    if (dist[u] + a.cost < dist[a.to] - 1e-15) {
                        dist[a.to] = dist[u] + a.cost;
                        pv[a.to] = u;
                        pa[a.to] = k;
                        relaxed = true;
                    }
                }
            }
            if (!relaxed) break;
        }
        if (dist[T] == inf) break;
        double push = inf;
        for (int v = T; v != S; v = pv[v]) push = std::min(push, adj[pv[v]][pa[v]].cap);
        for (int v = T; v != S; v = pv[v]) {
            Arc& a = adj[pv[v]][pa[v]];
            a.cap -= push;
            adj[v][a.rev].cap += push;
        }
        sent += push;
        total_cost += push * dist[T];
    }
    return total_cost;
}

/// Central finite-difference gradient.
inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
    Vector g(x.size());
    Vector xp = x, xm = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        xp[k] = x[k] + h;
        xm[k] = x[k] - h;
        g[k] = (f(xp) - f(xm)) / (2.0 * h);
        xp[k] = xm[k] = x[k];
    }
    return g;
}

/// Sorted eigenvalues of a dense symmetric matrix.
inline Vector sorted_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Each eigenvalue of the combinatorial Laplacian repeated d times, sorted.
inline Vector repeated_spectrum(const Matrix& laplacian, int d) {
    Vector base = sorted_eigenvalues(laplacian);
    Vector out(base.size() * d);
    for (Eigen::Index k = 0; k < base.size(); ++k) out.segment(k * d, d).setConstant(base[k]);
    return out;
}

// Small instances: path 0-1-2 with sigma_12 = -1, and the diamond with
// edges (0,2) sigma=-1, (0,1), (2,3), (1,3) sigma=+1.
inline ConnectionGraph flipped_path() {
    ConnectionGraph g = ConnectionGraph::trivial(3, 1, {{0, 1}, {1, 2}});
    g.edges[1].sigma(0, 0) = -1.0;
    return g;
}

inline ConnectionGraph flipped_diamond() {
    ConnectionGraph g = ConnectionGraph::trivial(4, 1, {{0, 2}, {0, 1}, {2, 3}, {1, 3}});
    g.edges[0].sigma(0, 0) = -1.0;
    return g;
}

inline VectorField dirac(int n, int node, double mass = 1.0) {
    VectorField f(n, 1);
    f(node, 0) = mass;
    return f;
}

}  // namespace cgot::testing
