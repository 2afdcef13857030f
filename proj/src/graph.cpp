#include "cgot/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace cgot {

double ConnectionGraph::max_weight() const {
    double w = 0.0;
    for (const auto& e : edges) w = std::max(w, e.w);
    return w;
}

ConnectionGraph ConnectionGraph::trivial(int n, int d, const std::vector<std::pair<int, int>>& pairs,
                                         double w) {
    ConnectionGraph g;
    g.n = n;
    g.d = d;
    g.edges.reserve(pairs.size());
    for (auto [a, b] : pairs) g.edges.push_back({std::min(a, b), std::max(a, b), w, Matrix::Identity(d, d)});
    return g;
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::BadDimensions: return "bad-dimensions";
        case ViolationKind::VertexOutOfRange: return "vertex-out-of-range";
        case ViolationKind::Misordered: return "misordered-edge";
        case ViolationKind::Duplicate: return "duplicate-edge";
        case ViolationKind::NonPositiveWeight: return "nonpositive-weight";
        case ViolationKind::BadSigmaShape: return "bad-sigma-shape";
        case ViolationKind::NonOrthogonal: return "non-orthogonal-sigma";
        case ViolationKind::NonFinite: return "non-finite";
        case ViolationKind::Disconnected: return "disconnected";
    }
    return "unknown";
}

double orthogonality_defect(const Matrix& q) {
    if (q.rows() != q.cols() || q.size() == 0) return std::numeric_limits<double>::infinity();
    return (q.transpose() * q - Matrix::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
}

Matrix polar_factor(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

bool is_connected(int n, const std::vector<std::pair<int, int>>& pairs) {
    if (n <= 0) return false;
    std::vector<std::vector<int>> adj(n);
    for (auto [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= n || b >= n) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : adj[v])
            if (!seen[u]) {
                seen[u] = true;
                ++count;
                stack.push_back(u);
            }
    }
    return count == n;
}

ValidationReport validate_graph(const ConnectionGraph& g, double orth_tol) {
    ValidationReport report;
    auto add = [&](ViolationKind k, int e, std::string msg) { report.push_back({k, e, std::move(msg)}); };

    if (g.n < 2 || g.d < 1) {
        add(ViolationKind::BadDimensions, -1,
            "need n >= 2 and d >= 1, got n=" + std::to_string(g.n) + " d=" + std::to_string(g.d));
        return report;
    }

    std::set<std::pair<int, int>> seen;
    std::vector<std::pair<int, int>> pairs;
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& edge = g.edges[e];
        const std::string tag = "edge " + std::to_string(e) + " (" + std::to_string(edge.i) + "," +
                                std::to_string(edge.j) + ")";
        if (edge.i < 0 || edge.j < 0 || edge.i >= g.n || edge.j >= g.n) {
            add(ViolationKind::VertexOutOfRange, e, tag + ": vertex index out of range");
            continue;
        }
        if (edge.i >= edge.j) add(ViolationKind::Misordered, e, tag + ": expected i < j");
        if (!seen.insert({std::min(edge.i, edge.j), std::max(edge.i, edge.j)}).second)
            add(ViolationKind::Duplicate, e, tag + ": duplicate vertex pair");
        if (!std::isfinite(edge.w))
            add(ViolationKind::NonFinite, e, tag + ": weight is not finite");
        else if (edge.w <= 0.0)
            add(ViolationKind::NonPositiveWeight, e, tag + ": weight must be positive");
        if (edge.sigma.rows() != g.d || edge.sigma.cols() != g.d) {
            add(ViolationKind::BadSigmaShape, e, tag + ": sigma must be d x d");
        } else if (!edge.sigma.allFinite()) {
            add(ViolationKind::NonFinite, e, tag + ": sigma has non-finite entries");
        } else {
            double defect = orthogonality_defect(edge.sigma);
            if (defect > orth_tol) {
                std::ostringstream os;
                os << tag << ": sigma is not orthogonal (max |s^T s - I| = " << defect << ")";
                add(ViolationKind::NonOrthogonal, e, os.str());
            }
        }
        pairs.emplace_back(edge.i, edge.j);
    }
    if (!is_connected(g.n, pairs)) add(ViolationKind::Disconnected, -1, "graph is not connected");
    return report;
}

void require_valid(const ConnectionGraph& g) {
    auto report = validate_graph(g);
    if (report.empty()) return;
    std::string msg = "invalid connection graph:";
    for (const auto& v : report) msg += "\n  [" + to_string(v.kind) + "] " + v.message;
    throw ValidationError(msg);
}

void reproject_connections(ConnectionGraph& g, double orth_tol) {
    for (auto& e : g.edges) {
        if (e.sigma.rows() != g.d || e.sigma.cols() != g.d || !e.sigma.allFinite()) continue;
        if (orthogonality_defect(e.sigma) <= orth_tol) e.sigma = polar_factor(e.sigma);
    }
}

std::vector<std::vector<std::pair<int, int>>> adjacency(const ConnectionGraph& g) {
    std::vector<std::vector<std::pair<int, int>>> adj(g.n);
    for (int e = 0; e < g.num_edges(); ++e) {
        adj[g.edges[e].i].emplace_back(g.edges[e].j, e);
        adj[g.edges[e].j].emplace_back(g.edges[e].i, e);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

// -- Operators ---------------------------------------------------------------

SparseMatrix incidence(const ConnectionGraph& g) {
    require_valid(g);
    const int d = g.d;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(std::size_t(g.num_edges()) * (d + d * d));
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& edge = g.edges[e];
        for (int a = 0; a < d; ++a) {
            trips.emplace_back(edge.i * d + a, e * d + a, 1.0);
            // block (j, e) = -sigma^T, so entry (a, b) = -sigma(b, a)
            for (int b = 0; b < d; ++b)
                if (edge.sigma(b, a) != 0.0) trips.emplace_back(edge.j * d + a, e * d + b, -edge.sigma(b, a));
        }
    }
    SparseMatrix B(Eigen::Index(g.n) * d, Eigen::Index(g.num_edges()) * d);
    B.setFromTriplets(trips.begin(), trips.end());
    return B;
}

SparseMatrix weight_operator(const ConnectionGraph& g) {
    require_valid(g);
    const int d = g.d;
    SparseMatrix W(Eigen::Index(g.num_edges()) * d, Eigen::Index(g.num_edges()) * d);
    std::vector<Eigen::Triplet<double>> trips;
    for (int e = 0; e < g.num_edges(); ++e)
        for (int a = 0; a < d; ++a) trips.emplace_back(e * d + a, e * d + a, g.edges[e].w);
    W.setFromTriplets(trips.begin(), trips.end());
    return W;
}

SparseMatrix connection_laplacian(const ConnectionGraph& g) {
    require_valid(g);
    const int d = g.d;
    std::vector<double> degree(g.n, 0.0);
    std::vector<Eigen::Triplet<double>> trips;
    for (const Edge& edge : g.edges) {
        degree[edge.i] += edge.w;
        degree[edge.j] += edge.w;
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double s = edge.sigma(a, b);
                if (s == 0.0) continue;
                trips.emplace_back(edge.i * d + a, edge.j * d + b, -edge.w * s);
                trips.emplace_back(edge.j * d + b, edge.i * d + a, -edge.w * s);
            }
    }
    for (int i = 0; i < g.n; ++i)
        for (int a = 0; a < d; ++a) trips.emplace_back(i * d + a, i * d + a, degree[i]);
    SparseMatrix L(Eigen::Index(g.n) * d, Eigen::Index(g.n) * d);
    L.setFromTriplets(trips.begin(), trips.end());
    return L;
}

SparseMatrix connection_laplacian_product(const ConnectionGraph& g) {
    SparseMatrix B = incidence(g);
    SparseMatrix W = weight_operator(g);
    SparseMatrix L = B * W * SparseMatrix(B.transpose());
    L.prune(0.0);
    return L;
}

Matrix graph_laplacian(const ConnectionGraph& g) {
    require_valid(g);
    Matrix D = Matrix::Zero(g.n, g.n);
    for (const Edge& e : g.edges) {
        D(e.i, e.i) += e.w;
        D(e.j, e.j) += e.w;
        D(e.i, e.j) -= e.w;
        D(e.j, e.i) -= e.w;
    }
    return D;
}

EdgeFlow apply_BT(const ConnectionGraph& g, const VectorField& phi) {
    if (phi.n != g.n || phi.d != g.d) throw DimensionError("apply_BT: field does not match graph");
    EdgeFlow out(g.num_edges(), g.d);
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& edge = g.edges[e];
        out.at(e) = phi.at(edge.i) - edge.sigma * phi.at(edge.j);
    }
    return out;
}

VectorField apply_B(const ConnectionGraph& g, const EdgeFlow& flow) {
    if (flow.m != g.num_edges() || flow.d != g.d) throw DimensionError("apply_B: flow does not match graph");
    VectorField out(g.n, g.d);
    for (int e = 0; e < g.num_edges(); ++e) {
        const Edge& edge = g.edges[e];
        out.at(edge.i) += flow.at(e);
        out.at(edge.j) -= edge.sigma.transpose() * flow.at(e);
    }
    return out;
}

// -- Path algebra --------------------------------------------------------------

Path Path::reversed() const {
    Path p{vertices};
    std::reverse(p.vertices.begin(), p.vertices.end());
    return p;
}

Path Path::then(const Path& other) const {
    if (vertices.empty()) return other;
    if (other.vertices.empty()) return *this;
    if (vertices.back() != other.vertices.front())
        throw ValidationError("paths cannot be concatenated: endpoint mismatch");
    Path p{vertices};
    p.vertices.insert(p.vertices.end(), other.vertices.begin() + 1, other.vertices.end());
    return p;
}

Matrix oriented_sigma(const ConnectionGraph& g, int i, int j) {
    const int a = std::min(i, j), b = std::max(i, j);
    for (const Edge& e : g.edges)
        if (e.i == a && e.j == b) return i < j ? e.sigma : Matrix(e.sigma.transpose());
    throw ValidationError("vertices " + std::to_string(i) + " and " + std::to_string(j) + " are not adjacent");
}

Matrix path_product(const ConnectionGraph& g, const Path& p) {
    require_valid(g);
    // Map vertex pairs to edges once; paths can be long.
    std::vector<std::vector<std::pair<int, int>>> adj = adjacency(g);
    Matrix prod = Matrix::Identity(g.d, g.d);
    for (std::size_t k = 0; k + 1 < p.vertices.size(); ++k) {
        const int u = p.vertices[k], v = p.vertices[k + 1];
        if (u < 0 || u >= g.n || v < 0 || v >= g.n)
            throw ValidationError("path vertex out of range");
        auto it = std::lower_bound(adj[u].begin(), adj[u].end(), std::make_pair(v, -1));
        if (it == adj[u].end() || it->first != v)
            throw ValidationError("path steps between non-adjacent vertices " + std::to_string(u) + " and " +
                                  std::to_string(v));
        const Edge& e = g.edges[it->second];
        prod = u < v ? Matrix(prod * e.sigma) : Matrix(prod * e.sigma.transpose());
    }
    return prod;
}

Path SpanningTree::path_from_root(int v) const {
    Path p;
    for (int cur = v; cur != -1; cur = parent[cur]) p.vertices.push_back(cur);
    std::reverse(p.vertices.begin(), p.vertices.end());
    return p;
}

SpanningTree bfs_tree(const ConnectionGraph& g, int root) {
    if (root < 0 || root >= g.n) throw ValidationError("root vertex out of range");
    auto adj = adjacency(g);
    SpanningTree t;
    t.root = root;
    t.parent.assign(g.n, -1);
    t.parent_edge.assign(g.n, -1);
    t.is_tree_edge.assign(g.num_edges(), false);
    std::vector<bool> seen(g.n, false);
    std::queue<int> q;
    q.push(root);
    seen[root] = true;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        t.order.push_back(v);
        for (auto [u, e] : adj[v]) {
            if (seen[u]) continue;
            seen[u] = true;
            t.parent[u] = v;
            t.parent_edge[u] = e;
            t.is_tree_edge[e] = true;
            q.push(u);
        }
    }
    return t;
}

std::vector<Path> fundamental_cycles(const ConnectionGraph& g, int root) {
    require_valid(g);
    SpanningTree t = bfs_tree(g, root);
    std::vector<Path> cycles;
    for (int e = 0; e < g.num_edges(); ++e) {
        if (t.is_tree_edge[e]) continue;
        const Edge& edge = g.edges[e];
        cycles.push_back(t.path_from_root(edge.i).then(Path{{edge.i, edge.j}}).then(t.path_from_root(edge.j).reversed()));
    }
    return cycles;
}

bool is_consistent(const ConnectionGraph& g, double tol) {
    for (const Path& c : fundamental_cycles(g, 0)) {
        Matrix prod = path_product(g, c);
        if ((prod - Matrix::Identity(g.d, g.d)).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

// -- Switching ---------------------------------------------------------------

SwitchingFunction SwitchingFunction::identity(int n, int d) {
    return SwitchingFunction{std::vector<Matrix>(n, Matrix::Identity(d, d))};
}

static void require_valid_tau(const SwitchingFunction& tau, int n, int d) {
    if (static_cast<int>(tau.tau.size()) != n)
        throw ValidationError("switching function has " + std::to_string(tau.tau.size()) + " entries, expected " +
                              std::to_string(n));
    for (int i = 0; i < n; ++i) {
        if (tau.tau[i].rows() != d || tau.tau[i].cols() != d)
            throw ValidationError("tau(" + std::to_string(i) + ") is not d x d");
        if (orthogonality_defect(tau.tau[i]) > kOrthogonalityTol)
            throw ValidationError("tau(" + std::to_string(i) + ") is not orthogonal");
    }
}

ConnectionGraph switch_graph(const ConnectionGraph& g, const SwitchingFunction& tau) {
    require_valid(g);
    require_valid_tau(tau, g.n, g.d);
    ConnectionGraph out = g;
    for (auto& e : out.edges) e.sigma = tau.tau[e.i].transpose() * e.sigma * tau.tau[e.j];
    return out;
}

VectorField switch_field(const SwitchingFunction& tau, const VectorField& f) {
    require_valid_tau(tau, f.n, f.d);
    VectorField out(f.n, f.d);
    for (int i = 0; i < f.n; ++i) out.at(i) = tau.tau[i].transpose() * f.at(i);
    return out;
}

}  // namespace cgot
