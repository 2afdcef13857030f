#pragma once

#include "cgot/common.hpp"
#include "cgot/field.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace cgot {

using SparseMatrix = Eigen::SparseMatrix<double>;

constexpr double kOrthogonalityTol = 1e-8;

/// One index-oriented edge (i < j) carrying weight w and the orthogonal map sigma_ij.
/// sigma_ji is never stored; it is sigma_ij transposed.
struct Edge {
    int i = 0;
    int j = 0;
    double w = 1.0;
    Matrix sigma;
};

/// A weighted undirected graph with an orthogonal d x d matrix on every edge.
///
/// The struct is a plain value: it can hold invalid data so that validate_graph
/// can report on it. Operators call require_valid() before touching the data.
struct ConnectionGraph {
    int n = 0;
    int d = 1;
    std::vector<Edge> edges;

    int num_edges() const { return static_cast<int>(edges.size()); }
    double max_weight() const;

    /// Graph with the identity connection on every edge.
    static ConnectionGraph trivial(int n, int d, const std::vector<std::pair<int, int>>& pairs,
                                   double w = 1.0);
};

enum class ViolationKind {
    BadDimensions,
    VertexOutOfRange,
    Misordered,
    Duplicate,
    NonPositiveWeight,
    BadSigmaShape,
    NonOrthogonal,
    NonFinite,
    Disconnected,
};

std::string to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    int edge = -1;  ///< -1 when the violation is graph-wide
    std::string message;
};

using ValidationReport = std::vector<Violation>;

/// Lists every violation of the connection-graph conventions; empty means valid.
ValidationReport validate_graph(const ConnectionGraph& g, double orth_tol = kOrthogonalityTol);

/// Throws ValidationError carrying the report text when g is invalid.
void require_valid(const ConnectionGraph& g);

/// Replaces each sigma within tolerance of O(d) by its polar factor (nearest orthogonal
/// matrix). Matrices outside tolerance are left for validate_graph to flag.
void reproject_connections(ConnectionGraph& g, double orth_tol = kOrthogonalityTol);

/// Nearest orthogonal matrix in Frobenius norm.
Matrix polar_factor(const Matrix& a);

double orthogonality_defect(const Matrix& q);

/// Adjacency lists sorted by neighbor index. Each entry is (neighbor, edge index).
std::vector<std::vector<std::pair<int, int>>> adjacency(const ConnectionGraph& g);

bool is_connected(int n, const std::vector<std::pair<int, int>>& pairs);

// -- Operators ---------------------------------------------------------------

/// nd x md block incidence: +I_d at (i, e) and -sigma_e^T at (j, e) for e = (i, j).
SparseMatrix incidence(const ConnectionGraph& g);

/// md x md diagonal weight operator W (each edge weight repeated d times).
SparseMatrix weight_operator(const ConnectionGraph& g);

/// Connection Laplacian assembled blockwise: d_i I_d on the diagonal, -w_ij sigma_ij off it.
SparseMatrix connection_laplacian(const ConnectionGraph& g);

/// Connection Laplacian assembled as B W B^T.
SparseMatrix connection_laplacian_product(const ConnectionGraph& g);

/// Combinatorial weighted graph Laplacian (n x n).
Matrix graph_laplacian(const ConnectionGraph& g);

/// (B^T phi)(e) = phi(i) - sigma_ij phi(j) for e = (i, j).
EdgeFlow apply_BT(const ConnectionGraph& g, const VectorField& phi);

/// (B J)(i) = sum_{e=(i,.)} J(e) - sum_{e=(.,i)} sigma_e^T J(e).
VectorField apply_B(const ConnectionGraph& g, const EdgeFlow& flow);

// -- Path algebra --------------------------------------------------------------

/// An ordered vertex tuple with consecutive vertices adjacent. A cycle repeats its first vertex.
struct Path {
    std::vector<int> vertices;

    bool is_cycle() const { return vertices.size() > 1 && vertices.front() == vertices.back(); }
    Path reversed() const;
    /// Concatenation; requires back() of this == front() of other.
    Path then(const Path& other) const;
};

/// sigma matrix for traversing (i, j) in either direction.
Matrix oriented_sigma(const ConnectionGraph& g, int i, int j);

/// Ordered right-multiplied product sigma_{p0 p1} sigma_{p1 p2} ...
Matrix path_product(const ConnectionGraph& g, const Path& p);

/// Breadth-first spanning tree from root, neighbors visited by increasing index.
struct SpanningTree {
    int root = 0;
    std::vector<int> parent;       ///< -1 for root and unreachable vertices
    std::vector<int> parent_edge;  ///< edge index to parent, -1 for root
    std::vector<int> order;        ///< BFS visitation order
    std::vector<bool> is_tree_edge;

    /// Vertices from root to v along the tree.
    Path path_from_root(int v) const;
};

SpanningTree bfs_tree(const ConnectionGraph& g, int root);

/// One cycle per chord: tree path root->i, chord (i, j), tree path j->root.
std::vector<Path> fundamental_cycles(const ConnectionGraph& g, int root = 0);

/// True iff every fundamental cycle product is within tol of I_d (max norm).
bool is_consistent(const ConnectionGraph& g, double tol = 1e-8);

// -- Switching ---------------------------------------------------------------

/// Per-vertex orthogonal matrices tau(i).
struct SwitchingFunction {
    std::vector<Matrix> tau;

    static SwitchingFunction identity(int n, int d);
};

/// sigma^tau_ij = tau(i)^T sigma_ij tau(j). Throws ValidationError on non-orthogonal tau.
ConnectionGraph switch_graph(const ConnectionGraph& g, const SwitchingFunction& tau);

/// Blockwise tau(i)^T f(i): the image of a field under the switch.
VectorField switch_field(const SwitchingFunction& tau, const VectorField& f);

}  // namespace cgot
