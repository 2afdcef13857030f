#include "cgot/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cgot {

Matrix KernelBasis::as_matrix(int n, int d) const {
    Matrix m(Eigen::Index(n) * d, dimension());
    for (int k = 0; k < dimension(); ++k) m.col(k) = vectors[k].values;
    return m;
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> dense_eigensolve(const ConnectionGraph& g) {
    Matrix L = Matrix(connection_laplacian(g));
    Eigen::SelfAdjointEigenSolver<Matrix> es(L);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on connection Laplacian");
    return es;
}

double zero_threshold(const Vector& evals, double tol) {
    return tol * std::max(evals.size() ? evals[evals.size() - 1] : 0.0, 1.0);
}

KernelBasis basis_from_columns(const Matrix& cols, int n, int d, double tol) {
    KernelBasis kb;
    kb.tol = tol;
    for (Eigen::Index k = 0; k < cols.cols(); ++k) kb.vectors.emplace_back(n, d, Vector(cols.col(k)));
    return kb;
}

// sigma for the step v -> parent(v).
Matrix toward_parent(const ConnectionGraph& g, const SpanningTree& tree, int v) {
    const Edge& e = g.edges[tree.parent_edge[v]];
    return e.i == v ? e.sigma : Matrix(e.sigma.transpose());
}

}  // namespace

Vector laplacian_spectrum(const ConnectionGraph& g) { return dense_eigensolve(g).eigenvalues(); }

KernelBasis kernel_numeric(const ConnectionGraph& g, double tol) {
    auto es = dense_eigensolve(g);
    const Vector& evals = es.eigenvalues();
    const double thr = zero_threshold(evals, tol);
    int k = 0;
    while (k < evals.size() && evals[k] <= thr) ++k;
    return basis_from_columns(es.eigenvectors().leftCols(k), g.n, g.d, tol);
}

int kernel_dimension(const ConnectionGraph& g, double tol) { return kernel_numeric(g, tol).dimension(); }

double subspace_distance(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols() || a.rows() != b.rows()) return 1.0;
    if (a.cols() == 0) return 0.0;
    Matrix resid = b - a * (a.transpose() * b);
    Eigen::JacobiSVD<Matrix> svd(resid);
    return std::min(1.0, svd.singularValues()(0));
}

KernelBasis kernel_structured(const ConnectionGraph& g, int root, double tol, bool cross_check) {
    require_valid(g);
    const int d = g.d;
    SpanningTree tree = bfs_tree(g, root);

    // tau(i) = sigma along the tree path i -> root, built outward from the root.
    std::vector<Matrix> tau(g.n, Matrix::Identity(d, d));
    for (int v : tree.order) {
        if (v == root) continue;
        tau[v] = toward_parent(g, tree, v) * tau[tree.parent[v]];
    }

    // Rooted cycle product for chord (i, j) is tau(i)^T sigma_ij tau(j).
    std::vector<Matrix> constraints;
    for (int e = 0; e < g.num_edges(); ++e) {
        if (tree.is_tree_edge[e]) continue;
        const Edge& edge = g.edges[e];
        constraints.push_back(tau[edge.i].transpose() * edge.sigma * tau[edge.j] - Matrix::Identity(d, d));
    }

    Matrix fixed;
    if (constraints.empty()) {
        fixed = Matrix::Identity(d, d);
    } else {
        Matrix stacked(Eigen::Index(constraints.size()) * d, d);
        for (std::size_t k = 0; k < constraints.size(); ++k) stacked.middleRows(Eigen::Index(k) * d, d) = constraints[k];
        Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
        const Vector& sv = svd.singularValues();
        int rank = 0;
        for (Eigen::Index k = 0; k < sv.size(); ++k)
            if (sv[k] > tol) ++rank;
        fixed = svd.matrixV().rightCols(d - rank);
    }

    KernelBasis kb;
    kb.tol = tol;
    const double scale = 1.0 / std::sqrt(double(g.n));
    for (Eigen::Index k = 0; k < fixed.cols(); ++k) {
        VectorField f(g.n, d);
        for (int i = 0; i < g.n; ++i) f.at(i) = scale * (tau[i] * fixed.col(k));
        const double slack = apply_BT(g, f).values.norm();
        if (slack > tol * f.values.norm()) {
            std::ostringstream os;
            os << "structured kernel vector " << k << " has ||B^T f|| = " << slack << " > tol";
            throw NumericError(os.str());
        }
        kb.vectors.push_back(std::move(f));
    }

    if (cross_check) {
        KernelBasis numeric = kernel_numeric(g, tol);
        if (numeric.dimension() != kb.dimension())
            throw NumericError("structured kernel dimension " + std::to_string(kb.dimension()) +
                               " disagrees with numeric kernel dimension " + std::to_string(numeric.dimension()));
        const double dist = subspace_distance(numeric.as_matrix(g.n, d), kb.as_matrix(g.n, d));
        if (dist > 1e-6) throw NumericError("structured and numeric kernels span different subspaces");
    }
    return kb;
}

std::string FeasibilityReport::describe() const {
    std::ostringstream os;
    if (feasible) {
        os << "feasible (kernel dimension " << kernel_dimension << ")";
        return os.str();
    }
    os << "infeasible: alpha - beta has nonzero component along kernel vector";
    os << (violated.size() > 1 ? "s" : "");
    for (int k : violated) os << " f" << k << " (<alpha-beta, f" << k << "> = " << components[k] << ")";
    return os.str();
}

FeasibilityReport check_feasibility(const KernelBasis& kernel, const VectorField& alpha, const VectorField& beta,
                                    double tol) {
    VectorField c = alpha - beta;
    FeasibilityReport rep;
    rep.kernel_dimension = kernel.dimension();
    for (int k = 0; k < kernel.dimension(); ++k) {
        if (kernel.vectors[k].values.size() != c.values.size())
            throw DimensionError("kernel vector does not match field shape");
        double comp = kernel.vectors[k].values.dot(c.values);
        rep.components.push_back(comp);
        if (std::abs(comp) > tol) {
            rep.feasible = false;
            rep.violated.push_back(k);
        }
    }
    return rep;
}

FeasibilityReport check_feasibility(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                                    double tol) {
    if (alpha.n != g.n || alpha.d != g.d || beta.n != g.n || beta.d != g.d)
        throw DimensionError("fields do not match graph dimensions");
    return check_feasibility(kernel_numeric(g), alpha, beta, tol);
}

bool is_feasible(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta, double tol) {
    return check_feasibility(g, alpha, beta, tol).feasible;
}

KernelBasis near_kernel(const ConnectionGraph& g, const NearKernelRule& rule) {
    auto es = dense_eigensolve(g);
    const Vector& evals = es.eigenvalues();
    int k = 0;
    if (rule.count > 0) {
        k = std::min<int>(rule.count, int(evals.size()));
    } else {
        const double thr = rule.rel_threshold * (evals.size() ? evals[evals.size() - 1] : 0.0);
        while (k < evals.size() && evals[k] <= thr) ++k;
    }
    return basis_from_columns(es.eigenvectors().leftCols(k), g.n, g.d, rule.rel_threshold);
}

VectorField project_out(const KernelBasis& basis, const VectorField& field) {
    VectorField out = field;
    for (const auto& f : basis.vectors) {
        if (f.values.size() != field.values.size()) throw DimensionError("basis vector does not match field");
        out.values -= f.values.dot(out.values) * f.values;
    }
    return out;
}

VectorField project_feasible(const ConnectionGraph& g, const VectorField& field, const NearKernelRule& rule) {
    if (field.n != g.n || field.d != g.d) throw DimensionError("field does not match graph dimensions");
    return project_out(near_kernel(g, rule), field);
}

SwitchingFunction feasibility_switching(const ConnectionGraph& g, int root) {
    require_valid(g);
    SpanningTree tree = bfs_tree(g, root);
    SwitchingFunction tau = SwitchingFunction::identity(g.n, g.d);
    for (int v : tree.order) {
        if (v == root) continue;
        tau.tau[v] = toward_parent(g, tree, v) * tau.tau[tree.parent[v]];
    }
    return tau;
}

}  // namespace cgot
