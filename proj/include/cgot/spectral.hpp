#pragma once

#include "cgot/graph.hpp"

#include <vector>

namespace cgot {

/// Orthonormal basis of ker(L) = ker(B^T), one VectorField per basis vector.
struct KernelBasis {
    std::vector<VectorField> vectors;
    double tol = 0.0;

    int dimension() const { return static_cast<int>(vectors.size()); }
    /// nd x k matrix with the basis vectors as columns.
    Matrix as_matrix(int n, int d) const;
};

constexpr double kKernelTol = 1e-8;

/// Sorted eigenvalues of the connection Laplacian.
Vector laplacian_spectrum(const ConnectionGraph& g);

/// Eigenvectors of L whose eigenvalue is <= tol * max(lambda_max, 1), ties included.
KernelBasis kernel_numeric(const ConnectionGraph& g, double tol = kKernelTol);

/// Number of eigenvalues counted as zero by the relative threshold.
int kernel_dimension(const ConnectionGraph& g, double tol = kKernelTol);

/// Kernel from the common fixed space W of the fundamental-cycle products, expanded to
/// fields via f(i) = sigma_{P(i -> root)} x along spanning-tree paths.
///
/// Every expanded field is checked against ||B^T f|| <= tol ||f||; when cross_check is
/// set the span is also compared with kernel_numeric. Failures throw NumericError.
KernelBasis kernel_structured(const ConnectionGraph& g, int root = 0, double tol = kKernelTol,
                              bool cross_check = true);

/// sin of the largest principal angle between two subspaces given by orthonormal columns.
/// Returns 1 when the dimensions differ.
double subspace_distance(const Matrix& a, const Matrix& b);

struct FeasibilityReport {
    bool feasible = true;
    std::vector<double> components;  ///< <alpha - beta, f_k> for each kernel vector
    std::vector<int> violated;       ///< indices k with |component| > tol
    int kernel_dimension = 0;

    std::string describe() const;
};

/// (alpha, beta) admits a flow iff alpha - beta is orthogonal to ker(L).
FeasibilityReport check_feasibility(const KernelBasis& kernel, const VectorField& alpha, const VectorField& beta,
                                    double tol = kKernelTol);
FeasibilityReport check_feasibility(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                                    double tol = kKernelTol);
bool is_feasible(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                 double tol = kKernelTol);

/// Selection rule for the near-kernel eigenvectors removed by project_feasible.
struct NearKernelRule {
    /// When positive, take exactly this many lowest eigenvectors.
    int count = 0;
    /// Otherwise take every eigenvalue <= rel_threshold * lambda_max.
    double rel_threshold = 1e-3;
};

/// Orthonormal lowest eigenvectors of L selected by the rule.
KernelBasis near_kernel(const ConnectionGraph& g, const NearKernelRule& rule = {});

/// Removes the components of field along the basis vectors.
VectorField project_out(const KernelBasis& basis, const VectorField& field);

/// project_out(near_kernel(g, rule), field). Two fields projected this way are feasible
/// against each other whenever the rule captures the whole kernel.
VectorField project_feasible(const ConnectionGraph& g, const VectorField& field, const NearKernelRule& rule = {});

/// tau(root) = I, tau(i) = sigma_{P(i -> root)} along the BFS tree. On the switched graph
/// every kernel vector is constant, so any two vector densities are feasible.
SwitchingFunction feasibility_switching(const ConnectionGraph& g, int root = 0);

}  // namespace cgot
