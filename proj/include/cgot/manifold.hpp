#pragma once

#include "cgot/graph.hpp"

#include <vector>

namespace cgot {

/// n points in R^p, one per row.
struct PointCloud {
    Matrix coords;  ///< n x p

    int n() const { return static_cast<int>(coords.rows()); }
    int p() const { return static_cast<int>(coords.cols()); }
    Eigen::VectorXd point(int i) const { return coords.row(i).transpose(); }
};

/// Throws ValidationError on n < 2, non-finite entries, or duplicate points.
void validate_cloud(const PointCloud& cloud);

enum class WeightRule { InverseDistance, Unit };

/// Neighborhood graph without a connection yet.
struct GraphSkeleton {
    int n = 0;
    std::vector<std::pair<int, int>> pairs;  ///< i < j, lexicographic
    std::vector<double> weights;
    std::vector<int> isolated;
    bool connected = false;

    /// neighbors[i] lists j with an edge {i, j}, ascending.
    std::vector<std::vector<int>> neighbors() const;
};

/// Edges for every pair with 0 < ||x_i - x_j|| < epsilon.
GraphSkeleton epsilon_graph(const PointCloud& cloud, double epsilon, WeightRule rule = WeightRule::InverseDistance);

/// Per-node p x d matrices with orthonormal columns approximating the tangent space.
struct TangentFrameSet {
    int p = 0;
    int d = 0;
    std::vector<Matrix> frames;

    int n() const { return static_cast<int>(frames.size()); }
};

/// Epanechnikov profile 1 - u^2 on [0, 1], zero outside.
double epanechnikov(double u);

struct LocalPcaOptions {
    /// Kernel argument is ||x_i - x_j|| / divisor. Non-positive selects sqrt(epsilon).
    double kernel_divisor = -1.0;
};

/// Weighted local PCA: per vertex, centered neighbor offsets scaled by the kernel,
/// top-d left singular vectors. Throws ValidationError for a vertex with < d neighbors.
TangentFrameSet tangent_frames(const PointCloud& cloud, const GraphSkeleton& skeleton, int d, double epsilon,
                               const LocalPcaOptions& opts = {});

/// Nearest orthogonal matrix to O_i^T O_j, i.e. U V^T from its SVD.
Matrix procrustes_align(const Matrix& oi, const Matrix& oj);

struct ProcrustesResult {
    ConnectionGraph graph;
    std::vector<int> degenerate_edges;  ///< edges with smallest singular value of O_i^T O_j below threshold
};

ProcrustesResult procrustes_connection(const TangentFrameSet& frames, const GraphSkeleton& skeleton,
                                       double degenerate_threshold = 1e-8);

/// Grid samples of ((R + r cos t) cos s, (R + r cos t) sin s, r sin t) over [0, 2pi)^2.
PointCloud sample_torus(double R, double r, int n_theta, int n_psi);

/// Unit-sphere point (sin(pi/2 - t) cos(-s), sin(pi/2 - t) sin(-s), cos(pi/2 - t)).
Eigen::Vector3d sphere_point(double theta, double psi);

/// Inclusive grid over [theta0, theta1] x [psi0, psi1] of sphere_point.
PointCloud sample_sphere_patch(double theta0, double theta1, double psi0, double psi1, int n_theta, int n_psi);

/// Per-vertex O_i^T y_i for an n x p matrix of ambient vectors.
VectorField project_to_tangent(const TangentFrameSet& frames, const Matrix& ambient);

/// Per-vertex O_i alpha(i), returned as n x p.
Matrix lift_to_ambient(const TangentFrameSet& frames, const VectorField& field);

}  // namespace cgot
