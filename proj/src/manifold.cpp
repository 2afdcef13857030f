#include "cgot/manifold.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace cgot {

void validate_cloud(const PointCloud& cloud) {
    if (cloud.n() < 2) throw ValidationError("point cloud needs at least 2 points");
    if (cloud.p() < 1) throw ValidationError("point cloud has zero ambient dimension");
    if (!cloud.coords.allFinite()) throw ValidationError("point cloud has non-finite coordinates");
    std::vector<int> idx(cloud.n());
    std::iota(idx.begin(), idx.end(), 0);
    auto row_less = [&](int a, int b) {
        for (int k = 0; k < cloud.p(); ++k) {
            if (cloud.coords(a, k) != cloud.coords(b, k)) return cloud.coords(a, k) < cloud.coords(b, k);
        }
        return false;
    };
    std::sort(idx.begin(), idx.end(), row_less);
    for (std::size_t k = 0; k + 1 < idx.size(); ++k)
        if (!row_less(idx[k], idx[k + 1]))
            throw ValidationError("duplicate points " + std::to_string(std::min(idx[k], idx[k + 1])) + " and " +
                                  std::to_string(std::max(idx[k], idx[k + 1])));
}

std::vector<std::vector<int>> GraphSkeleton::neighbors() const {
    std::vector<std::vector<int>> nb(n);
    for (auto [i, j] : pairs) {
        nb[i].push_back(j);
        nb[j].push_back(i);
    }
    for (auto& list : nb) std::sort(list.begin(), list.end());
    return nb;
}

GraphSkeleton epsilon_graph(const PointCloud& cloud, double epsilon, WeightRule rule) {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    validate_cloud(cloud);
    const int n = cloud.n();

    // Sweep along the first coordinate; pairs further apart than epsilon there are skipped.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return cloud.coords(a, 0) < cloud.coords(b, 0); });

    std::vector<std::tuple<int, int, double>> found;
    for (int a = 0; a < n; ++a) {
        const int i = order[a];
        for (int b = a + 1; b < n; ++b) {
            const int j = order[b];
            if (cloud.coords(j, 0) - cloud.coords(i, 0) >= epsilon) break;
            const double dist = (cloud.coords.row(i) - cloud.coords.row(j)).norm();
            if (dist > 0.0 && dist < epsilon) found.emplace_back(std::min(i, j), std::max(i, j), dist);
        }
    }
    std::sort(found.begin(), found.end());

    GraphSkeleton sk;
    sk.n = n;
    std::vector<int> degree(n, 0);
    for (auto [i, j, dist] : found) {
        sk.pairs.emplace_back(i, j);
        sk.weights.push_back(rule == WeightRule::Unit ? 1.0 : 1.0 / dist);
        ++degree[i];
        ++degree[j];
    }
    for (int i = 0; i < n; ++i)
        if (degree[i] == 0) sk.isolated.push_back(i);
    sk.connected = is_connected(n, sk.pairs);
    return sk;
}

double epanechnikov(double u) {
    if (u < 0.0 || u > 1.0) return 0.0;
    return 1.0 - u * u;
}

TangentFrameSet tangent_frames(const PointCloud& cloud, const GraphSkeleton& skeleton, int d, double epsilon,
                               const LocalPcaOptions& opts) {
    if (skeleton.n != cloud.n()) throw DimensionError("skeleton and cloud differ in vertex count");
    if (d < 1 || d > cloud.p()) throw ValidationError("frame dimension must lie in [1, p]");
    const double divisor = opts.kernel_divisor > 0.0 ? opts.kernel_divisor : std::sqrt(epsilon);
    const auto nb = skeleton.neighbors();

    TangentFrameSet out;
    out.p = cloud.p();
    out.d = d;
    out.frames.reserve(cloud.n());
    for (int i = 0; i < cloud.n(); ++i) {
        const int count = static_cast<int>(nb[i].size());
        if (count < d)
            throw ValidationError("vertex " + std::to_string(i) + " has " + std::to_string(count) +
                                  " neighbors, fewer than d = " + std::to_string(d));
        Matrix weighted(cloud.p(), count);
        for (int k = 0; k < count; ++k) {
            Eigen::VectorXd offset = (cloud.coords.row(nb[i][k]) - cloud.coords.row(i)).transpose();
            weighted.col(k) = epanechnikov(offset.norm() / divisor) * offset;
        }
        Eigen::JacobiSVD<Matrix> svd(weighted, Eigen::ComputeFullU);
        out.frames.push_back(svd.matrixU().leftCols(d));
    }
    return out;
}

Matrix procrustes_align(const Matrix& oi, const Matrix& oj) {
    Eigen::JacobiSVD<Matrix> svd(oi.transpose() * oj, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

ProcrustesResult procrustes_connection(const TangentFrameSet& frames, const GraphSkeleton& skeleton,
                                       double degenerate_threshold) {
    if (frames.n() != skeleton.n) throw DimensionError("frames and skeleton differ in vertex count");
    ProcrustesResult res;
    res.graph.n = skeleton.n;
    res.graph.d = frames.d;
    res.graph.edges.reserve(skeleton.pairs.size());
    for (std::size_t e = 0; e < skeleton.pairs.size(); ++e) {
        auto [i, j] = skeleton.pairs[e];
        const Matrix m = frames.frames[i].transpose() * frames.frames[j];
        Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (svd.singularValues()(frames.d - 1) < degenerate_threshold)
            res.degenerate_edges.push_back(static_cast<int>(e));
        res.graph.edges.push_back({i, j, skeleton.weights[e], svd.matrixU() * svd.matrixV().transpose()});
    }
    return res;
}

PointCloud sample_torus(double R, double r, int n_theta, int n_psi) {
    if (n_theta < 1 || n_psi < 1) throw ValidationError("sample counts must be positive");
    if (!(R > r && r > 0.0)) throw ValidationError("torus radii must satisfy R > r > 0");
    PointCloud cloud{Matrix(Eigen::Index(n_theta) * n_psi, 3)};
    const double two_pi = 2.0 * std::numbers::pi;
    int row = 0;
    for (int a = 0; a < n_theta; ++a) {
        const double t = two_pi * a / n_theta;
        for (int b = 0; b < n_psi; ++b) {
            const double s = two_pi * b / n_psi;
            cloud.coords.row(row++) << (R + r * std::cos(t)) * std::cos(s), (R + r * std::cos(t)) * std::sin(s),
                r * std::sin(t);
        }
    }
    return cloud;
}

Eigen::Vector3d sphere_point(double theta, double psi) {
    const double polar = std::numbers::pi / 2.0 - theta;
    return {std::sin(polar) * std::cos(-psi), std::sin(polar) * std::sin(-psi), std::cos(polar)};
}

PointCloud sample_sphere_patch(double theta0, double theta1, double psi0, double psi1, int n_theta, int n_psi) {
    if (n_theta < 1 || n_psi < 1) throw ValidationError("sample counts must be positive");
    auto grid = [](double lo, double hi, int count, int k) { return count == 1 ? lo : lo + (hi - lo) * k / (count - 1); };
    PointCloud cloud{Matrix(Eigen::Index(n_theta) * n_psi, 3)};
    int row = 0;
    for (int a = 0; a < n_theta; ++a)
        for (int b = 0; b < n_psi; ++b)
            cloud.coords.row(row++) = sphere_point(grid(theta0, theta1, n_theta, a), grid(psi0, psi1, n_psi, b));
    return cloud;
}

VectorField project_to_tangent(const TangentFrameSet& frames, const Matrix& ambient) {
    if (ambient.rows() != frames.n() || ambient.cols() != frames.p)
        throw DimensionError("ambient vectors must be n x p");
    VectorField out(frames.n(), frames.d);
    for (int i = 0; i < frames.n(); ++i) out.at(i) = frames.frames[i].transpose() * ambient.row(i).transpose();
    return out;
}

Matrix lift_to_ambient(const TangentFrameSet& frames, const VectorField& field) {
    if (field.n != frames.n() || field.d != frames.d) throw DimensionError("field does not match frames");
    Matrix out(frames.n(), frames.p);
    for (int i = 0; i < frames.n(); ++i) out.row(i) = (frames.frames[i] * field.at(i)).transpose();
    return out;
}

}  // namespace cgot
