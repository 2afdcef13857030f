#pragma once

#include "cgot/common.hpp"

namespace cgot {

/// An R^d value per vertex, stacked vertex-major: entry (i, l) lives at i*d + l.
/// This matches the block row order of the incidence and Laplacian operators.
struct VectorField {
    int n = 0;
    int d = 0;
    Vector values;

    VectorField() = default;
    VectorField(int n_, int d_) : n(n_), d(d_), values(Vector::Zero(Eigen::Index(n_) * d_)) {}
    VectorField(int n_, int d_, Vector v);

    auto at(int i) { return values.segment(Eigen::Index(i) * d, d); }
    auto at(int i) const { return values.segment(Eigen::Index(i) * d, d); }
    double& operator()(int i, int l) { return values[Eigen::Index(i) * d + l]; }
    double operator()(int i, int l) const { return values[Eigen::Index(i) * d + l]; }

    /// Sum over vertices of each channel.
    Vector channel_sums() const;
    bool is_density(double tol = 1e-9) const;
};

/// An R^d value per index-oriented edge, ordered by canonical edge index.
struct EdgeFlow {
    int m = 0;
    int d = 0;
    Vector values;

    EdgeFlow() = default;
    EdgeFlow(int m_, int d_) : m(m_), d(d_), values(Vector::Zero(Eigen::Index(m_) * d_)) {}
    EdgeFlow(int m_, int d_, Vector v);

    auto at(int e) { return values.segment(Eigen::Index(e) * d, d); }
    auto at(int e) const { return values.segment(Eigen::Index(e) * d, d); }

    /// Per-edge Euclidean norms.
    Vector norms() const;
};

VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator+(const VectorField& a, const VectorField& b);

}  // namespace cgot
