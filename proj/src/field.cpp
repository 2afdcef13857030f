#include "cgot/field.hpp"

#include <utility>

namespace cgot {

VectorField::VectorField(int n_, int d_, Vector v) : n(n_), d(d_), values(std::move(v)) {
    if (values.size() != Eigen::Index(n) * d)
        throw DimensionError("vector field of " + std::to_string(n) + "x" + std::to_string(d) +
                             " given " + std::to_string(values.size()) + " values");
}

Vector VectorField::channel_sums() const {
    Vector s = Vector::Zero(d);
    for (int i = 0; i < n; ++i) s += at(i);
    return s;
}

bool VectorField::is_density(double tol) const {
    if ((values.array() < 0.0).any()) return false;
    return (channel_sums().array() - 1.0).abs().maxCoeff() <= tol;
}

EdgeFlow::EdgeFlow(int m_, int d_, Vector v) : m(m_), d(d_), values(std::move(v)) {
    if (values.size() != Eigen::Index(m) * d)
        throw DimensionError("edge flow of " + std::to_string(m) + "x" + std::to_string(d) +
                             " given " + std::to_string(values.size()) + " values");
}

Vector EdgeFlow::norms() const {
    Vector out(m);
    for (int e = 0; e < m; ++e) out[e] = at(e).norm();
    return out;
}

static void check_same_shape(const VectorField& a, const VectorField& b) {
    if (a.n != b.n || a.d != b.d) throw DimensionError("vector fields differ in shape");
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    check_same_shape(a, b);
    return VectorField(a.n, a.d, a.values - b.values);
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    check_same_shape(a, b);
    return VectorField(a.n, a.d, a.values + b.values);
}

}  // namespace cgot
