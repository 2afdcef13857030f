#include "cgot/transport.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cgot {

namespace {

void check_shapes(const ConnectionGraph& g, const VectorField& a, const char* what) {
    if (a.n != g.n || a.d != g.d) throw DimensionError(std::string(what) + " does not match graph dimensions");
}

// Flat copy of the graph for the inner loop of the ascent.
struct DualKernel {
    int n, d, m;
    std::vector<int> tail, head;
    std::vector<double> w;
    std::vector<double> sigma;  // m blocks of d*d, row-major
    double lambda;

    DualKernel(const ConnectionGraph& g, double lam)
        : n(g.n), d(g.d), m(g.num_edges()), tail(m), head(m), w(m), sigma(std::size_t(m) * d * d), lambda(lam) {
        for (int e = 0; e < m; ++e) {
            tail[e] = g.edges[e].i;
            head[e] = g.edges[e].j;
            w[e] = g.edges[e].w;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) sigma[std::size_t(e) * d * d + a * d + b] = g.edges[e].sigma(a, b);
        }
    }

    // One sweep over the edges: writes the recovered flow and the gradient c - BJ;
    // returns the penalty sum_e chi_e (||g_e|| - w_e)^2 / (2 lambda).
    double sweep(const double* phi, const double* c, double* flow, double* grad) const {
        std::copy(c, c + std::size_t(n) * d, grad);
        double penalty = 0.0;
        double ge[16];
        std::vector<double> big;
        double* gbuf = ge;
        if (d > 16) {
            big.resize(d);
            gbuf = big.data();
        }
        for (int e = 0; e < m; ++e) {
            const double* pi = phi + std::size_t(tail[e]) * d;
            const double* pj = phi + std::size_t(head[e]) * d;
            const double* s = sigma.data() + std::size_t(e) * d * d;
            double nrm2 = 0.0;
            for (int a = 0; a < d; ++a) {
                double v = pi[a];
                for (int b = 0; b < d; ++b) v -= s[a * d + b] * pj[b];
                gbuf[a] = v;
                nrm2 += v * v;
            }
            double* je = flow + std::size_t(e) * d;
            const double nrm = std::sqrt(nrm2);
            if (nrm > w[e]) {
                const double excess = nrm - w[e];
                penalty += excess * excess;
                const double scale = excess / (lambda * nrm);
                double* gi = grad + std::size_t(tail[e]) * d;
                double* gj = grad + std::size_t(head[e]) * d;
                for (int a = 0; a < d; ++a) je[a] = scale * gbuf[a];
                for (int a = 0; a < d; ++a) {
                    gi[a] -= je[a];
                    // + sigma^T J
                    double v = 0.0;
                    for (int b = 0; b < d; ++b) v += s[b * d + a] * je[b];
                    gj[a] += v;
                }
            } else {
                std::fill(je, je + d, 0.0);
            }
        }
        return penalty / (2.0 * lambda);
    }
};

}  // namespace

double dual_objective(const ConnectionGraph& g, const VectorField& phi, const VectorField& c, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    check_shapes(g, phi, "phi");
    check_shapes(g, c, "c");
    EdgeFlow slack = apply_BT(g, phi);
    double penalty = 0.0;
    for (int e = 0; e < g.num_edges(); ++e) {
        const double nrm = slack.at(e).norm();
        if (nrm > g.edges[e].w) penalty += (nrm - g.edges[e].w) * (nrm - g.edges[e].w);
    }
    return phi.values.dot(c.values) - penalty / (2.0 * lambda);
}

EdgeFlow recover_primal(const ConnectionGraph& g, const VectorField& phi, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("lambda must be positive");
    check_shapes(g, phi, "phi");
    EdgeFlow flow = apply_BT(g, phi);
    for (int e = 0; e < g.num_edges(); ++e) {
        auto je = flow.at(e);
        const double nrm = je.norm();
        if (nrm > g.edges[e].w)
            je *= (nrm - g.edges[e].w) / (lambda * nrm);
        else
            je.setZero();
    }
    return flow;
}

VectorField dual_gradient(const ConnectionGraph& g, const VectorField& phi, const VectorField& c, double lambda) {
    check_shapes(g, c, "c");
    return c - apply_B(g, recover_primal(g, phi, lambda));
}

double primal_cost(const ConnectionGraph& g, const EdgeFlow& flow, double lambda) {
    if (flow.m != g.num_edges() || flow.d != g.d) throw DimensionError("flow does not match graph");
    double cost = 0.0;
    for (int e = 0; e < g.num_edges(); ++e) {
        const double nrm = flow.at(e).norm();
        cost += g.edges[e].w * nrm + 0.5 * lambda * nrm * nrm;
    }
    return cost;
}

bool dual_feasible_unregularized(const ConnectionGraph& g, const VectorField& phi, double slack) {
    EdgeFlow bt = apply_BT(g, phi);
    double worst = 0.0;
    for (int e = 0; e < g.num_edges(); ++e) worst = std::max(worst, bt.at(e).norm() / g.edges[e].w);
    return worst <= 1.0 + slack;
}

double unregularized_dual_value(const VectorField& phi, const VectorField& c) {
    if (phi.values.size() != c.values.size()) throw DimensionError("phi and c differ in shape");
    return phi.values.dot(c.values);
}

double incidence_norm_bound(const ConnectionGraph& g) {
    std::vector<int> deg(g.n, 0);
    for (const Edge& e : g.edges) {
        ++deg[e.i];
        ++deg[e.j];
    }
    return 2.0 * *std::max_element(deg.begin(), deg.end());
}

SolveResult solve_regularized(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                              const SolveOptions& opts) {
    require_valid(g);
    check_shapes(g, alpha, "alpha");
    check_shapes(g, beta, "beta");
    return solve_regularized(g, alpha, beta, opts, kernel_numeric(g));
}

SolveResult solve_regularized(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                              const SolveOptions& opts, const KernelBasis& kernel) {
    require_valid(g);
    check_shapes(g, alpha, "alpha");
    check_shapes(g, beta, "beta");
    if (!(opts.lambda > 0.0)) throw ValidationError("lambda must be positive");
    if (!(opts.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
    if (opts.max_epochs < 0) throw ValidationError("max_epochs must be nonnegative");

    FeasibilityReport feas = check_feasibility(kernel, alpha, beta, opts.feasibility_tol);
    if (!feas.feasible) throw InfeasibleError(feas.describe());

    const VectorField c = alpha - beta;
    const double grad_tol = opts.grad_tol >= 0.0 ? opts.grad_tol : 1e-8 * (1.0 + c.values.norm());

    // The dual gradient is Lipschitz with constant ||B B^T|| / lambda.
    double step = opts.learning_rate;
    if (opts.clamp_step && g.num_edges() > 0) step = std::min(step, opts.lambda / incidence_norm_bound(g));

    DualKernel kernel_loop(g, opts.lambda);
    SolveResult res{EdgeFlow(g.num_edges(), g.d), VectorField(g.n, g.d), {}};
    Vector grad(c.values.size());
    double* phi = res.potential.values.data();
    double penalty = kernel_loop.sweep(phi, c.values.data(), res.flow.values.data(), grad.data());

    int epoch = 0;
    bool converged = grad.norm() <= grad_tol;
    while (!converged && epoch < opts.max_epochs) {
        res.potential.values += step * grad;
        penalty = kernel_loop.sweep(phi, c.values.data(), res.flow.values.data(), grad.data());
        ++epoch;
        converged = grad.norm() <= grad_tol;
    }

    SolveReport& rep = res.report;
    rep.dual_value = res.potential.values.dot(c.values) - penalty;
    rep.primal_cost = primal_cost(g, res.flow, opts.lambda);
    rep.transport_cost = primal_cost(g, res.flow, 0.0);
    rep.gap = rep.primal_cost - rep.dual_value;
    rep.residual = grad.norm();
    rep.step = step;
    rep.epochs_used = epoch;
    rep.converged = converged;
    return res;
}

EdgeFlow oracle_solve(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta, double lambda,
                      const OracleOptions& opts) {
    require_valid(g);
    check_shapes(g, alpha, "alpha");
    check_shapes(g, beta, "beta");
    if (lambda < 0.0) throw ValidationError("lambda must be nonnegative");
    FeasibilityReport feas = check_feasibility(g, alpha, beta);
    if (!feas.feasible) throw InfeasibleError(feas.describe());

    const int m = g.num_edges(), d = g.d;
    const Vector c = (alpha - beta).values;
    const Matrix B = Matrix(incidence(g));
    const Matrix pinv = Eigen::CompleteOrthogonalDecomposition<Matrix>(B).pseudoInverse();
    auto project = [&](const Vector& y) -> Vector { return y - pinv * (B * y - c); };

    const double rho = opts.rho;
    Vector z = project(Vector::Zero(Eigen::Index(m) * d));
    Vector u = Vector::Zero(z.size());
    Vector x(z.size());
    for (int it = 0; it < opts.max_iters; ++it) {
        // prox of (w||.|| + lambda/2 ||.||^2) / rho, edge by edge
        const Vector v = z - u;
        for (int e = 0; e < m; ++e) {
            auto ve = v.segment(Eigen::Index(e) * d, d);
            const double nrm = ve.norm();
            const double shrink = std::max(0.0, rho * nrm - g.edges[e].w) / (lambda + rho);
            x.segment(Eigen::Index(e) * d, d) = nrm > 0.0 ? Vector(ve * (shrink / nrm)) : Vector::Zero(d);
        }
        const Vector z_prev = z;
        z = project(x + u);
        u += x - z;
        const double primal_res = (x - z).norm();
        const double dual_res = rho * (z - z_prev).norm();
        if (primal_res <= opts.tol && dual_res <= opts.tol) break;
    }
    return EdgeFlow(m, d, z);
}

WassersteinResult wasserstein(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                              const SolveOptions& opts) {
    require_valid(g);
    return wasserstein(g, alpha, beta, opts, kernel_numeric(g));
}

WassersteinResult wasserstein(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                              const SolveOptions& opts, const KernelBasis& kernel) {
    check_shapes(g, alpha, "alpha");
    check_shapes(g, beta, "beta");
    WassersteinResult out;
    if (!check_feasibility(kernel, alpha, beta, opts.feasibility_tol).feasible) {
        out.feasible = false;
        out.distance = std::numeric_limits<double>::infinity();
        out.regularized_cost = std::numeric_limits<double>::infinity();
        return out;
    }
    out.solve = solve_regularized(g, alpha, beta, opts, kernel);
    out.distance = out.solve->report.transport_cost;
    out.regularized_cost = out.solve->report.primal_cost;
    return out;
}

}  // namespace cgot
