#pragma once

#include "cgot/graph.hpp"
#include "cgot/spectral.hpp"

#include <cstdint>
#include <optional>

namespace cgot {

/// Options for dual gradient ascent on the regularized Beckmann problem.
struct SolveOptions {
    double lambda = 1.0;
    double learning_rate = 5e-3;
    int max_epochs = 10000;
    /// Stop once ||grad|| <= grad_tol. Negative selects 1e-8 * (1 + ||alpha - beta||).
    double grad_tol = -1.0;
    /// Cap the step at 1 / Lipschitz bound of the dual gradient so ascent stays monotone.
    bool clamp_step = true;
    /// Tolerance on kernel components for the up-front feasibility check.
    double feasibility_tol = kKernelTol;
    std::uint64_t seed = 0;  ///< unused by the deterministic ascent; carried into reports
};

struct SolveReport {
    double primal_cost = 0.0;  ///< sum w||J|| + (lambda/2) sum ||J||^2
    double dual_value = 0.0;
    double gap = 0.0;          ///< primal_cost - dual_value
    double residual = 0.0;     ///< ||B J - (alpha - beta)||_2
    double transport_cost = 0.0;  ///< sum w||J||, the unregularized objective at J
    double step = 0.0;         ///< step size actually used
    int epochs_used = 0;
    bool converged = false;
};

struct SolveResult {
    EdgeFlow flow;
    VectorField potential;
    SolveReport report;
};

/// <phi, c> - (1/2 lambda) sum_e chi_e (||(B^T phi)(e)|| - w_e)^2, chi_e = [||(B^T phi)(e)|| > w_e].
double dual_objective(const ConnectionGraph& g, const VectorField& phi, const VectorField& c, double lambda);

/// c - B K(phi) where K is recover_primal(phi). At the dual optimum B J = c.
VectorField dual_gradient(const ConnectionGraph& g, const VectorField& phi, const VectorField& c, double lambda);

/// J(e) = chi_e ((||g_e|| - w_e)/lambda) g_e/||g_e|| with g = B^T phi; zero on inactive edges.
EdgeFlow recover_primal(const ConnectionGraph& g, const VectorField& phi, double lambda);

/// sum w||J|| + (lambda/2) sum ||J||^2; lambda = 0 gives the plain Beckmann cost.
double primal_cost(const ConnectionGraph& g, const EdgeFlow& flow, double lambda);

/// max_e ||(B^T phi)(e)|| / w_e <= 1 (+ slack).
bool dual_feasible_unregularized(const ConnectionGraph& g, const VectorField& phi, double slack = 0.0);
double unregularized_dual_value(const VectorField& phi, const VectorField& c);

/// Gershgorin bound on ||B B^T||_2: 2 * max vertex degree.
double incidence_norm_bound(const ConnectionGraph& g);

/// Fixed-step dual gradient ascent from phi = 0 with closed-form primal recovery.
///
/// Throws InfeasibleError naming the violated kernel component when alpha - beta is not
/// orthogonal to ker(L). Non-convergence is reported through report.converged.
SolveResult solve_regularized(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                              const SolveOptions& opts = {});

/// Same, with a precomputed kernel used for the feasibility check.
SolveResult solve_regularized(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                              const SolveOptions& opts, const KernelBasis& kernel);

struct OracleOptions {
    int max_iters = 200000;
    double tol = 1e-12;
    double rho = 1.0;
};

/// Independent primal solver for small instances: Douglas-Rachford splitting between the
/// per-edge prox of w||J|| + (lambda/2)||J||^2 and the least-squares projection onto
/// {B J = alpha - beta}. Handles lambda = 0.
EdgeFlow oracle_solve(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta, double lambda,
                      const OracleOptions& opts = {});

struct WassersteinResult {
    double distance = 0.0;           ///< sum w||J|| at the regularized flow; +inf when infeasible
    double regularized_cost = 0.0;
    bool feasible = true;
    std::optional<SolveResult> solve;
};

/// Transport distance between two fields; infeasible pairs return distance = +inf.
WassersteinResult wasserstein(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                              const SolveOptions& opts = {});
WassersteinResult wasserstein(const ConnectionGraph& g, const VectorField& alpha, const VectorField& beta,
                              const SolveOptions& opts, const KernelBasis& kernel);

}  // namespace cgot
