// cgot: command-line front end for transport on connection graphs.
//
// Exit codes: 0 success, 1 usage, 2 validation, 3 infeasible, 4 non-convergence.

#include "cgot/hurdat.hpp"
#include "cgot/io.hpp"
#include "cgot/manifold.hpp"
#include "cgot/spectral.hpp"
#include "cgot/toolkit.hpp"
#include "cgot/transport.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>

namespace fs = std::filesystem;
using namespace cgot;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNonConvergence = 4;

void diag(const std::string& kind, const std::string& msg) { std::cerr << "cgot: " << kind << ": " << msg << "\n"; }

ConnectionGraph load_valid_graph(const std::string& path) {
    ConnectionGraph g = io::load_graph(path);
    require_valid(g);
    return g;
}

// -- check -------------------------------------------------------------------

struct CheckArgs {
    std::string graph;
    std::string kernel_out;
    double tol = 1e-8;
};

int run_check(const CheckArgs& a) {
    ConnectionGraph g = io::load_graph(a.graph);
    ValidationReport report = validate_graph(g);
    if (!report.empty()) {
        std::cout << "invalid\n";
        for (const auto& v : report) std::cout << "  [" << to_string(v.kind) << "] " << v.message << "\n";
        return kExitValidation;
    }
    std::cout << "valid: n=" << g.n << " d=" << g.d << " m=" << g.num_edges() << "\n";
    const bool consistent = is_consistent(g, a.tol);
    KernelBasis kernel = kernel_numeric(g, a.tol);
    std::cout << (consistent ? "consistent" : "inconsistent") << ", kernel dimension " << kernel.dimension() << "\n";
    std::cout << "fundamental cycles: " << fundamental_cycles(g, 0).size() << "\n";
    if (!a.kernel_out.empty()) {
        io::write_json_file(a.kernel_out, io::kernel_to_json(kernel));
        std::cout << "kernel basis: " << a.kernel_out << "\n";
    }
    return 0;
}

// -- feasible ----------------------------------------------------------------

struct FeasibleArgs {
    std::string graph, alpha, beta;
    double tol = 1e-8;
};

int run_feasible(const FeasibleArgs& a) {
    ConnectionGraph g = load_valid_graph(a.graph);
    VectorField alpha = io::load_field(a.alpha), beta = io::load_field(a.beta);
    if (alpha.n != g.n || alpha.d != g.d || beta.n != g.n || beta.d != g.d)
        throw DimensionError("fields do not match graph dimensions");
    KernelBasis kernel = kernel_numeric(g, a.tol);
    FeasibilityReport rep = check_feasibility(kernel, alpha, beta, a.tol);
    std::cout << rep.describe() << "\n";
    for (int k : rep.violated) {
        std::cout << "  f" << k << " =";
        for (Eigen::Index i = 0; i < kernel.vectors[k].values.size(); ++i)
            std::cout << " " << io::format_double(kernel.vectors[k].values[i]);
        std::cout << "\n";
    }
    return rep.feasible ? 0 : kExitInfeasible;
}

// -- switch ------------------------------------------------------------------

struct SwitchArgs {
    std::string graph, out;
    int root = 0;
};

int run_switch(const SwitchArgs& a) {
    ConnectionGraph g = load_valid_graph(a.graph);
    SwitchingFunction tau = feasibility_switching(g, a.root);
    ConnectionGraph switched = switch_graph(g, tau);
    io::write_json_file(a.out, {{"root", a.root}, {"tau", io::switching_to_json(tau)}, {"graph", io::graph_to_json(switched)}});
    std::cout << "switched graph written to " << a.out << "\n";
    return 0;
}

// -- solve -------------------------------------------------------------------

struct SolveArgs {
    std::string graph, alpha, beta, out, report, plot;
    std::optional<double> lambda;
    double lr = 5e-3;
    int epochs = 10000;
    double grad_tol = -1.0;
    std::optional<double> active_delta;
    bool allow_small_lambda = false;
    bool no_clamp = false;
};

double resolve_lambda(const ConnectionGraph& g, std::optional<double> lambda, bool allow_small) {
    const double wmax = g.max_weight();
    const double lam = lambda.value_or(wmax);
    if (!(lam > 0.0)) throw ValidationError("--lambda must be positive");
    if (lam < 1e-3 * wmax && !allow_small)
        throw ValidationError("--lambda below 1e-3 * w_max is unstable; pass --allow-small-lambda to override");
    return lam;
}

int run_solve(const SolveArgs& a) {
    ConnectionGraph g = load_valid_graph(a.graph);
    SolveOptions opts;
    opts.lambda = resolve_lambda(g, a.lambda, a.allow_small_lambda);
    opts.learning_rate = a.lr;
    opts.max_epochs = a.epochs;
    opts.grad_tol = a.grad_tol;
    opts.clamp_step = !a.no_clamp;
    SolveResult res = solve_regularized(g, io::load_field(a.alpha), io::load_field(a.beta), opts);

    io::save_flow(a.out, res.flow);
    if (!a.report.empty()) io::write_json_file(a.report, io::report_to_json(res.report));
    if (a.active_delta) {
        const std::string plot = a.plot.empty() ? fs::path(a.out).replace_extension(".active.csv").string() : a.plot;
        io::write_text_file(plot, io::active_edges_csv(g, res.flow, active_edges(res.flow, *a.active_delta)));
    }
    const SolveReport& r = res.report;
    std::cout << "primal_cost " << io::format_double(r.primal_cost) << "\n"
              << "transport_cost " << io::format_double(r.transport_cost) << "\n"
              << "dual_value " << io::format_double(r.dual_value) << "\n"
              << "gap " << io::format_double(r.gap) << "\n"
              << "residual " << io::format_double(r.residual) << "\n"
              << "epochs " << r.epochs_used << "\n"
              << "converged " << (r.converged ? "true" : "false") << "\n";
    if (!r.converged) {
        diag("non-convergence", "gradient norm " + io::format_double(r.residual) + " after " +
                                    std::to_string(r.epochs_used) + " epochs; partial outputs written");
        return kExitNonConvergence;
    }
    return 0;
}

// -- buildgraph --------------------------------------------------------------

struct BuildArgs {
    std::string points, out, frames_out;
    double eps = 0.0;
    int dim = 2;
    std::string weights = "inverse";
    double kernel_divisor = -1.0;
};

int run_buildgraph(const BuildArgs& a) {
    PointCloud cloud = io::load_point_csv(a.points);
    const WeightRule rule = a.weights == "unit" ? WeightRule::Unit : WeightRule::InverseDistance;
    GraphSkeleton sk = epsilon_graph(cloud, a.eps, rule);
    if (!sk.isolated.empty()) diag("validation", std::to_string(sk.isolated.size()) + " isolated vertices");
    if (!sk.connected) throw ValidationError("epsilon graph is disconnected; increase --eps");
    LocalPcaOptions pca;
    pca.kernel_divisor = a.kernel_divisor;
    TangentFrameSet frames = tangent_frames(cloud, sk, a.dim, a.eps, pca);
    ProcrustesResult pr = procrustes_connection(frames, sk);
    if (!pr.degenerate_edges.empty())
        diag("warning", std::to_string(pr.degenerate_edges.size()) + " edges have rank-deficient frame alignment");
    require_valid(pr.graph);
    io::save_graph(a.out, pr.graph);
    if (!a.frames_out.empty()) io::write_json_file(a.frames_out, io::frames_to_json(frames));
    std::cout << "n=" << pr.graph.n << " m=" << pr.graph.num_edges() << " d=" << pr.graph.d << "\n";
    return 0;
}

// -- interp ------------------------------------------------------------------

struct InterpArgs {
    std::string graph, alpha, flow, out, frames;
    int steps = 0;
    double support_threshold = 1e-9;
};

int run_interp(const InterpArgs& a) {
    ConnectionGraph g = load_valid_graph(a.graph);
    VectorField alpha = io::load_field(a.alpha);
    EdgeFlow flow = io::load_flow(a.flow);
    std::vector<int> support = nodal_support(alpha, a.support_threshold);
    RingPartition rings = edge_rings(g, support);
    Trajectory traj = interpolate_trajectory(g, alpha, flow, rings, a.steps);
    std::optional<TangentFrameSet> frames;
    if (!a.frames.empty()) frames = io::frames_from_json(io::read_json_file(a.frames));
    io::write_json_file(a.out, io::trajectory_to_json(traj, frames ? &*frames : nullptr));
    std::cout << "steps " << a.steps << " final_residual " << io::format_double(traj.residual.back()) << "\n";
    return 0;
}

// -- distmat -----------------------------------------------------------------

struct DistArgs {
    std::string graph, dir, out, names;
    std::optional<double> lambda;
    bool project_kernel = false;
    int near_kernel_count = 0;
    double lr = 5e-3;
    int epochs = 10000;
    int jobs = 1;
    std::string kind = "regularized";
    bool allow_small_lambda = false;
};

std::vector<fs::path> json_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

int run_distmat(const DistArgs& a) {
    ConnectionGraph g = load_valid_graph(a.graph);
    std::vector<fs::path> files = json_files(a.dir);
    std::vector<VectorField> fields;
    std::optional<KernelBasis> near;
    if (a.project_kernel) near = near_kernel(g, NearKernelRule{a.near_kernel_count, 1e-3});
    for (const auto& f : files) {
        VectorField v = io::load_field(f);
        fields.push_back(near ? project_out(*near, v) : v);
    }
    DistanceOptions opts;
    opts.solve.lambda = resolve_lambda(g, a.lambda, a.allow_small_lambda);
    opts.solve.learning_rate = a.lr;
    opts.solve.max_epochs = a.epochs;
    opts.jobs = a.jobs;
    opts.kind = a.kind == "transport" ? DistanceKind::Transport : DistanceKind::Regularized;
    DistanceMatrix dm = distance_matrix(g, fields, opts);
    io::write_text_file(a.out, io::matrix_csv(dm.values));
    if (!a.names.empty()) {
        std::string text;
        for (const auto& f : files) text += f.filename().string() + "\n";
        io::write_text_file(a.names, text);
    }
    std::cout << fields.size() << " fields\n";
    if (dm.unconverged > 0) {
        diag("non-convergence", std::to_string(dm.unconverged) + " pairwise solves did not converge; matrix written");
        return kExitNonConvergence;
    }
    return 0;
}

// -- cluster -----------------------------------------------------------------

struct ClusterArgs {
    std::string dist, out;
    int k = 2;
    double gamma = 0.1;
    std::uint64_t seed = 0;
};

int run_cluster(const ClusterArgs& a) {
    Matrix d = io::parse_matrix_csv(io::read_text_file(a.dist));
    ClusterOptions opts;
    opts.seed = a.seed;
    ClusterResult res = spectral_cluster(affinity_from_distance(d, a.gamma), a.k, opts);
    io::write_text_file(a.out, io::labels_csv(res.labels));
    if (!res.converged) {
        diag("non-convergence", "k-means did not converge; best-effort labels written");
        return kExitNonConvergence;
    }
    return 0;
}

// -- hurdat ------------------------------------------------------------------

struct HurdatArgs {
    std::string input, mesh, frames, out;
    bool average_raw = false;
};

int run_hurdat(const HurdatArgs& a) {
    HurdatParseResult parsed = hurdat2_parse(io::read_text_file(a.input));
    for (const auto& d : parsed.diagnostics) diag("hurdat", a.input + ":" + std::to_string(d.line) + ": " + d.message);
    PointCloud mesh = io::load_point_csv(a.mesh);
    TangentFrameSet frames = io::frames_from_json(io::read_json_file(a.frames));
    fs::create_directories(a.out);
    TrackFieldOptions opts;
    opts.normalize_first = !a.average_raw;
    int written = 0;
    for (const StormTrack& t : parsed.tracks) {
        if (t.samples.size() < 2) {
            diag("hurdat", t.id + ": fewer than 2 samples, skipped");
            continue;
        }
        io::save_field(fs::path(a.out) / (t.id + ".json"), track_to_field(t, frames, mesh, opts));
        ++written;
    }
    std::cout << written << " fields written to " << a.out << "\n";
    return 0;
}

// -- sample ------------------------------------------------------------------

struct SampleArgs {
    std::string surface = "torus";
    std::string out;
    double R = 5.0, r = 1.0;
    int n_theta = 10, n_psi = 40;
    double theta0 = 7.0, theta1 = 67.0, psi0 = -30.0, psi1 = 120.0;  // degrees
};

int run_sample(const SampleArgs& a) {
    constexpr double deg = std::numbers::pi / 180.0;
    PointCloud cloud = a.surface == "sphere"
                           ? sample_sphere_patch(a.theta0 * deg, a.theta1 * deg, a.psi0 * deg, a.psi1 * deg,
                                                 a.n_theta, a.n_psi)
                           : sample_torus(a.R, a.r, a.n_theta, a.n_psi);
    io::write_text_file(a.out, io::point_csv(cloud));
    std::cout << cloud.n() << " points\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal transport between vector fields on connection graphs"};
    app.require_subcommand(1);

    CheckArgs check;
    auto* c_check = app.add_subcommand("check", "Validate a graph and report consistency and kernel dimension");
    c_check->add_option("graph", check.graph, "Graph JSON")->required()->check(CLI::ExistingFile);
    c_check->add_option("--kernel", check.kernel_out, "Write the kernel basis JSON here");
    c_check->add_option("--tol", check.tol, "Consistency and kernel tolerance");

    FeasibleArgs feas;
    auto* c_feas = app.add_subcommand("feasible", "Decide whether a flow between two fields exists");
    c_feas->add_option("graph", feas.graph)->required()->check(CLI::ExistingFile);
    c_feas->add_option("alpha", feas.alpha)->required()->check(CLI::ExistingFile);
    c_feas->add_option("beta", feas.beta)->required()->check(CLI::ExistingFile);
    c_feas->add_option("--tol", feas.tol);

    SwitchArgs sw;
    auto* c_switch = app.add_subcommand("switch", "Write the feasibility switching and the switched graph");
    c_switch->add_option("graph", sw.graph)->required()->check(CLI::ExistingFile);
    c_switch->add_option("--root", sw.root);
    c_switch->add_option("-o,--output", sw.out)->required();

    SolveArgs solve;
    auto* c_solve = app.add_subcommand("solve", "Solve the regularized transport problem by dual ascent");
    c_solve->add_option("graph", solve.graph)->required()->check(CLI::ExistingFile);
    c_solve->add_option("alpha", solve.alpha)->required()->check(CLI::ExistingFile);
    c_solve->add_option("beta", solve.beta)->required()->check(CLI::ExistingFile);
    c_solve->add_option("--lambda", solve.lambda, "Regularization (default: max edge weight)");
    c_solve->add_option("--lr", solve.lr, "Learning rate");
    c_solve->add_option("--epochs", solve.epochs, "Maximum epochs");
    c_solve->add_option("--grad-tol", solve.grad_tol, "Gradient-norm stopping tolerance");
    c_solve->add_option("-o,--output", solve.out, "Flow JSON")->required();
    c_solve->add_option("--report", solve.report, "Solve report JSON");
    c_solve->add_option("--active-edges", solve.active_delta, "Emit plot CSV of edges with flow norm > delta");
    c_solve->add_option("--plot", solve.plot, "Path of the active-edge CSV (default: output with .active.csv extension)");
    c_solve->add_flag("--allow-small-lambda", solve.allow_small_lambda);
    c_solve->add_flag("--no-clamp-step", solve.no_clamp, "Use --lr even above the stability bound");

    BuildArgs build;
    auto* c_build = app.add_subcommand("buildgraph", "Build a connection graph from a point cloud by local PCA");
    c_build->add_option("points", build.points)->required()->check(CLI::ExistingFile);
    c_build->add_option("--eps", build.eps)->required();
    c_build->add_option("--dim", build.dim)->required();
    c_build->add_option("--weights", build.weights)->check(CLI::IsMember({"inverse", "unit"}));
    c_build->add_option("--kernel-divisor", build.kernel_divisor, "Kernel argument divisor (default sqrt(eps))");
    c_build->add_option("-o,--output", build.out)->required();
    c_build->add_option("--frames", build.frames_out, "Frames JSON");

    InterpArgs interp;
    auto* c_interp = app.add_subcommand("interp", "Ring interpolation of a field along a flow");
    c_interp->add_option("graph", interp.graph)->required()->check(CLI::ExistingFile);
    c_interp->add_option("alpha", interp.alpha)->required()->check(CLI::ExistingFile);
    c_interp->add_option("flow", interp.flow)->required()->check(CLI::ExistingFile);
    c_interp->add_option("--steps", interp.steps)->required();
    c_interp->add_option("--frames", interp.frames, "Frames JSON for ambient lifting")->check(CLI::ExistingFile);
    c_interp->add_option("--support-threshold", interp.support_threshold);
    c_interp->add_option("-o,--output", interp.out)->required();

    DistArgs dist;
    auto* c_dist = app.add_subcommand("distmat", "Pairwise transport distances between fields in a directory");
    c_dist->add_option("graph", dist.graph)->required()->check(CLI::ExistingFile);
    c_dist->add_option("fields", dist.dir)->required()->check(CLI::ExistingDirectory);
    c_dist->add_option("--lambda", dist.lambda);
    c_dist->add_flag("--project-kernel", dist.project_kernel, "Project out near-kernel eigenvectors first");
    c_dist->add_option("--near-kernel-count", dist.near_kernel_count, "Eigenvectors to project out (0: threshold rule)");
    c_dist->add_option("--lr", dist.lr);
    c_dist->add_option("--epochs", dist.epochs);
    c_dist->add_option("--jobs", dist.jobs);
    c_dist->add_option("--kind", dist.kind)->check(CLI::IsMember({"regularized", "transport"}));
    c_dist->add_option("--names", dist.names, "Write field file names in matrix order");
    c_dist->add_flag("--allow-small-lambda", dist.allow_small_lambda);
    c_dist->add_option("-o,--output", dist.out)->required();

    ClusterArgs clus;
    auto* c_clus = app.add_subcommand("cluster", "Spectral clustering of a distance matrix");
    c_clus->add_option("dist", clus.dist)->required()->check(CLI::ExistingFile);
    c_clus->add_option("--k", clus.k)->required();
    c_clus->add_option("--gamma", clus.gamma);
    c_clus->add_option("--seed", clus.seed);
    c_clus->add_option("-o,--output", clus.out)->required();

    HurdatArgs hur;
    auto* c_hur = app.add_subcommand("hurdat", "Convert HURDAT2 tracks into vector fields on a sphere mesh");
    c_hur->add_option("input", hur.input)->required()->check(CLI::ExistingFile);
    c_hur->add_option("--mesh", hur.mesh)->required()->check(CLI::ExistingFile);
    c_hur->add_option("--frames", hur.frames)->required()->check(CLI::ExistingFile);
    c_hur->add_flag("--average-raw", hur.average_raw, "Average raw differences, then normalize");
    c_hur->add_option("-o,--output", hur.out)->required();

    SampleArgs samp;
    auto* c_samp = app.add_subcommand("sample", "Write a grid sample of a torus or sphere patch as CSV");
    c_samp->add_option("surface", samp.surface)->check(CLI::IsMember({"torus", "sphere"}));
    c_samp->add_option("--R", samp.R);
    c_samp->add_option("--r", samp.r);
    c_samp->add_option("--n-theta", samp.n_theta);
    c_samp->add_option("--n-psi", samp.n_psi);
    c_samp->add_option("--theta0", samp.theta0, "degrees");
    c_samp->add_option("--theta1", samp.theta1, "degrees");
    c_samp->add_option("--psi0", samp.psi0, "degrees");
    c_samp->add_option("--psi1", samp.psi1, "degrees");
    c_samp->add_option("-o,--output", samp.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*c_check) return run_check(check);
        if (*c_feas) return run_feasible(feas);
        if (*c_switch) return run_switch(sw);
        if (*c_solve) return run_solve(solve);
        if (*c_build) return run_buildgraph(build);
        if (*c_interp) return run_interp(interp);
        if (*c_dist) return run_distmat(dist);
        if (*c_clus) return run_cluster(clus);
        if (*c_hur) return run_hurdat(hur);
        if (*c_samp) return run_sample(samp);
    } catch (const InfeasibleError& e) {
        diag("infeasible", e.what());
        return kExitInfeasible;
    } catch (const Error& e) {
        diag("validation", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        diag("error", e.what());
        return kExitValidation;
    }
    return kExitUsage;
}
