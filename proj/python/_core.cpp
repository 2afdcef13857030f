#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cgot/hurdat.hpp"
#include "cgot/io.hpp"
#include "cgot/manifold.hpp"
#include "cgot/spectral.hpp"
#include "cgot/toolkit.hpp"
#include "cgot/transport.hpp"

namespace py = pybind11;
using namespace cgot;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Python side sees fields as n x d arrays and flows as m x d arrays.
VectorField to_field(const RowMatrix& a) {
    return VectorField(int(a.rows()), int(a.cols()), Eigen::Map<const Vector>(a.data(), a.size()));
}

RowMatrix from_values(const Vector& v, int rows, int cols) {
    return Eigen::Map<const RowMatrix>(v.data(), rows, cols);
}

RowMatrix from_field(const VectorField& f) { return from_values(f.values, f.n, f.d); }
RowMatrix from_flow(const EdgeFlow& f) { return from_values(f.values, f.m, f.d); }
EdgeFlow to_flow(const RowMatrix& a) {
    return EdgeFlow(int(a.rows()), int(a.cols()), Eigen::Map<const Vector>(a.data(), a.size()));
}

PointCloud to_cloud(const Matrix& pts) {
    PointCloud c;
    c.coords = pts;
    return c;
}

py::dict report_dict(const SolveReport& r) {
    py::dict d;
    d["primal_cost"] = r.primal_cost;
    d["dual_value"] = r.dual_value;
    d["gap"] = r.gap;
    d["residual"] = r.residual;
    d["transport_cost"] = r.transport_cost;
    d["step"] = r.step;
    d["epochs_used"] = r.epochs_used;
    d["converged"] = r.converged;
    return d;
}

SolveOptions make_options(std::optional<double> lambda, const ConnectionGraph& g, double lr, int max_epochs,
                          double grad_tol, bool clamp_step) {
    SolveOptions o;
    o.lambda = lambda ? *lambda : g.max_weight();
    o.learning_rate = lr;
    o.max_epochs = max_epochs;
    o.grad_tol = grad_tol;
    o.clamp_step = clamp_step;
    return o;
}

TangentFrameSet to_frames(const std::vector<Matrix>& frames) {
    if (frames.empty()) throw DimensionError("no frames");
    TangentFrameSet fs;
    fs.p = int(frames.front().rows());
    fs.d = int(frames.front().cols());
    fs.frames = frames;
    return fs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Optimal transport of vector fields over connection graphs";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());

    py::class_<ConnectionGraph>(m, "ConnectionGraph")
        .def(py::init([](int n, int d, const std::vector<std::tuple<int, int, double, Matrix>>& edges) {
                 ConnectionGraph g;
                 g.n = n;
                 g.d = d;
                 for (const auto& [i, j, w, s] : edges) g.edges.push_back({i, j, w, s});
                 return g;
             }),
             py::arg("n"), py::arg("d"), py::arg("edges"))
        .def_static("trivial", &ConnectionGraph::trivial, py::arg("n"), py::arg("d"), py::arg("pairs"),
                    py::arg("w") = 1.0)
        .def_readonly("n", &ConnectionGraph::n)
        .def_readonly("d", &ConnectionGraph::d)
        .def_property_readonly("num_edges", &ConnectionGraph::num_edges)
        .def_property_readonly("max_weight", &ConnectionGraph::max_weight)
        .def_property_readonly("edges",
                               [](const ConnectionGraph& g) {
                                   std::vector<std::tuple<int, int, double, Matrix>> out;
                                   for (const auto& e : g.edges) out.emplace_back(e.i, e.j, e.w, e.sigma);
                                   return out;
                               })
        .def("validate",
             [](const ConnectionGraph& g) {
                 std::vector<std::string> out;
                 for (const auto& v : validate_graph(g)) out.push_back(to_string(v.kind) + ": " + v.message);
                 return out;
             })
        .def("to_json", [](const ConnectionGraph& g) { return io::graph_to_json(g).dump(); })
        .def_static("from_json", [](const std::string& s) { return io::graph_from_json(io::json::parse(s)); })
        .def("__repr__", [](const ConnectionGraph& g) {
            return "<ConnectionGraph n=" + std::to_string(g.n) + " d=" + std::to_string(g.d) +
                   " m=" + std::to_string(g.num_edges()) + ">";
        });

    m.def("incidence", &incidence, py::arg("graph"));
    m.def("connection_laplacian", &connection_laplacian, py::arg("graph"));
    m.def("graph_laplacian", &graph_laplacian, py::arg("graph"));
    m.def("laplacian_spectrum", &laplacian_spectrum, py::arg("graph"));
    m.def("is_consistent", &is_consistent, py::arg("graph"), py::arg("tol") = 1e-8);
    m.def("path_product", [](const ConnectionGraph& g, const std::vector<int>& p) { return path_product(g, {p}); },
          py::arg("graph"), py::arg("path"));
    m.def(
        "fundamental_cycles",
        [](const ConnectionGraph& g, int root) {
            std::vector<std::vector<int>> out;
            for (const auto& c : fundamental_cycles(g, root)) out.push_back(c.vertices);
            return out;
        },
        py::arg("graph"), py::arg("root") = 0);

    m.def(
        "kernel",
        [](const ConnectionGraph& g, double tol, bool structured) {
            KernelBasis k = structured ? kernel_structured(g, 0, tol) : kernel_numeric(g, tol);
            return k.as_matrix(g.n, g.d);
        },
        py::arg("graph"), py::arg("tol") = kKernelTol, py::arg("structured") = false,
        "Orthonormal kernel basis as an (n*d) x k matrix, vertex-major rows.");
    m.def(
        "check_feasibility",
        [](const ConnectionGraph& g, const RowMatrix& alpha, const RowMatrix& beta, double tol) {
            FeasibilityReport r = check_feasibility(g, to_field(alpha), to_field(beta), tol);
            py::dict d;
            d["feasible"] = r.feasible;
            d["components"] = r.components;
            d["violated"] = r.violated;
            d["kernel_dimension"] = r.kernel_dimension;
            d["message"] = r.describe();
            return d;
        },
        py::arg("graph"), py::arg("alpha"), py::arg("beta"), py::arg("tol") = kKernelTol);
    m.def(
        "is_feasible",
        [](const ConnectionGraph& g, const RowMatrix& a, const RowMatrix& b, double tol) {
            return is_feasible(g, to_field(a), to_field(b), tol);
        },
        py::arg("graph"), py::arg("alpha"), py::arg("beta"), py::arg("tol") = kKernelTol);
    m.def(
        "project_feasible",
        [](const ConnectionGraph& g, const RowMatrix& f, int count, double rel_threshold) {
            return from_field(project_feasible(g, to_field(f), {count, rel_threshold}));
        },
        py::arg("graph"), py::arg("field"), py::arg("count") = 0, py::arg("rel_threshold") = 1e-3);
    m.def(
        "feasibility_switching",
        [](const ConnectionGraph& g, int root) { return feasibility_switching(g, root).tau; }, py::arg("graph"),
        py::arg("root") = 0);
    m.def(
        "switch_graph",
        [](const ConnectionGraph& g, const std::vector<Matrix>& tau) { return switch_graph(g, {tau}); },
        py::arg("graph"), py::arg("tau"));
    m.def(
        "switch_field",
        [](const std::vector<Matrix>& tau, const RowMatrix& f) { return from_field(switch_field({tau}, to_field(f))); },
        py::arg("tau"), py::arg("field"));

    m.def(
        "solve",
        [](const ConnectionGraph& g, const RowMatrix& alpha, const RowMatrix& beta, std::optional<double> lambda,
           double lr, int max_epochs, double grad_tol, bool clamp_step) {
            SolveResult r;
            {
                py::gil_scoped_release release;
                r = solve_regularized(g, to_field(alpha), to_field(beta),
                                      make_options(lambda, g, lr, max_epochs, grad_tol, clamp_step));
            }
            py::dict d;
            d["flow"] = from_flow(r.flow);
            d["potential"] = from_field(r.potential);
            d["report"] = report_dict(r.report);
            return d;
        },
        py::arg("graph"), py::arg("alpha"), py::arg("beta"), py::arg("lam") = py::none(),
        py::arg("learning_rate") = 5e-3, py::arg("max_epochs") = 10000, py::arg("grad_tol") = -1.0,
        py::arg("clamp_step") = true,
        "Regularized transport by dual gradient ascent. lam defaults to the largest edge weight.");
    m.def(
        "wasserstein",
        [](const ConnectionGraph& g, const RowMatrix& alpha, const RowMatrix& beta, std::optional<double> lambda,
           double lr, int max_epochs, double grad_tol) {
            py::gil_scoped_release release;
            return wasserstein(g, to_field(alpha), to_field(beta), make_options(lambda, g, lr, max_epochs, grad_tol, true))
                .distance;
        },
        py::arg("graph"), py::arg("alpha"), py::arg("beta"), py::arg("lam") = py::none(),
        py::arg("learning_rate") = 5e-3, py::arg("max_epochs") = 10000, py::arg("grad_tol") = -1.0);
    m.def(
        "oracle_solve",
        [](const ConnectionGraph& g, const RowMatrix& alpha, const RowMatrix& beta, double lambda) {
            return from_flow(oracle_solve(g, to_field(alpha), to_field(beta), lambda));
        },
        py::arg("graph"), py::arg("alpha"), py::arg("beta"), py::arg("lam"));
    m.def(
        "dual_objective",
        [](const ConnectionGraph& g, const RowMatrix& phi, const RowMatrix& c, double lambda) {
            return dual_objective(g, to_field(phi), to_field(c), lambda);
        },
        py::arg("graph"), py::arg("phi"), py::arg("c"), py::arg("lam"));
    m.def(
        "dual_gradient",
        [](const ConnectionGraph& g, const RowMatrix& phi, const RowMatrix& c, double lambda) {
            return from_field(dual_gradient(g, to_field(phi), to_field(c), lambda));
        },
        py::arg("graph"), py::arg("phi"), py::arg("c"), py::arg("lam"));
    m.def(
        "primal_cost",
        [](const ConnectionGraph& g, const RowMatrix& flow, double lambda) { return primal_cost(g, to_flow(flow), lambda); },
        py::arg("graph"), py::arg("flow"), py::arg("lam") = 0.0);

    m.def(
        "epsilon_graph",
        [](const Matrix& pts, double eps, const std::string& weights) {
            auto sk = epsilon_graph(to_cloud(pts), eps, weights == "unit" ? WeightRule::Unit : WeightRule::InverseDistance);
            py::dict d;
            d["pairs"] = sk.pairs;
            d["weights"] = sk.weights;
            d["isolated"] = sk.isolated;
            d["connected"] = sk.connected;
            return d;
        },
        py::arg("points"), py::arg("eps"), py::arg("weights") = "inverse");
    m.def(
        "local_pca",
        [](const Matrix& pts, double eps, int dim, const std::string& weights, double kernel_divisor) {
            PointCloud c = to_cloud(pts);
            auto sk = epsilon_graph(c, eps, weights == "unit" ? WeightRule::Unit : WeightRule::InverseDistance);
            LocalPcaOptions o;
            o.kernel_divisor = kernel_divisor;
            auto fr = tangent_frames(c, sk, dim, eps, o);
            auto pr = procrustes_connection(fr, sk);
            return py::make_tuple(pr.graph, fr.frames);
        },
        py::arg("points"), py::arg("eps"), py::arg("dim"), py::arg("weights") = "inverse",
        py::arg("kernel_divisor") = -1.0, "Connection graph and per-node p x d frames from a point cloud.");
    m.def("procrustes_align", &procrustes_align, py::arg("oi"), py::arg("oj"));
    m.def(
        "sample_torus", [](double R, double r, int nt, int np) { return sample_torus(R, r, nt, np).coords; },
        py::arg("R") = 5.0, py::arg("r") = 1.0, py::arg("n_theta") = 10, py::arg("n_psi") = 40);
    m.def(
        "sample_sphere_patch",
        [](double t0, double t1, double p0, double p1, int nt, int np) {
            return sample_sphere_patch(t0, t1, p0, p1, nt, np).coords;
        },
        py::arg("theta0"), py::arg("theta1"), py::arg("psi0"), py::arg("psi1"), py::arg("n_theta"), py::arg("n_psi"),
        "Angles in radians.");
    m.def(
        "project_to_tangent",
        [](const std::vector<Matrix>& frames, const Matrix& ambient) {
            return from_field(project_to_tangent(to_frames(frames), ambient));
        },
        py::arg("frames"), py::arg("ambient"));
    m.def(
        "lift_to_ambient",
        [](const std::vector<Matrix>& frames, const RowMatrix& f) { return lift_to_ambient(to_frames(frames), to_field(f)); },
        py::arg("frames"), py::arg("field"));

    m.def(
        "pseudo_dirac", [](int n, int d, int node, int channel) { return from_field(pseudo_dirac(n, d, node, channel)); },
        py::arg("n"), py::arg("d"), py::arg("node"), py::arg("channel"));
    m.def(
        "edge_rings", [](const ConnectionGraph& g, const std::vector<int>& s) { return edge_rings(g, s).ring; },
        py::arg("graph"), py::arg("support"));
    m.def("hop_diameter", &hop_diameter, py::arg("graph"));
    m.def(
        "interpolate",
        [](const ConnectionGraph& g, const RowMatrix& alpha, const RowMatrix& flow, int steps, double threshold) {
            VectorField a = to_field(alpha);
            auto rings = edge_rings(g, nodal_support(a, threshold));
            auto t = interpolate_trajectory(g, a, to_flow(flow), rings, steps);
            std::vector<RowMatrix> states;
            for (const auto& s : t.states) states.push_back(from_field(s));
            return states;
        },
        py::arg("graph"), py::arg("alpha"), py::arg("flow"), py::arg("steps"), py::arg("support_threshold") = 1e-9);
    m.def(
        "active_edges", [](const RowMatrix& flow, double delta) { return active_edges(to_flow(flow), delta); },
        py::arg("flow"), py::arg("delta"));
    m.def(
        "distance_matrix",
        [](const ConnectionGraph& g, const std::vector<RowMatrix>& fields, std::optional<double> lambda, int max_epochs,
           int jobs, const std::string& kind) {
            std::vector<VectorField> fs;
            for (const auto& f : fields) fs.push_back(to_field(f));
            DistanceOptions o;
            o.solve = make_options(lambda, g, 5e-3, max_epochs, -1.0, true);
            o.jobs = jobs;
            o.kind = kind == "transport" ? DistanceKind::Transport : DistanceKind::Regularized;
            py::gil_scoped_release release;
            return distance_matrix(g, fs, o).values;
        },
        py::arg("graph"), py::arg("fields"), py::arg("lam") = py::none(), py::arg("max_epochs") = 10000,
        py::arg("jobs") = 1, py::arg("kind") = "regularized");
    m.def(
        "spectral_cluster",
        [](const Matrix& dist, int k, double gamma, std::uint64_t seed) {
            ClusterOptions o;
            o.seed = seed;
            return spectral_cluster(affinity_from_distance(dist, gamma), k, o).labels;
        },
        py::arg("distance"), py::arg("k"), py::arg("gamma") = 0.1, py::arg("seed") = 0);

    m.def(
        "parse_hurdat",
        [](const std::string& text) {
            auto r = hurdat2_parse(text);
            py::list tracks;
            for (const auto& t : r.tracks) {
                py::dict d;
                d["id"] = t.id;
                d["name"] = t.name;
                std::vector<std::tuple<std::int64_t, double, double>> samples;
                for (const auto& s : t.samples) samples.emplace_back(s.timestamp, s.latitude, s.longitude);
                d["samples"] = samples;
                tracks.append(d);
            }
            std::vector<std::pair<int, std::string>> diags;
            for (const auto& dg : r.diagnostics) diags.emplace_back(dg.line, dg.message);
            return py::make_tuple(tracks, diags);
        },
        py::arg("text"), "Returns (tracks, diagnostics); samples are (epoch seconds, lat, east lon).");
}
