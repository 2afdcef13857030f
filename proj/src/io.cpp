#include "cgot/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace cgot::io {

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed ") + what + " JSON: " + e.what());
    }
}

Vector vector_from(const json& arr, std::size_t expected, const char* what) {
    if (!arr.is_array()) throw ParseError(std::string(what) + " must be an array");
    if (arr.size() != expected)
        throw ParseError(std::string(what) + " has " + std::to_string(arr.size()) + " entries, expected " +
                         std::to_string(expected));
    Vector v(static_cast<Eigen::Index>(expected));
    for (std::size_t k = 0; k < expected; ++k) v[Eigen::Index(k)] = arr[k].get<double>();
    return v;
}

json array_of(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v[k]);
    return arr;
}

int positive_int(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");
    int v = j.at(key).get<int>();
    if (v < 0) throw ParseError(std::string("\"") + key + "\" must be nonnegative");
    return v;
}

}  // namespace

json graph_to_json(const ConnectionGraph& g) {
    json edges = json::array();
    for (const Edge& e : g.edges) {
        json sigma = json::array();
        for (int a = 0; a < e.sigma.rows(); ++a)
            for (int b = 0; b < e.sigma.cols(); ++b) sigma.push_back(e.sigma(a, b));
        edges.push_back({{"i", e.i}, {"j", e.j}, {"w", e.w}, {"sigma", sigma}});
    }
    return {{"n", g.n}, {"d", g.d}, {"edges", edges}};
}

ConnectionGraph graph_from_json(const json& j) {
    return guarded("graph", [&] {
        ConnectionGraph g;
        g.n = positive_int(j, "n");
        g.d = positive_int(j, "d");
        if (g.d < 1) throw ParseError("graph \"d\" must be at least 1");
        for (const auto& je : j.at("edges")) {
            Edge e;
            e.i = je.at("i").get<int>();
            e.j = je.at("j").get<int>();
            e.w = je.at("w").get<double>();
            Vector flat = vector_from(je.at("sigma"), std::size_t(g.d) * g.d, "sigma");
            e.sigma = Matrix(g.d, g.d);
            for (int a = 0; a < g.d; ++a)
                for (int b = 0; b < g.d; ++b) e.sigma(a, b) = flat[a * g.d + b];
            g.edges.push_back(std::move(e));
        }
        reproject_connections(g);
        return g;
    });
}

json field_to_json(const VectorField& f) { return {{"n", f.n}, {"d", f.d}, {"values", array_of(f.values)}}; }

VectorField field_from_json(const json& j) {
    return guarded("field", [&] {
        int n = positive_int(j, "n"), d = positive_int(j, "d");
        return VectorField(n, d, vector_from(j.at("values"), std::size_t(n) * d, "values"));
    });
}

json flow_to_json(const EdgeFlow& f) { return {{"m", f.m}, {"d", f.d}, {"values", array_of(f.values)}}; }

EdgeFlow flow_from_json(const json& j) {
    return guarded("flow", [&] {
        int m = positive_int(j, "m"), d = positive_int(j, "d");
        return EdgeFlow(m, d, vector_from(j.at("values"), std::size_t(m) * d, "values"));
    });
}

json frames_to_json(const TangentFrameSet& frames) {
    json flat = json::array();
    for (const Matrix& o : frames.frames)
        for (int a = 0; a < o.rows(); ++a)
            for (int b = 0; b < o.cols(); ++b) flat.push_back(o(a, b));
    return {{"n", frames.n()}, {"p", frames.p}, {"d", frames.d}, {"frames", flat}};
}

TangentFrameSet frames_from_json(const json& j) {
    return guarded("frames", [&] {
        const int n = positive_int(j, "n"), p = positive_int(j, "p"), d = positive_int(j, "d");
        Vector flat = vector_from(j.at("frames"), std::size_t(n) * p * d, "frames");
        TangentFrameSet fs;
        fs.p = p;
        fs.d = d;
        for (int i = 0; i < n; ++i) {
            Matrix o(p, d);
            for (int a = 0; a < p; ++a)
                for (int b = 0; b < d; ++b) o(a, b) = flat[(Eigen::Index(i) * p + a) * d + b];
            fs.frames.push_back(std::move(o));
        }
        return fs;
    });
}

json report_to_json(const SolveReport& r) {
    return {{"primal_cost", r.primal_cost}, {"dual_value", r.dual_value}, {"gap", r.gap},
            {"residual", r.residual},       {"transport_cost", r.transport_cost},
            {"step", r.step},               {"epochs_used", r.epochs_used}, {"converged", r.converged}};
}

json kernel_to_json(const KernelBasis& k) {
    json vecs = json::array();
    for (const auto& f : k.vectors) vecs.push_back(field_to_json(f));
    return {{"dimension", k.dimension()}, {"tol", k.tol}, {"vectors", vecs}};
}

json switching_to_json(const SwitchingFunction& tau) {
    json arr = json::array();
    for (const Matrix& t : tau.tau) {
        json flat = json::array();
        for (int a = 0; a < t.rows(); ++a)
            for (int b = 0; b < t.cols(); ++b) flat.push_back(t(a, b));
        arr.push_back(flat);
    }
    return arr;
}

json trajectory_to_json(const Trajectory& t, const TangentFrameSet* frames) {
    json out = json::array();
    for (std::size_t k = 0; k < t.states.size(); ++k) {
        json s = field_to_json(t.states[k]);
        s["step"] = k;
        s["residual"] = t.residual[k];
        if (frames) {
            Matrix amb = lift_to_ambient(*frames, t.states[k]);
            json flat = json::array();
            for (Eigen::Index i = 0; i < amb.rows(); ++i)
                for (Eigen::Index a = 0; a < amb.cols(); ++a) flat.push_back(amb(i, a));
            s["ambient"] = flat;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump() + "\n"); }

ConnectionGraph load_graph(const std::filesystem::path& path) { return graph_from_json(read_json_file(path)); }
void save_graph(const std::filesystem::path& path, const ConnectionGraph& g) { write_json_file(path, graph_to_json(g)); }
VectorField load_field(const std::filesystem::path& path) { return field_from_json(read_json_file(path)); }
void save_field(const std::filesystem::path& path, const VectorField& f) { write_json_file(path, field_to_json(f)); }
EdgeFlow load_flow(const std::filesystem::path& path) { return flow_from_json(read_json_file(path)); }
void save_flow(const std::filesystem::path& path, const EdgeFlow& f) { write_json_file(path, flow_to_json(f)); }

// -- CSV ---------------------------------------------------------------------

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s == "inf" || s == "+inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
        throw ParseError("not a number: \"" + std::string(s) + "\"");
    return v;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t k = 0;
    auto is_sep = [](char c) { return c == ',' || c == ' ' || c == '\t' || c == '\r'; };
    const bool has_comma = line.find(',') != std::string_view::npos;
    if (has_comma) {
        while (true) {
            std::size_t next = line.find(',', k);
            out.push_back(line.substr(k, next == std::string_view::npos ? std::string_view::npos : next - k));
            if (next == std::string_view::npos) break;
            k = next + 1;
        }
        return out;
    }
    while (k < line.size()) {
        while (k < line.size() && is_sep(line[k])) ++k;
        std::size_t start = k;
        while (k < line.size() && !is_sep(line[k])) ++k;
        if (k > start) out.push_back(line.substr(start, k - start));
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t k = 0;
    while (k <= text.size()) {
        std::size_t next = text.find('\n', k);
        std::string_view line = text.substr(k, next == std::string_view::npos ? std::string_view::npos : next - k);
        out.push_back(line);
        if (next == std::string_view::npos) break;
        k = next + 1;
    }
    return out;
}

bool blank_or_comment(std::string_view line) {
    for (char c : line) {
        if (c == '#') return true;
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
}

// Rows of numbers; a non-numeric first data row is taken as a header and skipped.
std::vector<std::vector<double>> numeric_rows(std::string_view text) {
    std::vector<std::vector<double>> rows;
    bool first = true;
    int lineno = 0;
    for (std::string_view line : lines_of(text)) {
        ++lineno;
        if (blank_or_comment(line)) continue;
        std::vector<double> row;
        try {
            for (auto f : split_fields(line)) row.push_back(parse_double(f));
        } catch (const ParseError& e) {
            if (first) {
                first = false;
                continue;
            }
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                             " columns, found " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Matrix(0, 0);
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k) m(Eigen::Index(i), Eigen::Index(k)) = rows[i][k];
    return m;
}

}  // namespace

PointCloud parse_point_csv(std::string_view text) {
    PointCloud cloud{to_matrix(numeric_rows(text))};
    validate_cloud(cloud);
    return cloud;
}

PointCloud load_point_csv(const std::filesystem::path& path) { return parse_point_csv(read_text_file(path)); }

std::string matrix_csv(const Matrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            if (k) out += ',';
            out += format_double(m(i, k));
        }
        out += '\n';
    }
    return out;
}

std::string point_csv(const PointCloud& cloud) { return matrix_csv(cloud.coords); }

Matrix parse_matrix_csv(std::string_view text) { return to_matrix(numeric_rows(text)); }

std::string labels_csv(const std::vector<int>& labels) {
    std::string out = "index,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
    return out;
}

std::string active_edges_csv(const ConnectionGraph& g, const EdgeFlow& flow, const std::vector<int>& edges) {
    std::string out = "edge_index,i,j,flow_norm\n";
    for (int e : edges)
        out += std::to_string(e) + "," + std::to_string(g.edges[e].i) + "," + std::to_string(g.edges[e].j) + "," +
               format_double(flow.at(e).norm()) + "\n";
    return out;
}

}  // namespace cgot::io
