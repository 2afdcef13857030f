#pragma once

#include "cgot/manifold.hpp"
#include "cgot/toolkit.hpp"
#include "cgot/transport.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cgot::io {

using json = nlohmann::json;

// JSON codecs. Floats are written in shortest round-trip form, so save -> load is exact.
//
//   graph  {"n", "d", "edges": [{"i", "j", "w", "sigma": [d*d row-major]}]}
//   field  {"n", "d", "values": [n*d, vertex-major]}
//   flow   {"m", "d", "values": [m*d, canonical edge order]}
//   frames {"n", "p", "d", "frames": [n*p*d, each frame p x d row-major]}

json graph_to_json(const ConnectionGraph& g);
/// Parses and re-projects near-orthogonal sigmas; does not validate.
ConnectionGraph graph_from_json(const json& j);

json field_to_json(const VectorField& f);
VectorField field_from_json(const json& j);

json flow_to_json(const EdgeFlow& f);
EdgeFlow flow_from_json(const json& j);

json frames_to_json(const TangentFrameSet& frames);
TangentFrameSet frames_from_json(const json& j);

json report_to_json(const SolveReport& r);
json kernel_to_json(const KernelBasis& k);
json switching_to_json(const SwitchingFunction& tau);

/// Array of states; each is a field object plus "step", "residual", and "ambient" when frames are given.
json trajectory_to_json(const Trajectory& t, const TangentFrameSet* frames = nullptr);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

ConnectionGraph load_graph(const std::filesystem::path& path);
void save_graph(const std::filesystem::path& path, const ConnectionGraph& g);
VectorField load_field(const std::filesystem::path& path);
void save_field(const std::filesystem::path& path, const VectorField& f);
EdgeFlow load_flow(const std::filesystem::path& path);
void save_flow(const std::filesystem::path& path, const EdgeFlow& f);

// CSV: '\n' line endings, '.' decimal separator.

/// One point per row, comma or whitespace separated. Blank lines and '#' comments are
/// skipped, as is a non-numeric first row (header).
PointCloud parse_point_csv(std::string_view text);
PointCloud load_point_csv(const std::filesystem::path& path);
std::string point_csv(const PointCloud& cloud);

/// Shortest round-trip decimal; "inf" / "-inf" / "nan" for non-finite values.
std::string format_double(double x);
double parse_double(std::string_view s);

std::string matrix_csv(const Matrix& m);
Matrix parse_matrix_csv(std::string_view text);

/// "index,label" header, then one row per item.
std::string labels_csv(const std::vector<int>& labels);

/// "edge_index,i,j,flow_norm" header, one row per listed edge.
std::string active_edges_csv(const ConnectionGraph& g, const EdgeFlow& flow, const std::vector<int>& edges);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace cgot::io
