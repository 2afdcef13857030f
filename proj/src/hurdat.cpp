#include "cgot/hurdat.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace cgot {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t k = 0;
    while (true) {
        std::size_t next = line.find(',', k);
        out.push_back(trim(line.substr(k, next == std::string_view::npos ? std::string_view::npos : next - k)));
        if (next == std::string_view::npos) break;
        k = next + 1;
    }
    // the trailing comma leaves an empty final field
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

bool parse_int(std::string_view s, int& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return !s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// "AL092011" style identifier: two basin letters, two digit storm number, four digit year.
bool looks_like_header(const std::vector<std::string_view>& f) {
    if (f.size() != 3) return false;
    std::string_view id = f[0];
    if (id.size() != 8) return false;
    for (int k = 0; k < 2; ++k)
        if (id[k] < 'A' || id[k] > 'Z') return false;
    return all_digits(id.substr(2)) && all_digits(f[2]);
}

std::optional<int> optional_field(const std::vector<std::string_view>& f, std::size_t k) {
    int v = 0;
    if (k >= f.size() || !parse_int(f[k], v) || v == -999 || v == -99) return std::nullopt;
    return v;
}

std::string parse_row(const std::vector<std::string_view>& f, TrackSample& out) {
    if (f.size() < 6) return "data row has " + std::to_string(f.size()) + " fields, expected at least 6";
    if (f[0].size() != 8 || !all_digits(f[0])) return "bad date \"" + std::string(f[0]) + "\"";
    if (f[1].size() != 4 || !all_digits(f[1])) return "bad time \"" + std::string(f[1]) + "\"";
    int year = 0, month = 0, day = 0, hour = 0, minute = 0;
    parse_int(f[0].substr(0, 4), year);
    parse_int(f[0].substr(4, 2), month);
    parse_int(f[0].substr(6, 2), day);
    parse_int(f[1].substr(0, 2), hour);
    parse_int(f[1].substr(2, 2), minute);
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{unsigned(month)}, std::chrono::day{unsigned(day)}};
    if (!ymd.ok()) return "invalid calendar date \"" + std::string(f[0]) + "\"";
    if (hour > 23 || minute > 59) return "invalid time of day \"" + std::string(f[1]) + "\"";
    try {
        out.latitude = parse_hurdat_coordinate(f[4], true);
        out.longitude = parse_hurdat_coordinate(f[5], false);
    } catch (const ParseError& e) {
        return e.what();
    }
    out.timestamp = days_from_civil(year, unsigned(month), unsigned(day)) * 86400 + hour * 3600 + minute * 60;
    out.record_id = std::string(f[2]);
    out.status = std::string(f[3]);
    out.max_wind = optional_field(f, 6);
    out.min_pressure = optional_field(f, 7);
    return {};
}

}  // namespace

std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const sys_days sd{year_month_day{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}}};
    return sd.time_since_epoch().count();
}

double parse_hurdat_coordinate(std::string_view token, bool latitude) {
    token = trim(token);
    if (token.size() < 2) throw ParseError("bad coordinate \"" + std::string(token) + "\"");
    const char hemi = token.back();
    double sign = 0.0;
    if (latitude) {
        if (hemi == 'N') sign = 1.0;
        if (hemi == 'S') sign = -1.0;
    } else {
        if (hemi == 'E') sign = 1.0;
        if (hemi == 'W') sign = -1.0;
    }
    if (sign == 0.0)
        throw ParseError(std::string("bad ") + (latitude ? "latitude" : "longitude") + " hemisphere in \"" +
                         std::string(token) + "\"");
    std::string_view num = token.substr(0, token.size() - 1);
    double v = 0.0;
    auto res = std::from_chars(num.data(), num.data() + num.size(), v);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size() || v < 0.0)
        throw ParseError("bad coordinate value \"" + std::string(token) + "\"");
    const double limit = latitude ? 90.0 : 180.0;
    if (v > limit) throw ParseError("coordinate out of range \"" + std::string(token) + "\"");
    return sign * v;
}

HurdatParseResult hurdat2_parse(std::string_view text) {
    HurdatParseResult result;
    std::vector<std::string_view> lines;
    for (std::size_t k = 0; k < text.size();) {
        std::size_t next = text.find('\n', k);
        lines.push_back(text.substr(k, next == std::string_view::npos ? std::string_view::npos : next - k));
        if (next == std::string_view::npos) break;
        k = next + 1;
    }

    auto diag = [&](std::size_t idx, std::string msg) { result.diagnostics.push_back({int(idx) + 1, std::move(msg)}); };

    std::size_t k = 0;
    while (k < lines.size()) {
        if (trim(lines[k]).empty()) {
            ++k;
            continue;
        }
        auto fields = split_commas(lines[k]);
        if (!looks_like_header(fields)) {
            diag(k, "expected a storm header line, found \"" + std::string(trim(lines[k])) + "\"");
            ++k;
            continue;
        }
        const std::size_t header_idx = k;
        StormTrack track;
        track.id = std::string(fields[0]);
        track.name = std::string(fields[1]);
        int declared = 0;
        parse_int(fields[2], declared);
        ++k;

        int seen = 0;
        while (seen < declared && k < lines.size()) {
            if (trim(lines[k]).empty()) {
                ++k;
                continue;
            }
            auto row = split_commas(lines[k]);
            if (looks_like_header(row)) break;
            ++seen;
            TrackSample s;
            std::string err = parse_row(row, s);
            if (!err.empty()) {
                diag(k, track.id + ": " + err + "; row dropped");
            } else if (!track.samples.empty() && s.timestamp <= track.samples.back().timestamp) {
                diag(k, track.id + ": timestamp not after previous sample; row dropped");
            } else {
                track.samples.push_back(std::move(s));
            }
            ++k;
        }
        if (seen != declared)
            diag(header_idx, "header for " + track.id + " declares " + std::to_string(declared) + " rows but " +
                                 std::to_string(seen) + " follow");
        result.tracks.push_back(std::move(track));
    }
    return result;
}

std::vector<StormTrack> hurdat2_parse_strict(std::string_view text) {
    HurdatParseResult r = hurdat2_parse(text);
    if (!r.diagnostics.empty())
        throw ParseError("line " + std::to_string(r.diagnostics.front().line) + ": " + r.diagnostics.front().message);
    return std::move(r.tracks);
}

Eigen::Vector3d track_position(double latitude_deg, double longitude_deg) {
    constexpr double deg = std::numbers::pi / 180.0;
    return sphere_point(latitude_deg * deg, -longitude_deg * deg);
}

int nearest_point(const PointCloud& mesh, const Eigen::Vector3d& x) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < mesh.n(); ++i) {
        const double dist = (mesh.coords.row(i).transpose() - x).squaredNorm();
        if (dist < best_d) {
            best_d = dist;
            best = i;
        }
    }
    return best;
}

VectorField track_to_field(const StormTrack& track, const TangentFrameSet& frames, const PointCloud& mesh,
                           const TrackFieldOptions& opts) {
    if (track.samples.size() < 2) throw ValidationError("track " + track.id + " has fewer than 2 samples");
    if (mesh.p() != 3 || frames.p != 3) throw DimensionError("track fields need a mesh in R^3");
    if (frames.n() != mesh.n()) throw DimensionError("frames and mesh differ in vertex count");

    Matrix sums = Matrix::Zero(mesh.n(), 3);
    std::vector<int> counts(mesh.n(), 0);
    for (std::size_t k = 0; k + 1 < track.samples.size(); ++k) {
        const Eigen::Vector3d y0 = track_position(track.samples[k].latitude, track.samples[k].longitude);
        const Eigen::Vector3d y1 = track_position(track.samples[k + 1].latitude, track.samples[k + 1].longitude);
        Eigen::Vector3d diff = y1 - y0;
        const double nrm = diff.norm();
        if (nrm <= 1e-15) continue;
        if (opts.normalize_first) diff /= nrm;
        const int node = nearest_point(mesh, y0);
        sums.row(node) += diff.transpose();
        ++counts[node];
    }
    Matrix ambient = Matrix::Zero(mesh.n(), 3);
    for (int i = 0; i < mesh.n(); ++i) {
        if (counts[i] == 0) continue;
        Eigen::RowVector3d mean = sums.row(i) / counts[i];
        if (!opts.normalize_first) {
            const double nrm = mean.norm();
            if (nrm > 0.0) mean /= nrm;
        }
        ambient.row(i) = mean;
    }
    return project_to_tangent(frames, ambient);
}

}  // namespace cgot
