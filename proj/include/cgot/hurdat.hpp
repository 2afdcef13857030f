#pragma once

#include "cgot/manifold.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cgot {

struct TrackSample {
    std::int64_t timestamp = 0;  ///< seconds since 1970-01-01T00:00Z
    double latitude = 0.0;       ///< degrees, north positive
    double longitude = 0.0;      ///< degrees, east positive
    std::string record_id;       ///< e.g. "L" for landfall, empty when absent
    std::string status;          ///< e.g. "TS", "HU"
    std::optional<int> max_wind;      ///< knots; -999 sentinel dropped
    std::optional<int> min_pressure;  ///< millibars; -999 sentinel dropped
};

/// One storm: ordered samples with strictly increasing timestamps.
struct StormTrack {
    std::string id;    ///< e.g. "AL092011"
    std::string name;  ///< e.g. "IRENE"
    std::vector<TrackSample> samples;
};

struct HurdatDiagnostic {
    int line = 0;  ///< 1-based input line
    std::string message;
};

struct HurdatParseResult {
    std::vector<StormTrack> tracks;
    std::vector<HurdatDiagnostic> diagnostics;
};

/// Parses NOAA HURDAT2 best-track text. Malformed rows are dropped with a diagnostic
/// and a header whose row count disagrees with the rows that follow is reported
/// against the header line; the parser never throws on bad content.
HurdatParseResult hurdat2_parse(std::string_view text);

/// Parses and throws ParseError on the first diagnostic.
std::vector<StormTrack> hurdat2_parse_strict(std::string_view text);

/// "28.0N" -> 28.0, "94.8W" -> -94.8. Throws ParseError on anything else.
double parse_hurdat_coordinate(std::string_view token, bool latitude);

/// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);

/// Unit-sphere position of a (latitude, east longitude) pair, via the mesh
/// parameterization with west-positive psi = -longitude.
Eigen::Vector3d track_position(double latitude_deg, double longitude_deg);

struct TrackFieldOptions {
    /// Normalize each difference before averaging; false averages raw differences and
    /// normalizes the mean.
    bool normalize_first = true;
};

/// Forward differences of the track on the unit sphere, snapped to the nearest mesh
/// node, averaged per node, and projected onto the node's tangent frame.
/// Throws ValidationError for tracks with fewer than 2 samples.
VectorField track_to_field(const StormTrack& track, const TangentFrameSet& frames, const PointCloud& mesh,
                           const TrackFieldOptions& opts = {});

/// Index of the mesh point closest to x in Euclidean distance.
int nearest_point(const PointCloud& mesh, const Eigen::Vector3d& x);

}  // namespace cgot
