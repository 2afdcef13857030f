#include "doctest.h"
#include "oracles.hpp"

#include "cgot/hurdat.hpp"
#include "cgot/io.hpp"

#include <cmath>
#include <numbers>

using namespace cgot;
using namespace cgot::testing;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const char* kTwoStorms =
    "AL011999, ARLENE, 3,\n"
    "19990611, 1800,  , TS, 28.0N,  94.8W,  35, 1007, -999, -999, -999, -999,\n"
    "19990612, 0000,  , TS, 28.6N,  94.1W,  40, 1005,   30,    0,    0,   30,\n"
    "19990612, 0600, L, HU, 29.3N,  93.5W,  65,  990,   60,   40,   20,   50,\n"
    "EP022001, BOBO, 2,\n"
    "20011231, 1800,  , TD, 12.0S, 170.0E, -999, -999,\n"
    "20020101, 0000,  , TD, 12.5S, 171.5E,   25, 1009,\n";

// Samples along the great circle through two points, as (lat, east lon) in degrees.
std::vector<TrackSample> great_circle_track(const Eigen::Vector3d& p, const Eigen::Vector3d& q, int count) {
    const Eigen::Vector3d u = (q - p.dot(q) * p).normalized();
    const double span = std::acos(p.dot(q));
    std::vector<TrackSample> out;
    for (int k = 0; k < count; ++k) {
        const double t = span * k / (count - 1);
        const Eigen::Vector3d y = std::cos(t) * p + std::sin(t) * u;
        TrackSample s;
        s.timestamp = 21600 * k;
        s.latitude = std::asin(y.z()) / kDeg;
        s.longitude = std::atan2(y.y(), y.x()) / kDeg;
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("property: JSON round trips are exact") {
    Rng rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + int(rng() % 8), d = 1 + int(rng() % 3);
        auto g = random_graph(n, d, 4, ConnectionKind::Random, rng);
        auto g2 = io::graph_from_json(io::json::parse(io::graph_to_json(g).dump()));
        REQUIRE(g2.n == g.n);
        REQUIRE(g2.num_edges() == g.num_edges());
        for (int e = 0; e < g.num_edges(); ++e) {
            CHECK(g2.edges[e].i == g.edges[e].i);
            CHECK(g2.edges[e].w == g.edges[e].w);
            // sigma is re-projected on load; already-orthogonal input is nearly unchanged
            CHECK((g2.edges[e].sigma - g.edges[e].sigma).cwiseAbs().maxCoeff() < 1e-14);
        }
        VectorField f = random_field(n, d, rng);
        CHECK(io::field_from_json(io::json::parse(io::field_to_json(f).dump())).values == f.values);
        EdgeFlow J(g.num_edges(), d, random_field(g.num_edges(), d, rng).values);
        CHECK(io::flow_from_json(io::json::parse(io::flow_to_json(J).dump())).values == J.values);
    }
}

TEST_CASE("frames round trip") {
    Rng rng(2);
    TangentFrameSet fr;
    fr.p = 3;
    fr.d = 2;
    for (int i = 0; i < 4; ++i) fr.frames.push_back(random_orthogonal(3, rng).leftCols(2));
    auto back = io::frames_from_json(io::frames_to_json(fr));
    REQUIRE(back.n() == 4);
    for (int i = 0; i < 4; ++i) CHECK(back.frames[i] == fr.frames[i]);
}

TEST_CASE("malformed JSON becomes a parse error") {
    CHECK_THROWS_AS(io::graph_from_json(io::json::parse(R"({"n": 2})")), ParseError);
    CHECK_THROWS_AS(io::field_from_json(io::json::parse(R"({"n": 2, "d": 1, "values": [1]})")), Error);
}

TEST_CASE("number formatting round trips") {
    Rng rng(3);
    std::normal_distribution<double> nd;
    for (int k = 0; k < 200; ++k) {
        const double x = nd(rng) * std::pow(10.0, double(int(rng() % 40) - 20));
        CHECK(io::parse_double(io::format_double(x)) == x);
    }
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(std::isinf(io::parse_double("inf")));
}

TEST_CASE("point CSV parsing") {
    auto a = io::parse_point_csv("x,y,z\n0,0,0\n1,0,0\n\n# comment\n0,1,0\n");
    CHECK(a.n() == 3);
    CHECK(a.p() == 3);
    auto b = io::parse_point_csv("0 0\n1.5 2\n");
    CHECK(b.coords(1, 0) == 1.5);
    CHECK_THROWS_AS(io::parse_point_csv("0,0\n1,1,1\n"), ParseError);
    CHECK_THROWS_AS(io::parse_point_csv("0,0\n0,0\n"), ValidationError);
    auto c = io::parse_point_csv(io::point_csv(a));
    CHECK(c.coords == a.coords);
}

TEST_CASE("matrix and label CSV") {
    Matrix m(2, 2);
    m << 0, 1.25, std::numeric_limits<double>::infinity(), 0;
    Matrix back = io::parse_matrix_csv(io::matrix_csv(m));
    CHECK(back == m);
    CHECK(io::labels_csv({1, 0}) == "index,label\n0,1\n1,0\n");
}

TEST_CASE("HURDAT coordinates") {
    CHECK(parse_hurdat_coordinate("28.0N", true) == 28.0);
    CHECK(parse_hurdat_coordinate("94.8W", false) == -94.8);
    CHECK(parse_hurdat_coordinate("12.5S", true) == -12.5);
    CHECK(parse_hurdat_coordinate("170.0E", false) == 170.0);
    CHECK_THROWS_AS(parse_hurdat_coordinate("28.0W", true), ParseError);
    CHECK_THROWS_AS(parse_hurdat_coordinate("95.0N", true), ParseError);
    CHECK_THROWS_AS(parse_hurdat_coordinate("N", true), ParseError);
}

TEST_CASE("HURDAT parsing") {
    auto r = hurdat2_parse(kTwoStorms);
    CHECK(r.diagnostics.empty());
    REQUIRE(r.tracks.size() == 2);
    const auto& arlene = r.tracks[0];
    CHECK(arlene.id == "AL011999");
    CHECK(arlene.name == "ARLENE");
    REQUIRE(arlene.samples.size() == 3);
    CHECK(arlene.samples[0].latitude == 28.0);
    CHECK(arlene.samples[0].longitude == -94.8);
    CHECK(arlene.samples[0].max_wind == 35);
    CHECK(arlene.samples[2].record_id == "L");
    CHECK(arlene.samples[2].status == "HU");
    CHECK(arlene.samples[1].timestamp - arlene.samples[0].timestamp == 6 * 3600);
    // 1999-06-11 18:00 UTC
    CHECK(arlene.samples[0].timestamp == 929124000);
    const auto& bobo = r.tracks[1];
    CHECK_FALSE(bobo.samples[0].max_wind.has_value());
    CHECK_FALSE(bobo.samples[0].min_pressure.has_value());
    CHECK(bobo.samples[1].timestamp - bobo.samples[0].timestamp == 6 * 3600);
    CHECK(bobo.samples[0].latitude == -12.0);

    CHECK(hurdat2_parse("").tracks.empty());
    CHECK(hurdat2_parse("").diagnostics.empty());
}

TEST_CASE("HURDAT row count mismatch is flagged on the header") {
    const char* text =
        "AL011999, ARLENE, 3,\n"
        "19990611, 1800,  , TS, 28.0N,  94.8W,  35, 1007,\n"
        "19990612, 0000,  , TS, 28.6N,  94.1W,  40, 1005,\n";
    auto r = hurdat2_parse(text);
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].line == 1);
    CHECK(r.tracks[0].samples.size() == 2);
    CHECK_THROWS_AS(hurdat2_parse_strict(text), ParseError);
    try {
        hurdat2_parse_strict(text);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("HURDAT bad rows are dropped with diagnostics") {
    const char* text =
        "AL011999, ARLENE, 3,\n"
        "19990611, 1800,  , TS, 28.0N,  94.8W,  35, 1007,\n"
        "19990611, 1800,  , TS, 28.5N,  94.5W,  35, 1007,\n"
        "19991311, 1800,  , TS, 28.0Q,  94.8W,  35, 1007,\n";
    auto r = hurdat2_parse(text);
    CHECK(r.diagnostics.size() == 2);
    CHECK(r.tracks[0].samples.size() == 1);
}

TEST_CASE("property: HURDAT parser never throws on mutated input") {
    Rng rng(77);
    const std::string base = kTwoStorms;
    const std::string alphabet = "0123456789NSEW,. -\n";
    for (int trial = 0; trial < 500; ++trial) {
        std::string s = base;
        const int edits = 1 + int(rng() % 8);
        for (int k = 0; k < edits; ++k) {
            const std::size_t pos = rng() % s.size();
            switch (rng() % 3) {
                case 0: s[pos] = alphabet[rng() % alphabet.size()]; break;
                case 1: s.erase(pos, 1 + rng() % 5); break;
                default: s.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
            }
            if (s.empty()) s = "x";
        }
        CHECK_NOTHROW(hurdat2_parse(s));
    }
}

TEST_CASE("track fields") {
    auto mesh = sample_sphere_patch(7 * kDeg, 67 * kDeg, -30 * kDeg, 120 * kDeg, 13, 31);
    auto sk = epsilon_graph(mesh, 0.35);
    auto fr = tangent_frames(mesh, sk, 2, 0.35);

    StormTrack one{"AL000000", "ONE", {}};
    one.samples.push_back({0, 30.0, -60.0, "", "TS", {}, {}});
    CHECK_THROWS_AS(track_to_field(one, fr, mesh), ValidationError);

    StormTrack still = one;
    still.samples.push_back({21600, 30.0, -60.0, "", "TS", {}, {}});
    CHECK(track_to_field(still, fr, mesh).values.norm() == 0.0);

    StormTrack two = one;
    two.samples.push_back({21600, 31.0, -61.0, "", "TS", {}, {}});
    VectorField f = track_to_field(two, fr, mesh);
    CHECK(nodal_support(f).size() == 1);
}

TEST_CASE("great-circle track lifts to its tangent direction") {
    auto mesh = sample_sphere_patch(7 * kDeg, 67 * kDeg, -30 * kDeg, 120 * kDeg, 13, 31);
    auto sk = epsilon_graph(mesh, 0.35);
    auto fr = tangent_frames(mesh, sk, 2, 0.35);
    const Eigen::Vector3d p = track_position(15.0, -80.0), q = track_position(55.0, -10.0);
    StormTrack t{"AL990000", "ARC", great_circle_track(p, q, 60)};
    VectorField f = track_to_field(t, fr, mesh);
    Matrix lifted = lift_to_ambient(fr, f);
    const Eigen::Vector3d axis = p.cross(q).normalized();
    double total = 0.0;
    int count = 0;
    for (int i : nodal_support(f)) {
        const Eigen::Vector3d y = mesh.point(i);
        const Eigen::Vector3d dir = axis.cross(y).normalized();
        const Eigen::Vector3d v = lifted.row(i).transpose();
        total += v.dot(dir) / v.norm();
        ++count;
    }
    REQUIRE(count > 5);
    CHECK(total / count >= 0.9);
}
