#include "doctest.h"
#include "oracles.hpp"

#include "cgot/manifold.hpp"
#include "cgot/toolkit.hpp"

#include <cmath>
#include <numbers>

using namespace cgot;
using namespace cgot::testing;

TEST_CASE("pseudo-dirac examples") {
    VectorField f = pseudo_dirac(4, 2, 0, 0);
    CHECK(f(0, 0) == 1.0);
    for (int i = 1; i < 4; ++i) CHECK(f(i, 0) == 0.0);
    for (int i = 0; i < 4; ++i) CHECK(f(i, 1) == 0.25);
    CHECK(f.is_density());
    VectorField one = pseudo_dirac(3, 1, 2, 0);
    CHECK(one.values == dirac(3, 2).values);
    CHECK_THROWS_AS(pseudo_dirac(4, 2, 4, 0), ValidationError);
    CHECK_THROWS_AS(pseudo_dirac(4, 2, 0, 2), ValidationError);
}

TEST_CASE("nodal support") {
    CHECK(nodal_support(VectorField(4, 2)).empty());
    VectorField f(4, 2);
    f(2, 1) = 0.5;
    f(0, 0) = 1e-12;
    auto s = nodal_support(f);
    REQUIRE(s.size() == 1);
    CHECK(s[0] == 2);
    CHECK(nodal_support(f, 0.0).size() == 2);
}

TEST_CASE("edge rings on a path") {
    auto g = ConnectionGraph::trivial(4, 1, {{0, 1}, {1, 2}, {2, 3}});
    auto r = edge_rings(g, {0});
    CHECK(r.ring == std::vector<int>{0, 1, 2});
    CHECK(r.max_ring() == 2);
    auto d1 = r.disk(1);
    CHECK(d1 == std::vector<bool>{true, false, false});
    CHECK(r.disk(0) == std::vector<bool>{false, false, false});
    auto all = edge_rings(g, {0, 1, 2, 3});
    CHECK(all.ring == std::vector<int>{0, 0, 0});
    CHECK_THROWS_AS(edge_rings(g, {}), ValidationError);
}

TEST_CASE("hop diameter") {
    CHECK(hop_diameter(ConnectionGraph::trivial(4, 1, {{0, 1}, {1, 2}, {2, 3}})) == 3);
    CHECK(hop_diameter(flipped_diamond()) == 2);
}

TEST_CASE("interpolation endpoints") {
    auto g = ConnectionGraph::trivial(4, 2, {{0, 1}, {1, 2}, {2, 3}});
    VectorField a = pseudo_dirac(4, 2, 0, 0), b = pseudo_dirac(4, 2, 3, 1);
    EdgeFlow J = tree_flow(g, a - b);
    auto rings = edge_rings(g, nodal_support(a));
    const int K = hop_diameter(g) + 1;
    auto t = interpolate_trajectory(g, a, J, rings, K);
    REQUIRE(int(t.states.size()) == K + 1);
    CHECK(t.states[0].values == a.values);
    CHECK((t.states[K].values - b.values).cwiseAbs().maxCoeff() < 1e-12);
    // trivial connection: per-channel mass is conserved along the way
    for (const auto& s : t.states) CHECK((s.channel_sums() - a.channel_sums()).norm() < 1e-12);
    CHECK(t.residual.back() < 1e-12);
}

TEST_CASE("property: interpolation monotone residual on random graphs") {
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = random_graph(8, 2, 0, ConnectionKind::Random, rng);
        VectorField a = orthogonalize(random_field(8, 2, rng), kernel_numeric(g).as_matrix(8, 2));
        VectorField b(8, 2);
        EdgeFlow J = tree_flow(g, a - b);
        auto rings = edge_rings(g, {int(rng() % 8)});
        auto t = interpolate_trajectory(g, a, J, rings, rings.max_ring() + 1);
        CHECK((t.states.back().values - b.values).norm() < 1e-10);
    }
}

TEST_CASE("active edges") {
    EdgeFlow zero(4, 1);
    CHECK(active_edges(zero, 0.0).empty());
    EdgeFlow J(4, 1);
    J.values << 0.25, 0.75, -0.25, 0.75;
    CHECK(active_edges(J, 0.5) == std::vector<int>{1, 3});
    CHECK(active_edges(J, 0.0).size() == 4);
    Rng rng(3);
    EdgeFlow R(30, 2, random_field(30, 2, rng).values);
    auto big = active_edges(R, 1.0), small = active_edges(R, 0.3);
    for (int e : big) CHECK(std::find(small.begin(), small.end(), e) != small.end());
}

TEST_CASE("distance matrix") {
    Rng rng(4);
    auto g = random_graph(6, 2, 4, ConnectionKind::Consistent, rng);
    std::vector<VectorField> fields;
    for (int k = 0; k < 4; ++k) fields.push_back(random_density(6, 2, rng));
    fields.push_back(fields[0]);
    DistanceOptions o;
    o.solve.lambda = 0.5;
    o.solve.max_epochs = 200000;
    auto a = distance_matrix(g, fields, o);
    CHECK(a.unconverged == 0);
    for (int i = 0; i < 5; ++i) {
        CHECK(a.values(i, i) == 0.0);
        for (int j = 0; j < 5; ++j) CHECK(a.values(i, j) == a.values(j, i));
    }
    CHECK(a.values(0, 4) == 0.0);
    o.jobs = 3;
    auto b = distance_matrix(g, fields, o);
    CHECK(a.values == b.values);

    auto inf = distance_matrix(flipped_path(), {dirac(3, 0), dirac(3, 2)});
    CHECK(std::isinf(inf.values(0, 1)));
    Matrix aff = affinity_from_distance(inf.values);
    CHECK(aff(0, 1) == 0.0);
    CHECK(aff(0, 0) == 1.0);
}

TEST_CASE("spectral clustering on block affinities") {
    Matrix a = Matrix::Constant(6, 6, 0.01);
    a.topLeftCorner(3, 3).setConstant(1.0);
    a.bottomRightCorner(3, 3).setConstant(1.0);
    auto r = spectral_cluster(a, 2);
    CHECK(r.labels == std::vector<int>{0, 0, 0, 1, 1, 1});
    auto again = spectral_cluster(a, 2);
    CHECK(again.labels == r.labels);

    auto id = spectral_cluster(Matrix::Identity(4, 4), 4);
    std::set<int> distinct(id.labels.begin(), id.labels.end());
    CHECK(distinct.size() == 4);

    Matrix asym = a;
    asym(0, 5) = 0.5;
    CHECK_THROWS_AS(spectral_cluster(asym, 2), ValidationError);
    CHECK_THROWS_AS(spectral_cluster(-a, 2), ValidationError);
}

TEST_CASE("property: kmeans labels are deterministic for a seed") {
    Rng rng(14);
    Matrix pts(40, 2);
    std::normal_distribution<double> nd;
    for (int i = 0; i < 40; ++i) pts.row(i) << nd(rng) + (i % 2) * 8, nd(rng);
    ClusterOptions o;
    o.seed = 77;
    auto a = kmeans(pts, 2, o), b = kmeans(pts, 2, o);
    CHECK(a.labels == b.labels);
    for (int i = 0; i < 40; ++i) CHECK(a.labels[i] == a.labels[i % 2]);
}

TEST_CASE("clustering of localized tangent fields on a sphere patch") {
    constexpr double deg = std::numbers::pi / 180.0;
    auto mesh = sample_sphere_patch(10 * deg, 60 * deg, -20 * deg, 60 * deg, 6, 9);
    const double eps = 0.45;
    auto sk = epsilon_graph(mesh, eps);
    REQUIRE(sk.connected);
    auto fr = tangent_frames(mesh, sk, 2, eps);
    auto g = procrustes_connection(fr, sk).graph;

    // three groups, each a bump around a different center, with small perturbations
    const std::vector<Eigen::Vector3d> centers = {sphere_point(15 * deg, -10 * deg), sphere_point(35 * deg, 20 * deg),
                                                  sphere_point(55 * deg, 50 * deg)};
    Rng rng(21);
    std::normal_distribution<double> nd(0.0, 0.05);
    std::vector<VectorField> fields;
    for (int grp = 0; grp < 3; ++grp)
        for (int rep = 0; rep < 3; ++rep) {
            Matrix amb = Matrix::Zero(mesh.n(), 3);
            for (int i = 0; i < mesh.n(); ++i) {
                const double dist = (mesh.point(i) - centers[grp]).norm();
                if (dist < 0.3) amb.row(i) = Eigen::RowVector3d(1 + nd(rng), nd(rng), 1 + nd(rng));
            }
            fields.push_back(project_feasible(g, project_to_tangent(fr, amb), {2, 0}));
        }
    DistanceOptions o;
    o.solve.lambda = g.max_weight();
    o.solve.max_epochs = 100000;
    o.solve.grad_tol = 1e-6;
    auto D = distance_matrix(g, fields, o);
    const double gamma = 1.0 / (D.values.maxCoeff() * 0.2);
    auto r = spectral_cluster(affinity_from_distance(D.values, gamma), 3);
    CHECK(r.labels == std::vector<int>{0, 0, 0, 1, 1, 1, 2, 2, 2});
}
