#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "te/errors.hpp"
#include "te/graph.hpp"
#include "te/rng.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

using namespace te;

namespace {

PointCloud cloud_1d(std::initializer_list<double> xs) {
    PointCloud pc;
    pc.points.resize(static_cast<Eigen::Index>(xs.size()), 1);
    Eigen::Index r = 0;
    for (double x : xs) pc.points(r++, 0) = x;
    return pc;
}

} // namespace

TEST_CASE("knn: collinear 0,1,3 with k=1 keeps the OR edge") {
    const auto edges = knn_edges(cloud_1d({0, 1, 3}), 1);
    CHECK(edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
}

TEST_CASE("knn: k = n-1 gives the complete graph") {
    const auto edges = knn_edges(cloud_1d({0, 1, 3, 10}), 3);
    CHECK(edges.size() == 6);
}

TEST_CASE("knn: distance tie resolved to the lower index") {
    const auto edges = knn_edges(cloud_1d({0, 0, 5}), 1);
    // point 2 is equidistant from 0 and 1; it must pick 0
    CHECK(edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}});
}

TEST_CASE("knn: AND mode keeps only mutual pairs") {
    // 2's nearest is 1, but 1's nearest is 0
    const auto edges = knn_edges(cloud_1d({0, 1, 3}), 1, {KnnMode::And, 20000});
    CHECK(edges == std::vector<std::pair<int, int>>{{0, 1}});
}

TEST_CASE("knn: parameter validation") {
    CHECK_THROWS_AS(knn_edges(cloud_1d({0, 1, 3}), 3), ParameterError);
    CHECK_THROWS_AS(knn_edges(cloud_1d({0, 1, 3}), 0), ParameterError);
}

TEST_CASE("knn: vantage-point path agrees with brute force") {
    Rng rng(11);
    PointCloud pc;
    const int n = 257;
    pc.points.resize(n, 6);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < 6; ++c) pc.points(r, c) = rng.normal();

    KnnOptions brute;
    brute.brute_force_limit = 100000;
    KnnOptions tree;
    tree.brute_force_limit = 1;  // force the index path
    for (int k : {1, 4, 12}) {
        CHECK(knn_edges(pc, k, brute) == knn_edges(pc, k, tree));
    }
}

TEST_CASE("knn: invariant under point permutation up to relabeling") {
    Rng rng(5);
    PointCloud pc;
    const int n = 40;
    pc.points.resize(n, 3);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < 3; ++c) pc.points(r, c) = rng.normal();

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    PointCloud shuffled;
    shuffled.points.resize(n, 3);
    for (int r = 0; r < n; ++r) shuffled.points.row(perm[static_cast<std::size_t>(r)]) = pc.points.row(r);

    auto base = knn_edges(pc, 5);
    for (auto& [i, j] : base) {
        int a = perm[static_cast<std::size_t>(i)], b = perm[static_cast<std::size_t>(j)];
        i = std::min(a, b);
        j = std::max(a, b);
    }
    std::sort(base.begin(), base.end());
    CHECK(base == knn_edges(shuffled, 5));
}

TEST_CASE("heat weights: formula cases") {
    PointCloud pc;
    pc.points.resize(3, 2);
    pc.points << 0, 0, 0, 0, 1, 1;  // points 0 and 1 coincide; 2 at distance sqrt(2)

    const WeightedGraph g = heat_weights({{0, 1}, {1, 2}}, pc, 1.0);
    CHECK(g.edges()[0].w == 1.0);
    CHECK(g.edges()[1].w == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

    CHECK_THROWS_AS(heat_weights({{0, 1}}, pc, 0.0), ParameterError);
}

TEST_CASE("heat weights: strictly decreasing in distance") {
    PointCloud pc;
    pc.points.resize(4, 1);
    pc.points << 0, 1, 2.5, 7;
    const WeightedGraph g = heat_weights({{0, 1}, {0, 2}, {0, 3}}, pc, 1.3);
    CHECK(g.edges()[0].w > g.edges()[1].w);
    CHECK(g.edges()[1].w > g.edges()[2].w);
}

TEST_CASE("connected components") {
    CHECK(connected_components(testing::unit_p3()) == std::vector<int>{0, 0, 0});
    CHECK(connected_components(WeightedGraph(3, {})) == std::vector<int>{0, 1, 2});
    const WeightedGraph two_triangles(
        6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});
    CHECK(connected_components(two_triangles) == std::vector<int>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("degrees") {
    CHECK(testing::unit_p3().degrees() == Eigen::Vector3d(1, 2, 1));
    CHECK(WeightedGraph(2, {}).degrees() == Eigen::Vector2d(0, 0));
    const WeightedGraph tri(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
    CHECK(tri.degrees() == Eigen::Vector3d(2, 2, 2));
}

TEST_CASE("divergence: hand cases") {
    const WeightedGraph p3 = testing::unit_p3();
    EdgeFunction f;
    f.parity = EdgeFunction::Parity::Antisymmetric;
    f.values = {1.0, 2.0};
    CHECK(divergence(f, p3) == Eigen::Vector3d(1, 1, -2));

    f.values = {0.0, 0.0};
    CHECK(divergence(f, p3) == Eigen::Vector3d(0, 0, 0));

    const WeightedGraph tri(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
    EdgeFunction ones;
    ones.parity = EdgeFunction::Parity::Symmetric;
    ones.values = {1.0, 1.0, 1.0};
    CHECK(divergence(ones, tri) == Eigen::Vector3d(2, 2, 2));
}

TEST_CASE("gradient: hand cases and linearity in w") {
    const WeightedGraph p3 = testing::unit_p3();
    const EdgeFunction grad = gradient(Eigen::Vector3d(0, 1, 0), p3);
    CHECK(grad.parity == EdgeFunction::Parity::Antisymmetric);
    CHECK(grad.values == std::vector<double>{1.0, -1.0});

    CHECK(gradient(Eigen::Vector3d::Constant(5.0), p3).values == std::vector<double>{0.0, 0.0});

    const WeightedGraph doubled(3, {{0, 1, 2.0}, {1, 2, 2.0}});
    const EdgeFunction grad2 = gradient(Eigen::Vector3d(0, 1, 0), doubled);
    CHECK(grad2.values == std::vector<double>{2.0, -2.0});

    CHECK_THROWS_AS(gradient(Eigen::Vector2d(0, 1), p3), ShapeError);
}

TEST_CASE("laplacian: hand case, zero case, constant kernel") {
    Eigen::Matrix3d expected;
    expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK(Eigen::MatrixXd(testing::unit_p3().laplacian()) == expected);

    CHECK(Eigen::MatrixXd(WeightedGraph(2, {}).laplacian()) == Eigen::Matrix2d::Zero());

    Rng rng(3);
    const WeightedGraph g = testing::random_connected_graph(rng, 17);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(17);
    CHECK((g.laplacian() * ones).lpNorm<Eigen::Infinity>() <=
          1e-15 * g.degrees().maxCoeff());
}

TEST_CASE("duality of divergence and gradient on random graphs") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_below(19));
        const WeightedGraph g = testing::random_connected_graph(rng, n);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = rng.normal();
        EdgeFunction f;
        f.parity = EdgeFunction::Parity::Antisymmetric;
        for (int e = 0; e < g.edge_count(); ++e) f.values.push_back(rng.normal());

        // <y, div f> = -sum_{i<j} f(i,j) (grad y)_ij / w_ij
        const double lhs = y.dot(divergence(f, g));
        const EdgeFunction grad = gradient(y, g);
        double rhs = 0.0;
        for (int e = 0; e < g.edge_count(); ++e)
            rhs -= f.values[static_cast<std::size_t>(e)] *
                   grad.values[static_cast<std::size_t>(e)] /
                   g.edges()[static_cast<std::size_t>(e)].w;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("divergence of gradient is -L y") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_below(19));
        const WeightedGraph g = testing::random_connected_graph(rng, n);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = rng.normal();
        const Eigen::VectorXd delta = divergence(gradient(y, g), g);
        const Eigen::VectorXd ly = g.laplacian() * y;
        CHECK((delta + ly).lpNorm<Eigen::Infinity>() <=
              1e-13 * std::max(1.0, ly.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("edge action matches the centered discretization") {
    const WeightedGraph p3 = testing::unit_p3();
    EdgeFunction v;
    v.parity = EdgeFunction::Parity::Antisymmetric;
    v.values = {2.0, -4.0};
    const EdgeFunction acted = edge_action(v, Eigen::Vector3d(1, 3, 5), p3);
    CHECK(acted.values == std::vector<double>{(1 + 3) / 2.0 * 2.0, (3 + 5) / 2.0 * -4.0});
}

TEST_CASE("graph construction rejects bad edges") {
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 0, 1.0}}), ParameterError);
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 5, 1.0}}), BoundsError);
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, -1.0}}), ParameterError);
    CHECK_THROWS_AS(WeightedGraph(3, {{0, 1, 1.0}, {1, 0, 1.0}}), ParameterError);
}

TEST_CASE("edge list round trip") {
    Rng rng(8);
    const WeightedGraph g = testing::random_connected_graph(rng, 12);
    const auto path = std::filesystem::temp_directory_path() / "te_edges.txt";
    save_edge_list(path.string(), g);
    const WeightedGraph back = load_edge_list(path.string());
    std::filesystem::remove(path);
    REQUIRE(back.size() == g.size());
    REQUIRE(back.edge_count() == g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        CHECK(back.edges()[static_cast<std::size_t>(e)].i == g.edges()[static_cast<std::size_t>(e)].i);
        CHECK(back.edges()[static_cast<std::size_t>(e)].w ==
              doctest::Approx(g.edges()[static_cast<std::size_t>(e)].w).epsilon(1e-15));
    }
}
