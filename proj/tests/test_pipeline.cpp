#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "te/errors.hpp"
#include "te/pipeline.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace te;

namespace {

PointCloud toy(std::uint64_t seed = 42) {
    return make_toy_clusters(seed, 100, toy_default_centers(), 0.6);
}

EmbedConfig toy_config(Method method) {
    EmbedConfig cfg;
    cfg.method = method;
    cfg.k = 50;
    cfg.sigma = 1.0;
    cfg.m = 2;
    cfg.seed = 42;
    // the default toy geometry keeps clusters apart; bridge them
    cfg.auto_connect = true;
    return cfg;
}

Eigen::Vector2d class_centroid(const RowMatrixXd& coords, const std::vector<int>& labels,
                               int cls) {
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    int count = 0;
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        if (labels[static_cast<std::size_t>(i)] != cls) continue;
        sum += coords.row(i).transpose();
        ++count;
    }
    return sum / count;
}

} // namespace

TEST_CASE("LE on three collinear points returns the lambda=1 pencil eigenvector") {
    PointCloud pc;
    pc.points.resize(3, 1);
    pc.points << 0.0, 1.0, 2.0;

    EmbedConfig cfg;
    cfg.method = Method::LE;
    cfg.k = 1;
    cfg.sigma = 1.0;
    cfg.m = 1;
    const Embedding emb = embed(pc, cfg);
    REQUIRE(emb.coords.cols() == 1);

    // The graph is P3 with equal weights w; pencil eigenvalues stay {0,1,2}.
    CHECK(emb.spectrum[1] == doctest::Approx(1.0).epsilon(1e-10));

    const WeightedGraph g = build_embedding_graph(pc, 1, 1.0, false);
    const auto [values, vectors] = testing::dense_pencil_oracle(build_le(g));
    const Eigen::VectorXd expected = vectors.col(1).normalized();
    const Eigen::VectorXd got = Eigen::VectorXd(emb.coords.col(0)).normalized();
    CHECK(std::abs(std::abs(expected.dot(got)) - 1.0) <= 1e-10);
}

TEST_CASE("TA with beta = 0 embeds identically to LE") {
    const PointCloud pc = toy(7);
    EmbedConfig le = toy_config(Method::LE);
    EmbedConfig ta = toy_config(Method::TA);
    ta.supervision.known_classes = {0};
    ta.supervision.beta = 0.0;
    CHECK(embed(pc, le).coords == embed(pc, ta).coords);
}

TEST_CASE("toy dataset: TG with a=10 on class 0 contracts it relative to LE") {
    const PointCloud pc = toy();

    const Embedding le = embed(pc, toy_config(Method::LE));

    EmbedConfig tg_cfg = toy_config(Method::TG);
    tg_cfg.supervision.known_classes = {0};
    tg_cfg.supervision.a_values = {10.0};
    const Embedding tg = embed(pc, tg_cfg);

    const double ratio = class_centroid(tg.coords, pc.labels, 0).norm() /
                         class_centroid(le.coords, pc.labels, 0).norm();
    CHECK(ratio < 0.5);
}

TEST_CASE("permutation equivariance of the embedding rows") {
    Rng rng(131);
    PointCloud pc;
    const int n = 60;
    pc.points.resize(n, 3);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < 3; ++c) pc.points(r, c) = rng.normal();

    EmbedConfig cfg;
    cfg.method = Method::LE;
    cfg.k = 8;
    cfg.sigma = 1.0;
    cfg.m = 3;
    const Embedding base = embed(pc, cfg);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    PointCloud shuffled;
    shuffled.points.resize(n, 3);
    for (int r = 0; r < n; ++r)
        shuffled.points.row(perm[static_cast<std::size_t>(r)]) = pc.points.row(r);
    const Embedding moved = embed(shuffled, cfg);

    for (int r = 0; r < n; ++r) {
        const Eigen::VectorXd a = base.coords.row(r);
        const Eigen::VectorXd b = moved.coords.row(perm[static_cast<std::size_t>(r)]);
        CHECK((a - b).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
}

TEST_CASE("uniform weight scaling leaves coordinates invariant up to sign") {
    Rng rng(137);
    const WeightedGraph g = testing::random_connected_graph(rng, 30);
    std::vector<Edge> scaled_edges = g.edges();
    for (Edge& e : scaled_edges) e.w *= 37.5;
    const WeightedGraph scaled(30, std::move(scaled_edges));

    const EigenResult base = smallest_pairs(build_le(g), 4);
    const EigenResult after = smallest_pairs(build_le(scaled), 4);
    // the pencil (T, D) scales on both sides: identical eigenvalues, and the
    // unit-XD normalization shrinks eigenvectors by exactly sqrt(c)
    CHECK((base.eigenvalues - after.eigenvalues).lpNorm<Eigen::Infinity>() <= 1e-9);
    for (int c = 0; c < 5; ++c) {
        const double diff_plus = (base.eigenvectors.col(c) -
                                  after.eigenvectors.col(c) * std::sqrt(37.5))
                                     .lpNorm<Eigen::Infinity>();
        const double diff_minus = (base.eigenvectors.col(c) +
                                   after.eigenvectors.col(c) * std::sqrt(37.5))
                                      .lpNorm<Eigen::Infinity>();
        CHECK(std::min(diff_plus, diff_minus) <= 1e-8);
    }
}

TEST_CASE("embedding columns are uncorrelated with the kernel vector") {
    const PointCloud pc = toy(3);
    EmbedConfig cfg = toy_config(Method::TG);
    cfg.supervision.known_classes = {0};
    cfg.supervision.a_values = {5.0};
    cfg.m = 4;
    const Embedding emb = embed(pc, cfg);

    const WeightedGraph g = build_embedding_graph(pc, cfg.k, cfg.sigma, true);
    SupervisionParams params = resolve_supervision(pc, cfg.supervision, Method::TG, g);
    const OperatorMatrix op = build_tg(g, params);
    const EigenResult pairs = smallest_pairs(op, cfg.m);

    const Eigen::VectorXd mass = op.X.array() * op.D.array();
    for (int c = 0; c < cfg.m; ++c) {
        const double corr = std::abs(
            Eigen::VectorXd(emb.coords.col(c)).dot(mass.asDiagonal() * pairs.eigenvectors.col(0)));
        CHECK(corr <= 1e-8);
    }
}

TEST_CASE("embed validates the configuration") {
    const PointCloud pc = toy(9);
    EmbedConfig cfg = toy_config(Method::TA);
    CHECK_THROWS_AS(embed(pc, cfg), ParameterError);  // no known class

    cfg = toy_config(Method::LE);
    cfg.sigma = 0.0;
    CHECK_THROWS_AS(embed(pc, cfg), ParameterError);

    cfg = toy_config(Method::TG);
    cfg.supervision.known_classes = {0};
    cfg.supervision.beta = 0.0;
    CHECK_THROWS_AS(embed(pc, cfg), ParameterError);  // no a-value, no beta

    cfg = toy_config(Method::SE);
    cfg.supervision.alpha_hat = 10.0;
    CHECK_THROWS_AS(embed(pc, cfg), ParameterError);  // potential needs a class
}

TEST_CASE("disconnected graphs: hard error or auto-connect repair") {
    PointCloud pc;
    pc.points.resize(6, 1);
    pc.points << 0.0, 0.1, 0.2, 100.0, 100.1, 100.2;

    EmbedConfig cfg;
    cfg.method = Method::LE;
    cfg.k = 1;
    cfg.sigma = 50.0;
    cfg.m = 1;
    CHECK_THROWS_WITH_AS(embed(pc, cfg), doctest::Contains("auto-connect"), ParameterError);

    cfg.auto_connect = true;
    const Embedding emb = embed(pc, cfg);
    CHECK(emb.coords.rows() == 6);

    const WeightedGraph repaired = build_embedding_graph(pc, 1, 50.0, true);
    const auto comp = connected_components(repaired);
    CHECK(*std::max_element(comp.begin(), comp.end()) == 0);
    // the bridge is the closest inter-blob pair (2, 3)
    bool bridge_found = false;
    for (const Edge& e : repaired.edges()) bridge_found |= (e.i == 2 && e.j == 3);
    CHECK(bridge_found);
}

TEST_CASE("supervision resolution: indicators, measure values, r policy") {
    const PointCloud pc = toy(21);
    const WeightedGraph g = build_embedding_graph(pc, 50, 1.0, true);

    SupervisionSpec spec;
    spec.known_classes = {0, 2};
    spec.a_values = {10.0, 0.5};
    spec.r_small = 0.5;
    spec.r_big = 100.0;
    spec.beta = 10.0;
    spec.alpha_hat = 10.0;

    const SupervisionParams se = resolve_supervision(pc, spec, Method::SE, g);
    CHECK(se.potential.sum() == 200.0);

    const SupervisionParams ta = resolve_supervision(pc, spec, Method::TA, g);
    CHECK(ta.mu.sum() == 200.0);

    const SupervisionParams te_params = resolve_supervision(pc, spec, Method::TE, g);
    for (std::size_t i = 0; i < 100; ++i) CHECK(te_params.a[static_cast<Eigen::Index>(i)] == 10.0);
    for (std::size_t i = 200; i < 300; ++i) CHECK(te_params.a[static_cast<Eigen::Index>(i)] == 0.5);
    for (std::size_t i = 100; i < 200; ++i) CHECK(te_params.a[static_cast<Eigen::Index>(i)] == 1.0);

    int big_edges = 0, small_edges = 0, neutral_edges = 0;
    for (int e = 0; e < g.edge_count(); ++e) {
        const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
        const int li = pc.labels[static_cast<std::size_t>(edge.i)];
        const int lj = pc.labels[static_cast<std::size_t>(edge.j)];
        const double r = te_params.r_overlay[static_cast<std::size_t>(e)];
        const bool ki = li == 0 || li == 2;
        const bool kj = lj == 0 || lj == 2;
        if (ki && kj && li == lj) {
            CHECK(r == 100.0);
            ++big_edges;
        } else if (ki && kj) {
            CHECK(r == 0.5);
            ++small_edges;
        } else {
            CHECK(r == 1.0);
            ++neutral_edges;
        }
    }
    CHECK(big_edges > 0);
    CHECK(neutral_edges > 0);

    // info_fraction < 1 reveals only part of the class
    spec.known_classes = {0};
    spec.a_values = {10.0};
    spec.info_fraction = 0.25;
    const SupervisionParams partial = resolve_supervision(pc, spec, Method::TG, g);
    CHECK((partial.a.array() == 10.0).count() == 25);

    // zero information: SE falls back to the plain Laplacian
    spec.info_fraction = 0.0;
    const SupervisionParams none = resolve_supervision(pc, spec, Method::SE, g);
    CHECK(none.alpha_hat == 0.0);
}

TEST_CASE("PCA: exact subspace recovery, isotropy, degenerate input") {
    Rng rng(139);
    PointCloud pc;
    const int n = 200;
    pc.points.resize(n, 5);
    // data spans a 2-D subspace of 5-D space
    for (int r = 0; r < n; ++r) {
        const double u = rng.normal(), v = rng.normal();
        pc.points(r, 0) = u;
        pc.points(r, 1) = 2 * u + v;
        pc.points(r, 2) = v;
        pc.points(r, 3) = u - v;
        pc.points(r, 4) = 3 * v;
    }
    const Embedding emb = embed_pca(pc, 2);
    // reconstruction from 2 components is exact
    const Eigen::MatrixXd centered = pc.points.rowwise() - pc.points.colwise().mean();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    CHECK(svd.singularValues()[2] <= 1e-10 * svd.singularValues()[0]);
    CHECK(emb.coords.rows() == n);
    CHECK(emb.spectrum.size() == 2);

    // isotropic cloud: singular values nearly equal
    PointCloud iso;
    iso.points.resize(5000, 4);
    for (int r = 0; r < 5000; ++r)
        for (int c = 0; c < 4; ++c) iso.points(r, c) = rng.normal();
    const Embedding iso_emb = embed_pca(iso, 4);
    CHECK(iso_emb.spectrum[0] / iso_emb.spectrum[3] < 1.2);

    // a repeated single point has zero variance and a zero embedding
    PointCloud constant;
    constant.points = RowMatrixXd::Ones(4, 3);
    const Embedding flat = embed_pca(constant, 2);
    CHECK(flat.coords.cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(embed_pca(pc, 6), ParameterError);
}

TEST_CASE("PCA embeddings are deterministic with the documented sign rule") {
    Rng rng(149);
    PointCloud pc;
    pc.points.resize(50, 3);
    for (int r = 0; r < 50; ++r)
        for (int c = 0; c < 3; ++c) pc.points(r, c) = rng.normal();
    const Embedding a = embed_pca(pc, 3);
    const Embedding b = embed_pca(pc, 3);
    CHECK(a.coords == b.coords);
}

TEST_CASE("spectral embeddings reproduce bit-for-bit under the dense solver") {
    const PointCloud pc = toy(55);
    EmbedConfig cfg = toy_config(Method::TG);
    cfg.supervision.known_classes = {1};
    cfg.supervision.a_values = {4.0};
    const Embedding a = embed(pc, cfg);
    const Embedding b = embed(pc, cfg);
    CHECK(a.coords == b.coords);
    CHECK(a.spectrum == b.spectrum);
}
