#include "te/pipeline.hpp"

#include "te/errors.hpp"
#include "te/rng.hpp"
#include "te/simd/distance.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace te {

Method method_from_string(const std::string& name) {
    std::string lower;
    for (char c : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "pca") return Method::PCA;
    if (lower == "le") return Method::LE;
    if (lower == "se") return Method::SE;
    if (lower == "ta") return Method::TA;
    if (lower == "tg") return Method::TG;
    if (lower == "te") return Method::TE;
    throw ParameterError("unknown method '" + name + "' (expected pca/le/se/ta/tg/te)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::PCA: return "pca";
        case Method::LE: return "le";
        case Method::SE: return "se";
        case Method::TA: return "ta";
        case Method::TG: return "tg";
        case Method::TE: return "te";
    }
    return "?";
}

namespace {

/// Union-find over nodes for the auto-connect repair.
struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        return true;
    }
};

} // namespace

WeightedGraph build_embedding_graph(const PointCloud& pc, int k, double sigma,
                                    bool auto_connect, KnnMode mode) {
    KnnOptions opts;
    opts.mode = mode;
    auto edges = knn_edges(pc, k, opts);
    WeightedGraph g = heat_weights(edges, pc, sigma);

    const auto comp = connected_components(g);
    const int n_comp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    if (n_comp <= 1) return g;
    if (!auto_connect)
        throw ParameterError("kNN graph has " + std::to_string(n_comp) +
                             " connected components; increase k or enable auto-connect");

    // Bridge components greedily by the globally shortest inter-component
    // pair, re-weighted with the same heat kernel.
    Dsu dsu(g.size());
    for (const auto& [i, j] : edges) dsu.unite(i, j);
    const auto d = static_cast<std::size_t>(pc.dim());
    int remaining = n_comp;
    while (remaining > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::pair<int, int> best_pair{-1, -1};
        for (int i = 0; i < g.size(); ++i) {
            const double* ri = pc.points.row(i).data();
            for (int j = i + 1; j < g.size(); ++j) {
                if (dsu.find(i) == dsu.find(j)) continue;
                const double dist = simd::squared_distance(ri, pc.points.row(j).data(), d);
                if (dist < best) {
                    best = dist;
                    best_pair = {i, j};
                }
            }
        }
        edges.push_back(best_pair);
        dsu.unite(best_pair.first, best_pair.second);
        --remaining;
    }
    std::sort(edges.begin(), edges.end());
    return heat_weights(edges, pc, sigma);
}

SupervisionParams resolve_supervision(const PointCloud& pc, const SupervisionSpec& spec,
                                      Method method, const WeightedGraph& g) {
    SupervisionParams params;
    params.beta = spec.beta;
    params.alpha_hat = spec.alpha_hat;
    if (method == Method::LE || method == Method::PCA) return params;

    if (!spec.a_values.empty() && spec.a_values.size() != spec.known_classes.size())
        throw ParameterError("a-value list must pair with the known-class list");

    const int n = g.size();
    // known[i] = index into known_classes, or -1.
    std::vector<int> known(static_cast<std::size_t>(n), -1);
    for (std::size_t c = 0; c < spec.known_classes.size(); ++c) {
        const int cls = spec.known_classes[c];
        std::vector<std::uint8_t> mask;
        if (spec.info_fraction >= 1.0) {
            if (!pc.has_labels()) throw MappingError("supervision requires labels");
            mask.assign(pc.labels.size(), 0);
            bool any = false;
            for (std::size_t i = 0; i < pc.labels.size(); ++i)
                if (pc.labels[i] == cls) mask[i] = 1, any = true;
            if (!any) throw MappingError("class " + std::to_string(cls) + " not present in labels");
        } else {
            mask = supervision_subset(pc, cls, spec.info_fraction,
                                      derive_seed(spec.subset_seed, static_cast<std::uint64_t>(c)));
        }
        for (int i = 0; i < n; ++i)
            if (mask[static_cast<std::size_t>(i)]) known[static_cast<std::size_t>(i)] =
                static_cast<int>(c);
    }

    switch (method) {
        case Method::SE: {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < n; ++i)
                if (known[static_cast<std::size_t>(i)] >= 0) v[i] = 1.0;
            // At zero revealed information the potential vanishes; fall back
            // to the plain Laplacian instead of dividing by tr(V) = 0.
            if (v.sum() == 0.0) params.alpha_hat = 0.0;
            else params.potential = v;
            break;
        }
        case Method::TA: {
            Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
            for (int i = 0; i < n; ++i)
                if (known[static_cast<std::size_t>(i)] >= 0) mu[i] = 1.0;
            params.mu = mu;
            break;
        }
        case Method::TG:
        case Method::TE: {
            Eigen::VectorXd a = Eigen::VectorXd::Ones(n);
            for (int i = 0; i < n; ++i) {
                const int c = known[static_cast<std::size_t>(i)];
                if (c < 0) continue;
                if (!spec.a_values.empty()) a[i] = spec.a_values[static_cast<std::size_t>(c)];
                else if (method == Method::TG) a[i] = spec.beta;
                else a[i] = 10.0 * static_cast<double>(c + 1);
            }
            params.a = a;
            if (method == Method::TE) {
                params.r_overlay.assign(static_cast<std::size_t>(g.edge_count()), 1.0);
                for (int e = 0; e < g.edge_count(); ++e) {
                    const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
                    const int ci = known[static_cast<std::size_t>(edge.i)];
                    const int cj = known[static_cast<std::size_t>(edge.j)];
                    if (ci < 0 || cj < 0) continue;
                    params.r_overlay[static_cast<std::size_t>(e)] =
                        ci == cj ? spec.r_big : spec.r_small;
                }
            }
            break;
        }
        default:
            break;
    }
    return params;
}

namespace {

void validate_config(const PointCloud& pc, const EmbedConfig& cfg) {
    if (cfg.k < 1) throw ParameterError("k must be >= 1");
    if (!(cfg.sigma > 0.0)) throw ParameterError("sigma must be positive");
    if (cfg.m < 1) throw ParameterError("m must be >= 1");
    const auto& sup = cfg.supervision;
    switch (cfg.method) {
        case Method::SE:
            if (sup.alpha_hat > 0.0 && sup.known_classes.empty())
                throw ParameterError("SE with alpha_hat > 0 needs at least one known class");
            break;
        case Method::TA:
            if (sup.known_classes.empty())
                throw ParameterError("TA needs a known class to build the advection field");
            break;
        case Method::TG:
            if (sup.known_classes.empty())
                throw ParameterError("TG needs a known class to set the measure modifiers");
            if (sup.a_values.empty() && !(sup.beta > 0.0))
                throw ParameterError("TG needs a positive beta (or explicit a-values)");
            break;
        case Method::TE:
            if (sup.known_classes.empty())
                throw ParameterError("TE needs known classes for the r policy");
            if (!(sup.r_small > 0.0) || !(sup.r_big > 0.0))
                throw ParameterError("TE weight modifiers must be positive");
            break;
        default:
            break;
    }
    if (!sup.known_classes.empty() && !pc.has_labels())
        throw MappingError("known classes given but the point cloud has no labels");
}

} // namespace

Embedding embed(const PointCloud& pc, const EmbedConfig& cfg) {
    pc.validate();
    validate_config(pc, cfg);
    if (cfg.method == Method::PCA) {
        Embedding out = embed_pca(pc, cfg.m);
        out.config = cfg;
        return out;
    }

    WeightedGraph g;
    try {
        g = build_embedding_graph(pc, cfg.k, cfg.sigma, cfg.auto_connect, cfg.knn_mode);
    } catch (const Error& err) {
        throw ParameterError("[graph] " + std::string(err.what()));
    }

    const SupervisionParams params = resolve_supervision(pc, cfg.supervision, cfg.method, g);
    OperatorMatrix op;
    switch (cfg.method) {
        case Method::LE: op = build_le(g); break;
        case Method::SE: op = build_se(g, params); break;
        case Method::TA: op = build_ta(g, params); break;
        case Method::TG: op = build_tg(g, params); break;
        case Method::TE: op = build_te(g, params); break;
        default: throw ParameterError("unreachable method");
    }

    EigenOptions eig = cfg.eigen;
    eig.seed = derive_seed(cfg.seed, 0xe16);
    const EigenResult pairs = smallest_pairs(op, cfg.m, eig);

    Embedding out;
    out.config = cfg;
    out.spectrum = pairs.eigenvalues;
    out.coords.resize(pc.size(), cfg.m);
    // Column k of the embedding is generalized eigenvector u^{k+1}; u^0 is dropped.
    for (int c = 0; c < cfg.m; ++c) out.coords.col(c) = pairs.eigenvectors.col(c + 1);
    return out;
}

Embedding embed_pca(const PointCloud& pc, int m) {
    pc.validate();
    if (m < 1) throw ParameterError("m must be >= 1");
    if (m > pc.dim())
        throw ParameterError("PCA with m = " + std::to_string(m) + " exceeds data dimension " +
                             std::to_string(pc.dim()));

    const Eigen::MatrixXd centered =
        pc.points.rowwise() - pc.points.colwise().mean();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    Eigen::MatrixXd directions = svd.matrixV().leftCols(m);
    for (int c = 0; c < m; ++c) {
        Eigen::Index arg = 0;
        directions.col(c).cwiseAbs().maxCoeff(&arg);
        if (directions(arg, c) < 0.0) directions.col(c) = -directions.col(c);
    }

    Embedding out;
    out.config.method = Method::PCA;
    out.config.m = m;
    out.coords = centered * directions;
    out.spectrum = svd.singularValues().head(m);
    return out;
}

void save_embedding_csv(const std::string& path, const Embedding& embedding,
                        const std::vector<int>* labels) {
    save_point_csv(path, embedding.coords, labels);
}

} // namespace te
