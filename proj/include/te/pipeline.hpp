#pragma once

#include "te/data.hpp"
#include "te/eigensolve.hpp"
#include "te/graph.hpp"
#include "te/operators.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace te {

enum class Method { PCA, LE, SE, TA, TG, TE };

Method method_from_string(const std::string& name);
std::string method_name(Method m);

/// Class-level supervision policy: which classes are known, how strongly,
/// and how much of each class's ground truth is revealed. Resolution into
/// per-node vectors happens once the graph exists.
struct SupervisionSpec {
    std::vector<int> known_classes;
    std::vector<double> a_values;   // parallel to known_classes; defaults apply when empty
    double beta = 0.0;
    double alpha_hat = 0.0;
    double r_small = 0.9;
    double r_big = 1e4;
    /// Fraction of each known class revealed as supervision (1 = all of it).
    double info_fraction = 1.0;
    std::uint64_t subset_seed = 0;
};

struct EmbedConfig {
    Method method = Method::LE;
    int k = 12;
    double sigma = 1.0;
    int m = 50;
    SupervisionSpec supervision;
    std::uint64_t seed = 0;
    bool auto_connect = false;
    KnnMode knn_mode = KnnMode::Or;
    EigenOptions eigen;
};

struct Embedding {
    RowMatrixXd coords;         // n x m, row i = [u^1_i, ..., u^m_i]
    EmbedConfig config;
    Eigen::VectorXd spectrum;   // m+1 pencil eigenvalues; top-m singular values for PCA
};

/// kNN graph + heat weights + connectivity handling in one step. With
/// auto_connect set, disconnected results are repaired by inserting the
/// shortest inter-component edge until one component remains; otherwise
/// disconnection is a hard error.
WeightedGraph build_embedding_graph(const PointCloud& pc, int k, double sigma,
                                    bool auto_connect, KnnMode mode = KnnMode::Or);

/// Turn the class-level policy into per-node operator parameters for the
/// given method. Known-node indicators feed V (SE) and mu (TA); measure
/// modifiers a (TG/TE) take the per-class values (fallback: beta for TG,
/// 10/20/... for TE); TE edges get r_big within a known class, r_small
/// across two known classes, 1 whenever an endpoint is unknown.
SupervisionParams resolve_supervision(const PointCloud& pc, const SupervisionSpec& spec,
                                      Method method, const WeightedGraph& g);

/// Steps 1-4: graph, weights, operator, generalized eigenvectors, drop u^0.
Embedding embed(const PointCloud& pc, const EmbedConfig& cfg);

/// Linear baseline: mean-centered projection onto the top-m right singular
/// directions, sign fixed by the largest-magnitude component.
Embedding embed_pca(const PointCloud& pc, int m);

/// Embedding CSV: n rows, m columns, optional trailing label column.
void save_embedding_csv(const std::string& path, const Embedding& embedding,
                        const std::vector<int>* labels = nullptr);

} // namespace te
