#pragma once

#include "te/point_cloud.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace te {

/// One undirected edge, stored once with i < j and positive weight.
struct Edge {
    int i;
    int j;
    double w;
};

/// Sparse symmetric weighted graph. Edges are kept sorted by (i, j); a CSR
/// adjacency over both directions supports per-node iteration.
class WeightedGraph {
public:
    struct Half {
        int to;
        int edge;      // index into edges()
    };

    WeightedGraph() = default;
    WeightedGraph(int n, std::vector<Edge> edges);

    int size() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Half-edges leaving node i.
    const Half* neighbors_begin(int i) const { return adj_.data() + offsets_[i]; }
    const Half* neighbors_end(int i) const { return adj_.data() + offsets_[i + 1]; }
    int degree_count(int i) const { return offsets_[i + 1] - offsets_[i]; }

    Eigen::VectorXd degrees() const;                  // d_ii = sum_j w_ij
    Eigen::SparseMatrix<double> adjacency() const;    // W
    Eigen::SparseMatrix<double> laplacian() const;    // D - W

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<int> offsets_;
    std::vector<Half> adj_;
};

/// Function on the edges of a graph, symmetric (r-like) or antisymmetric
/// (v-like). Values align with WeightedGraph::edges() order and are stored
/// for the i < j direction; the antisymmetric mirror carries a sign flip.
struct EdgeFunction {
    enum class Parity { Symmetric, Antisymmetric };

    Parity parity = Parity::Symmetric;
    std::vector<double> values;

    /// Value in the direction from -> to along stored edge `edge_index`.
    double directed(int edge_index, bool forward) const {
        const double v = values[static_cast<std::size_t>(edge_index)];
        return (forward || parity == Parity::Symmetric) ? v : -v;
    }
};

enum class KnnMode { Or, And };

struct KnnOptions {
    KnnMode mode = KnnMode::Or;
    /// Brute-force search up to this many points; a vantage-point tree above.
    /// Both paths are exact and share the (distance, index) tie rule.
    int brute_force_limit = 20000;
};

/// kNN edge set under Euclidean distance. An edge (i, j) exists iff i is among
/// the k nearest of j or (Or mode) / and (And mode) j among the k nearest of i.
/// Ties broken by smaller index. Pairs returned with i < j, sorted.
std::vector<std::pair<int, int>> knn_edges(const PointCloud& pc, int k,
                                           const KnnOptions& options = {});

/// Weight each edge by the heat kernel exp(-||x_i - x_j||^2 / (2 sigma^2)).
WeightedGraph heat_weights(const std::vector<std::pair<int, int>>& edges,
                           const PointCloud& pc, double sigma);

/// Contiguous component labels, lowest-index representative first.
std::vector<int> connected_components(const WeightedGraph& g);

/// Row sums of an edge function: div(f)_i = sum_j f(i, j).
Eigen::VectorXd divergence(const EdgeFunction& f, const WeightedGraph& g);

/// (grad y)_ij = (y_j - y_i) w_ij; antisymmetric by construction.
EdgeFunction gradient(const Eigen::VectorXd& y, const WeightedGraph& g);

/// (A f)_ij = (f_i + f_j)/2 * A_ij, the centered edge action of A on f.
EdgeFunction edge_action(const EdgeFunction& a, const Eigen::VectorXd& f,
                         const WeightedGraph& g);

/// Text export, one "i j w" line per edge.
void save_edge_list(const std::string& path, const WeightedGraph& g);
WeightedGraph load_edge_list(const std::string& path);

} // namespace te
