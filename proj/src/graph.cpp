#include "te/graph.hpp"

#include "te/errors.hpp"
#include "te/simd/distance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>

namespace te {

WeightedGraph::WeightedGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 1) throw ParameterError("graph needs at least one node");
    for (auto& e : edges_) {
        if (e.i == e.j) throw ParameterError("self-loop at node " + std::to_string(e.i));
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= n_)
            throw BoundsError("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                              ") outside [0, " + std::to_string(n_) + ")");
        if (!(e.w > 0.0) || !std::isfinite(e.w))
            throw ParameterError("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                 ") has nonpositive weight");
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    for (std::size_t e = 1; e < edges_.size(); ++e) {
        if (edges_[e - 1].i == edges_[e].i && edges_[e - 1].j == edges_[e].j)
            throw ParameterError("duplicate edge (" + std::to_string(edges_[e].i) + ", " +
                                 std::to_string(edges_[e].j) + ")");
    }

    offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& e : edges_) {
        ++offsets_[static_cast<std::size_t>(e.i) + 1];
        ++offsets_[static_cast<std::size_t>(e.j) + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adj_.resize(static_cast<std::size_t>(offsets_.back()));
    std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
    for (int e = 0; e < edge_count(); ++e) {
        adj_[static_cast<std::size_t>(cursor[edges_[e].i]++)] = {edges_[e].j, e};
        adj_[static_cast<std::size_t>(cursor[edges_[e].j]++)] = {edges_[e].i, e};
    }
}

Eigen::VectorXd WeightedGraph::degrees() const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < n_; ++i) {
        double sum = 0.0;
        for (const Half* h = neighbors_begin(i); h != neighbors_end(i); ++h)
            sum += edges_[static_cast<std::size_t>(h->edge)].w;
        d[i] = sum;
    }
    return d;
}

Eigen::SparseMatrix<double> WeightedGraph::adjacency() const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(edges_.size() * 2);
    for (const auto& e : edges_) {
        trip.emplace_back(e.i, e.j, e.w);
        trip.emplace_back(e.j, e.i, e.w);
    }
    Eigen::SparseMatrix<double> w(n_, n_);
    w.setFromTriplets(trip.begin(), trip.end());
    return w;
}

Eigen::SparseMatrix<double> WeightedGraph::laplacian() const {
    const Eigen::VectorXd d = degrees();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(edges_.size() * 2 + static_cast<std::size_t>(n_));
    for (const auto& e : edges_) {
        trip.emplace_back(e.i, e.j, -e.w);
        trip.emplace_back(e.j, e.i, -e.w);
    }
    for (int i = 0; i < n_; ++i) trip.emplace_back(i, i, d[i]);
    Eigen::SparseMatrix<double> l(n_, n_);
    l.setFromTriplets(trip.begin(), trip.end());
    return l;
}

namespace {

struct Neighbor {
    double dist2;
    int index;

    bool operator<(const Neighbor& o) const {
        return std::tie(dist2, index) < std::tie(o.dist2, o.index);
    }
};

/// k nearest of each point by brute force, exact, ties by index.
std::vector<std::vector<int>> knn_brute(const PointCloud& pc, int k) {
    const int n = static_cast<int>(pc.size());
    const auto d = static_cast<std::size_t>(pc.dim());
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
    std::vector<Neighbor> cand(static_cast<std::size_t>(n) - 1);
    for (int q = 0; q < n; ++q) {
        const double* qrow = pc.points.row(q).data();
        std::size_t m = 0;
        for (int p = 0; p < n; ++p) {
            if (p == q) continue;
            cand[m++] = {simd::squared_distance(qrow, pc.points.row(p).data(), d), p};
        }
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        auto& row = out[static_cast<std::size_t>(q)];
        row.resize(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) row[static_cast<std::size_t>(t)] = cand[static_cast<std::size_t>(t)].index;
    }
    return out;
}

/// Exact vantage-point tree for larger inputs. Deterministic construction:
/// the vantage point is the lowest index in its subset, the split is the
/// median distance with (distance, index) ordering.
class VpTree {
public:
    VpTree(const PointCloud& pc) : pc_(pc), d_(static_cast<std::size_t>(pc.dim())) {
        items_.resize(static_cast<std::size_t>(pc.size()));
        std::iota(items_.begin(), items_.end(), 0);
        root_ = build(0, static_cast<int>(items_.size()));
    }

    std::vector<int> query(int q, int k) const {
        Best best;
        best.k = k;
        search(root_, q, best);
        std::sort(best.heap.begin(), best.heap.end());
        std::vector<int> out(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) out[static_cast<std::size_t>(t)] = best.heap[static_cast<std::size_t>(t)].index;
        return out;
    }

private:
    struct Node {
        int vantage = -1;
        double radius = 0.0;   // median distance (not squared)
        int inside = -1;
        int outside = -1;
        int begin = 0, end = 0;  // leaf range in items_
        bool leaf = false;
    };

    struct Best {
        int k = 0;
        std::vector<Neighbor> heap;  // max-heap on (dist2, index)

        double worst_dist() const {
            return heap.size() < static_cast<std::size_t>(k)
                       ? std::numeric_limits<double>::infinity()
                       : std::sqrt(heap.front().dist2);
        }
        void offer(Neighbor cand) {
            if (heap.size() < static_cast<std::size_t>(k)) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end());
            } else if (cand < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end());
            }
        }
    };

    static constexpr int kLeafSize = 24;

    int build(int begin, int end) {
        Node node;
        if (end - begin <= kLeafSize) {
            node.leaf = true;
            node.begin = begin;
            node.end = end;
            nodes_.push_back(node);
            return static_cast<int>(nodes_.size()) - 1;
        }
        auto lo = items_.begin() + begin;
        auto hi = items_.begin() + end;
        std::iter_swap(lo, std::min_element(lo, hi));
        node.vantage = *lo;
        const double* vrow = pc_.points.row(node.vantage).data();
        auto mid = items_.begin() + begin + 1 + (end - begin - 1) / 2;
        std::nth_element(lo + 1, mid, hi, [&](int a, int b) {
            const double da = simd::squared_distance(vrow, pc_.points.row(a).data(), d_);
            const double db = simd::squared_distance(vrow, pc_.points.row(b).data(), d_);
            return std::tie(da, a) < std::tie(db, b);
        });
        node.radius = std::sqrt(simd::squared_distance(vrow, pc_.points.row(*mid).data(), d_));
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        const int inside = build(begin + 1, static_cast<int>(mid - items_.begin()) + 1);
        const int outside = build(static_cast<int>(mid - items_.begin()) + 1, end);
        nodes_[static_cast<std::size_t>(self)].inside = inside;
        nodes_[static_cast<std::size_t>(self)].outside = outside;
        return self;
    }

    void search(int idx, int q, Best& best) const {
        const Node& node = nodes_[static_cast<std::size_t>(idx)];
        const double* qrow = pc_.points.row(q).data();
        if (node.leaf) {
            for (int t = node.begin; t < node.end; ++t) {
                const int p = items_[static_cast<std::size_t>(t)];
                if (p == q) continue;
                best.offer({simd::squared_distance(qrow, pc_.points.row(p).data(), d_), p});
            }
            return;
        }
        const double dist2 = simd::squared_distance(qrow, pc_.points.row(node.vantage).data(), d_);
        const double dist = std::sqrt(dist2);
        if (node.vantage != q) best.offer({dist2, node.vantage});

        // Visit the likelier side first; recurse into the other side whenever
        // it could still hold a point at <= the current worst distance
        // (boundary kept inclusive so index tie-breaks stay exact).
        if (dist < node.radius) {
            search(node.inside, q, best);
            if (dist + best.worst_dist() >= node.radius) search(node.outside, q, best);
        } else {
            search(node.outside, q, best);
            if (dist - best.worst_dist() <= node.radius) search(node.inside, q, best);
        }
    }

    const PointCloud& pc_;
    std::size_t d_;
    std::vector<int> items_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace

std::vector<std::pair<int, int>> knn_edges(const PointCloud& pc, int k,
                                           const KnnOptions& options) {
    const int n = static_cast<int>(pc.size());
    if (k < 1 || k >= n)
        throw ParameterError("k must satisfy 1 <= k < n, got k=" + std::to_string(k) +
                             ", n=" + std::to_string(n));

    std::vector<std::vector<int>> nearest;
    if (n <= options.brute_force_limit) {
        nearest = knn_brute(pc, k);
    } else {
        VpTree tree(pc);
        nearest.resize(static_cast<std::size_t>(n));
        for (int q = 0; q < n; ++q) nearest[static_cast<std::size_t>(q)] = tree.query(q, k);
    }

    std::vector<std::pair<int, int>> directed;
    directed.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    for (int q = 0; q < n; ++q)
        for (int p : nearest[static_cast<std::size_t>(q)])
            directed.emplace_back(std::min(p, q), std::max(p, q));
    std::sort(directed.begin(), directed.end());

    std::vector<std::pair<int, int>> out;
    if (options.mode == KnnMode::Or) {
        out = std::move(directed);
        out.erase(std::unique(out.begin(), out.end()), out.end());
    } else {
        for (std::size_t t = 1; t < directed.size(); ++t)
            if (directed[t] == directed[t - 1] && (out.empty() || out.back() != directed[t]))
                out.push_back(directed[t]);
    }
    return out;
}

WeightedGraph heat_weights(const std::vector<std::pair<int, int>>& edges,
                           const PointCloud& pc, double sigma) {
    if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
    const auto d = static_cast<std::size_t>(pc.dim());
    std::vector<Edge> weighted;
    weighted.reserve(edges.size());
    for (const auto& [i, j] : edges) {
        const double dist2 =
            simd::squared_distance(pc.points.row(i).data(), pc.points.row(j).data(), d);
        weighted.push_back({i, j, std::exp(-dist2 / (2.0 * sigma * sigma))});
    }
    return WeightedGraph(static_cast<int>(pc.size()), std::move(weighted));
}

std::vector<int> connected_components(const WeightedGraph& g) {
    const int n = g.size();
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    int next = 0;
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (label[static_cast<std::size_t>(s)] != -1) continue;
        label[static_cast<std::size_t>(s)] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto* h = g.neighbors_begin(u); h != g.neighbors_end(u); ++h) {
                if (label[static_cast<std::size_t>(h->to)] == -1) {
                    label[static_cast<std::size_t>(h->to)] = next;
                    stack.push_back(h->to);
                }
            }
        }
        ++next;
    }
    return label;
}

Eigen::VectorXd divergence(const EdgeFunction& f, const WeightedGraph& g) {
    if (f.values.size() != static_cast<std::size_t>(g.edge_count()))
        throw ShapeError("edge function does not match graph edge count");
    Eigen::VectorXd div = Eigen::VectorXd::Zero(g.size());
    for (int i = 0; i < g.size(); ++i) {
        double sum = 0.0;
        for (const auto* h = g.neighbors_begin(i); h != g.neighbors_end(i); ++h)
            sum += f.directed(h->edge, g.edges()[static_cast<std::size_t>(h->edge)].i == i);
        div[i] = sum;
    }
    return div;
}

EdgeFunction gradient(const Eigen::VectorXd& y, const WeightedGraph& g) {
    if (y.size() != g.size()) throw ShapeError("vector length does not match node count");
    EdgeFunction grad;
    grad.parity = EdgeFunction::Parity::Antisymmetric;
    grad.values.resize(static_cast<std::size_t>(g.edge_count()));
    for (int e = 0; e < g.edge_count(); ++e) {
        const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
        grad.values[static_cast<std::size_t>(e)] = (y[edge.j] - y[edge.i]) * edge.w;
    }
    return grad;
}

EdgeFunction edge_action(const EdgeFunction& a, const Eigen::VectorXd& f,
                         const WeightedGraph& g) {
    if (a.values.size() != static_cast<std::size_t>(g.edge_count()))
        throw ShapeError("edge function does not match graph edge count");
    if (f.size() != g.size()) throw ShapeError("vector length does not match node count");
    EdgeFunction out;
    out.parity = a.parity;
    out.values.resize(a.values.size());
    for (int e = 0; e < g.edge_count(); ++e) {
        const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
        out.values[static_cast<std::size_t>(e)] =
            0.5 * (f[edge.i] + f[edge.j]) * a.values[static_cast<std::size_t>(e)];
    }
    return out;
}

void save_edge_list(const std::string& path, const WeightedGraph& g) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.precision(17);
    out << "# n " << g.size() << '\n';
    for (const auto& e : g.edges()) out << e.i << ' ' << e.j << ' ' << e.w << '\n';
    if (!out) throw IoError("failed while writing '" + path + "'");
}

WeightedGraph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    int n = -1;
    std::vector<Edge> edges;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        if (line[0] == '#') {
            std::string hash, key;
            ss >> hash >> key >> n;
            continue;
        }
        Edge e{};
        if (!(ss >> e.i >> e.j >> e.w))
            throw ParseError("bad edge line '" + line + "' in '" + path + "'");
        edges.push_back(e);
    }
    if (n < 0) {
        for (const auto& e : edges) n = std::max({n, e.i, e.j});
        ++n;
    }
    return WeightedGraph(n, std::move(edges));
}

} // namespace te
