#include "te/fieldcheck.hpp"

#include "te/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace te {

namespace {

constexpr double kRelTol = 1e-10;

void check_lengths(const WeightedGraph& g, const Eigen::VectorXd& a) {
    if (a.size() != g.size())
        throw ShapeError("a has length " + std::to_string(a.size()) + " but the graph has " +
                         std::to_string(g.size()) + " nodes");
}

/// Fundamental cycle of non-tree edge (u, v): u -> ... -> lca -> ... -> v.
std::vector<int> fundamental_cycle(const std::vector<int>& parent,
                                   const std::vector<int>& depth, int u, int v) {
    std::vector<int> up, down;
    int x = u, y = v;
    while (depth[static_cast<std::size_t>(x)] > depth[static_cast<std::size_t>(y)]) {
        up.push_back(x);
        x = parent[static_cast<std::size_t>(x)];
    }
    while (depth[static_cast<std::size_t>(y)] > depth[static_cast<std::size_t>(x)]) {
        down.push_back(y);
        y = parent[static_cast<std::size_t>(y)];
    }
    while (x != y) {
        up.push_back(x);
        down.push_back(y);
        x = parent[static_cast<std::size_t>(x)];
        y = parent[static_cast<std::size_t>(y)];
    }
    up.push_back(x);  // the LCA
    std::reverse(down.begin(), down.end());
    up.insert(up.end(), down.begin(), down.end());
    return up;
}

} // namespace

double cycle_consistency_ratio(const Eigen::VectorXd& a, const std::vector<int>& cycle) {
    const std::size_t l = cycle.size();
    bool all_positive = true;
    for (std::size_t t = 0; t < l; ++t) {
        const double ai = a[cycle[t]];
        const double aj = a[cycle[(t + 1) % l]];
        if (1.0 + ai - aj <= 0.0 || 1.0 + aj - ai <= 0.0) all_positive = false;
    }
    if (all_positive) {
        double log_ratio = 0.0;
        for (std::size_t t = 0; t < l; ++t) {
            const double ai = a[cycle[t]];
            const double aj = a[cycle[(t + 1) % l]];
            log_ratio += std::log(1.0 + ai - aj) - std::log(1.0 + aj - ai);
        }
        return std::exp(log_ratio);
    }
    double forward = 1.0, backward = 1.0;
    for (std::size_t t = 0; t < l; ++t) {
        const double ai = a[cycle[t]];
        const double aj = a[cycle[(t + 1) % l]];
        forward *= 1.0 + ai - aj;
        backward *= 1.0 + aj - ai;
    }
    return forward / backward;
}

FieldReport solve_affine_metric(const WeightedGraph& g, const Eigen::VectorXd& a) {
    check_lengths(g, a);
    for (const Edge& e : g.edges()) {
        if (1.0 + a[e.i] - a[e.j] == 0.0 || 1.0 + a[e.j] - a[e.i] == 0.0)
            throw DegeneracyError("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                  ") has |a_i - a_j| = 1; the propagation ratio degenerates");
    }

    const int n = g.size();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    std::vector<int> depth(static_cast<std::size_t>(n), -1);
    std::vector<char> in_tree(static_cast<std::size_t>(g.edge_count()), 0);

    for (int root = 0; root < n; ++root) {
        if (depth[static_cast<std::size_t>(root)] != -1) continue;
        depth[static_cast<std::size_t>(root)] = 0;
        x[root] = 1.0;
        std::deque<int> queue{root};
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (const auto* h = g.neighbors_begin(u); h != g.neighbors_end(u); ++h) {
                const int v = h->to;
                if (depth[static_cast<std::size_t>(v)] != -1) continue;
                in_tree[static_cast<std::size_t>(h->edge)] = 1;
                parent[static_cast<std::size_t>(v)] = u;
                depth[static_cast<std::size_t>(v)] = depth[static_cast<std::size_t>(u)] + 1;
                x[v] = x[u] * (1.0 + a[v] - a[u]) / (1.0 + a[u] - a[v]);
                if (!(x[v] > 0.0)) {
                    FieldReport report;
                    report.status = FieldReport::Status::NonpositiveSolution;
                    for (int t = v; t != -1; t = parent[static_cast<std::size_t>(t)])
                        report.witness_path.push_back(t);
                    std::reverse(report.witness_path.begin(), report.witness_path.end());
                    std::ostringstream msg;
                    msg << "propagated value x[" << v << "] = " << x[v]
                        << " leaves the positive cone";
                    report.detail = msg.str();
                    return report;
                }
                queue.push_back(v);
            }
        }
    }

    for (int e = 0; e < g.edge_count(); ++e) {
        if (in_tree[static_cast<std::size_t>(e)]) continue;
        const Edge& edge = g.edges()[static_cast<std::size_t>(e)];
        const double lhs = (1.0 + a[edge.i] - a[edge.j]) * x[edge.j];
        const double rhs = (1.0 + a[edge.j] - a[edge.i]) * x[edge.i];
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        if (std::abs(lhs - rhs) > kRelTol * scale) {
            FieldReport report;
            report.status = FieldReport::Status::InconsistentCycle;
            report.violating_cycle = fundamental_cycle(parent, depth, edge.i, edge.j);
            std::ostringstream msg;
            msg << "edge (" << edge.i << ", " << edge.j << ") is inconsistent: " << lhs
                << " vs " << rhs;
            report.detail = msg.str();
            return report;
        }
    }

    FieldReport report;
    report.status = FieldReport::Status::Solvable;
    report.x = x;
    return report;
}

FieldReport check_ratio_metric(const WeightedGraph& g, const Eigen::VectorXd& a) {
    check_lengths(g, a);
    for (int i = 0; i < g.size(); ++i)
        if (!(a[i] > 0.0))
            throw PositivityError("a[" + std::to_string(i) + "] must be positive");

    const std::vector<int> comp = connected_components(g);
    std::vector<double> root_value(static_cast<std::size_t>(g.size()), 0.0);
    for (int i = g.size() - 1; i >= 0; --i)
        root_value[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])] = a[i];

    FieldReport report;
    report.status = FieldReport::Status::Solvable;
    report.x.resize(g.size());
    for (int i = 0; i < g.size(); ++i)
        report.x[i] = a[i] / root_value[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])];
    return report;
}

std::string to_text(const FieldReport& report) {
    std::ostringstream out;
    out.precision(17);
    const char* status = nullptr;
    switch (report.status) {
        case FieldReport::Status::Solvable: status = "solvable"; break;
        case FieldReport::Status::InconsistentCycle: status = "inconsistent-cycle"; break;
        case FieldReport::Status::NonpositiveSolution: status = "nonpositive-solution"; break;
    }
    out << "status: " << status << '\n';
    if (!report.detail.empty()) out << "detail: " << report.detail << '\n';
    if (report.solvable()) {
        out << "x:";
        for (Eigen::Index i = 0; i < report.x.size(); ++i) out << ' ' << report.x[i];
        out << '\n';
    }
    if (!report.violating_cycle.empty()) {
        out << "violating_cycle:";
        for (int v : report.violating_cycle) out << ' ' << v;
        out << '\n';
    }
    if (!report.witness_path.empty()) {
        out << "witness_path:";
        for (int v : report.witness_path) out << ' ' << v;
        out << '\n';
    }
    return out.str();
}

} // namespace te
