#pragma once

#include "te/graph.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace te {

/// Outcome of a metric-solvability check. When solvable, `x` holds one
/// representative solution, scaled so the lowest-index node of every
/// connected component carries value 1. When a cycle is inconsistent,
/// `violating_cycle` lists its nodes in order; when the propagated solution
/// leaves the positive cone, `witness_path` traces the propagation from the
/// component root to the offending node.
struct FieldReport {
    enum class Status { Solvable, InconsistentCycle, NonpositiveSolution };

    Status status = Status::Solvable;
    Eigen::VectorXd x;
    std::vector<int> violating_cycle;
    std::vector<int> witness_path;
    std::string detail;

    bool solvable() const { return status == Status::Solvable; }
};

/// Decide whether the affine-velocity metric equations
/// (1 + a_i - a_j) x_j = (1 + a_j - a_i) x_i admit a positive solution on g.
/// Propagates along a BFS spanning tree from the lowest-index node of each
/// component, then checks every non-tree edge; the first violated fundamental
/// cycle becomes the witness. Edges with a vanishing factor 1 + a_i - a_j are
/// rejected up front as degenerate.
FieldReport solve_affine_metric(const WeightedGraph& g, const Eigen::VectorXd& a);

/// The contrasting diagnostic for the ratio velocity: a_i x_j = a_j x_i is
/// always solved by x proportional to a, so this never fails for positive a.
FieldReport check_ratio_metric(const WeightedGraph& g, const Eigen::VectorXd& a);

/// Cycle product of Theorem-style factors prod (1 + a_{c_t} - a_{c_{t+1}})
/// around the closed walk `cycle`, divided by the reversed-orientation
/// product; 1 exactly when the cycle is consistent. Evaluated in log space
/// when every factor is positive.
double cycle_consistency_ratio(const Eigen::VectorXd& a, const std::vector<int>& cycle);

/// Key: value serialization used by the CLI.
std::string to_text(const FieldReport& report);

} // namespace te
