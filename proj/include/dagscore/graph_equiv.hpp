#pragma once

#include "dagscore/types.hpp"

#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace dagscore {

// Binary adjacency of a DAG; constructor rejects cyclic or non-binary input.
struct DagStructure {
    Eigen::MatrixXi adj;

    explicit DagStructure(Eigen::MatrixXi adj_in);

    int dim() const { return static_cast<int>(adj.rows()); }
    int edge_count() const { return adj.sum(); }
    bool has_edge(int i, int j) const { return adj(i, j) != 0; }

    bool operator==(const DagStructure& other) const { return adj == other.adj; }
};

// Completed partially directed acyclic graph. Undirected pairs are stored
// with first < second.
struct Cpdag {
    int p = 0;
    std::set<std::pair<int, int>> directed;
    std::set<std::pair<int, int>> undirected;

    bool operator==(const Cpdag& other) const = default;
};

// Thresholded support |B_ij| > eps; throws validation_error when the result
// is cyclic. try_support_of returns nullopt instead.
DagStructure support_of(const Matrix& b, double eps);
std::optional<DagStructure> try_support_of(const Matrix& b, double eps);

// Kahn order; ties broken by node index.
std::vector<int> topological_sort(const DagStructure& g);

// Skeleton + v-structures, closed under the four Meek rules.
Cpdag cpdag_of(const DagStructure& g);

// Node pairs where the two CPDAGs disagree; any mark disagreement on a shared
// skeleton edge counts 1.
int shd_cpdag(const Cpdag& a, const Cpdag& b);

bool mec_equal(const DagStructure& g1, const DagStructure& g2);

}  // namespace dagscore
