#include "dagscore/graph_equiv.hpp"

#include "dagscore/acyclicity.hpp"
#include "dagscore/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dagscore {

namespace {

Eigen::MatrixXi binary_support(const Matrix& b, double eps) {
    const int p = static_cast<int>(b.rows());
    Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (i != j && std::abs(b(i, j)) > eps) adj(i, j) = 1;
        }
    }
    return adj;
}

bool adj_is_dag(const Eigen::MatrixXi& adj) {
    return is_dag(adj.cast<double>(), 0.0);
}

}  // namespace

DagStructure::DagStructure(Eigen::MatrixXi adj_in) : adj(std::move(adj_in)) {
    if (adj.rows() != adj.cols()) {
        throw validation_error("DagStructure adjacency must be square");
    }
    for (int i = 0; i < adj.rows(); ++i) {
        for (int j = 0; j < adj.cols(); ++j) {
            if (adj(i, j) != 0 && adj(i, j) != 1) {
                throw validation_error("DagStructure adjacency entries must be 0 or 1");
            }
        }
        if (adj(i, i) != 0) {
            throw validation_error("DagStructure adjacency has nonzero diagonal");
        }
    }
    if (!adj_is_dag(adj)) {
        throw validation_error("DagStructure adjacency is cyclic");
    }
}

DagStructure support_of(const Matrix& b, double eps) {
    auto g = try_support_of(b, eps);
    if (!g) {
        throw validation_error("support_of: thresholded support is cyclic");
    }
    return *g;
}

std::optional<DagStructure> try_support_of(const Matrix& b, double eps) {
    detail::check_square(b, "support_of");
    if (eps < 0.0) {
        throw validation_error("support_of requires eps >= 0");
    }
    Eigen::MatrixXi adj = binary_support(b, eps);
    if (!adj_is_dag(adj)) {
        return std::nullopt;
    }
    return DagStructure(std::move(adj));
}

std::vector<int> topological_sort(const DagStructure& g) {
    const int p = g.dim();
    std::vector<int> in_degree(p, 0);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (g.has_edge(i, j)) ++in_degree[j];
        }
    }
    std::vector<int> order;
    order.reserve(p);
    std::vector<bool> placed(p, false);
    for (int step = 0; step < p; ++step) {
        int next = -1;
        for (int j = 0; j < p; ++j) {
            if (!placed[j] && in_degree[j] == 0) {
                next = j;
                break;
            }
        }
        if (next < 0) {
            throw validation_error("topological_sort: graph is cyclic");
        }
        placed[next] = true;
        order.push_back(next);
        for (int j = 0; j < p; ++j) {
            if (g.has_edge(next, j)) --in_degree[j];
        }
    }
    return order;
}

namespace {

// Partially directed graph under Meek closure. directed(i, j) means i -> j;
// undirected edges carry 1 in both slots.
struct Pdag {
    int p;
    Eigen::MatrixXi skeleton;
    Eigen::MatrixXi mark;  // 1 at (i, j) if i -> j or i - j

    bool adjacent(int i, int j) const { return skeleton(i, j) != 0; }
    bool directed(int i, int j) const { return mark(i, j) == 1 && mark(j, i) == 0; }
    bool undirected(int i, int j) const { return mark(i, j) == 1 && mark(j, i) == 1; }

    void orient(int i, int j) {
        mark(i, j) = 1;
        mark(j, i) = 0;
    }
};

bool meek_rule_1(const Pdag& g, int x, int y) {
    for (int z = 0; z < g.p; ++z) {
        if (g.directed(z, x) && !g.adjacent(z, y)) return true;
    }
    return false;
}

bool meek_rule_2(const Pdag& g, int x, int y) {
    for (int z = 0; z < g.p; ++z) {
        if (g.directed(x, z) && g.directed(z, y)) return true;
    }
    return false;
}

bool meek_rule_3(const Pdag& g, int x, int y) {
    for (int z = 0; z < g.p; ++z) {
        if (!(g.undirected(x, z) && g.directed(z, y))) continue;
        for (int w = z + 1; w < g.p; ++w) {
            if (g.undirected(x, w) && g.directed(w, y) && !g.adjacent(z, w)) return true;
        }
    }
    return false;
}

bool meek_rule_4(const Pdag& g, int x, int y) {
    for (int w = 0; w < g.p; ++w) {
        if (!(g.undirected(x, w) && g.undirected(y, w))) continue;
        for (int z = 0; z < g.p; ++z) {
            if (g.directed(w, z) && g.directed(z, y) && !g.adjacent(z, x)) return true;
        }
    }
    return false;
}

}  // namespace

Cpdag cpdag_of(const DagStructure& g) {
    const int p = g.dim();
    Pdag pdag{p, Eigen::MatrixXi::Zero(p, p), Eigen::MatrixXi::Zero(p, p)};
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (g.has_edge(i, j)) {
                pdag.skeleton(i, j) = pdag.skeleton(j, i) = 1;
                pdag.mark(i, j) = pdag.mark(j, i) = 1;
            }
        }
    }
    // V-structures i -> k <- j with i, j nonadjacent keep their orientation.
    for (int k = 0; k < p; ++k) {
        for (int i = 0; i < p; ++i) {
            if (!g.has_edge(i, k)) continue;
            for (int j = i + 1; j < p; ++j) {
                if (g.has_edge(j, k) && !pdag.adjacent(i, j)) {
                    pdag.orient(i, k);
                    pdag.orient(j, k);
                }
            }
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int x = 0; x < p; ++x) {
            for (int y = 0; y < p; ++y) {
                if (!pdag.undirected(x, y)) continue;
                if (meek_rule_1(pdag, x, y) || meek_rule_2(pdag, x, y) ||
                    meek_rule_3(pdag, x, y) || meek_rule_4(pdag, x, y)) {
                    pdag.orient(x, y);
                    changed = true;
                }
            }
        }
    }
    Cpdag out;
    out.p = p;
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (pdag.directed(i, j)) out.directed.insert({i, j});
            if (i < j && pdag.undirected(i, j)) out.undirected.insert({i, j});
        }
    }
    return out;
}

namespace {

enum class PairState { None, Undirected, Forward, Backward };

PairState pair_state(const Cpdag& c, int i, int j) {
    if (c.undirected.count({i, j})) return PairState::Undirected;
    if (c.directed.count({i, j})) return PairState::Forward;
    if (c.directed.count({j, i})) return PairState::Backward;
    return PairState::None;
}

}  // namespace

int shd_cpdag(const Cpdag& a, const Cpdag& b) {
    if (a.p != b.p) {
        throw validation_error("shd_cpdag: dimension mismatch");
    }
    int distance = 0;
    for (int i = 0; i < a.p; ++i) {
        for (int j = i + 1; j < a.p; ++j) {
            if (pair_state(a, i, j) != pair_state(b, i, j)) ++distance;
        }
    }
    return distance;
}

bool mec_equal(const DagStructure& g1, const DagStructure& g2) {
    if (g1.dim() != g2.dim()) {
        throw validation_error("mec_equal: dimension mismatch");
    }
    return cpdag_of(g1) == cpdag_of(g2);
}

}  // namespace dagscore
