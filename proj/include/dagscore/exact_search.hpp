#pragma once

#include "dagscore/penalties.hpp"
#include "dagscore/types.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace dagscore {

struct ExactSearchOptions {
    int cap = 9;
    int threads = 0;
};

// One deduplicated (B, Omega) pair together with every ordering that
// generates it.
struct ClassMember {
    SemParams params;
    std::vector<std::vector<int>> orderings;
    int edge_count = 0;
};

struct EquivalenceClass {
    std::vector<ClassMember> members;
    double eps = 0.0;
};

struct MinimalClass {
    std::vector<ClassMember> members;
    double tau = std::numeric_limits<double>::infinity();
    double delta0 = std::numeric_limits<double>::infinity();
};

// Ordered-regression factorization of Theta for one topological ordering
// (order[k] is the node placed at position k). The support of the returned B
// points from earlier to later positions.
SemParams pair_for_permutation(const PrecisionMatrix& theta, const std::vector<int>& order);

// Same factorization through a permuted Cholesky decomposition; cross-check
// path for pair_for_permutation.
SemParams pair_for_permutation_cholesky(const PrecisionMatrix& theta, const std::vector<int>& order);

// All p! factorizations, deduplicated entrywise within eps (B and Omega).
// Throws capacity_error when p exceeds opts.cap.
EquivalenceClass enumerate_class(const PrecisionMatrix& theta, double eps,
                                 const ExactSearchOptions& opts = {});

// Members attaining the minimum edge count; tau is the smallest nonzero
// magnitude across the whole class (+inf when the class has no edges) and
// delta0 = tau / (1 + delta_margin).
MinimalClass minimal_class(const EquivalenceClass& ec, double delta_margin = 1.0);

struct ExactOptimum {
    std::vector<ClassMember> members;
    double score = 0.0;
};

// Global minimum of nll_full + penalty over the equivalence class of the
// inverse of sigma_hat; ties within 1e-10 are all returned.
ExactOptimum exact_regularized_optimum(const CovarianceMatrix& sigma_hat, const PenaltySpec& penalty,
                                       double eps, const ExactSearchOptions& opts = {});

// Halves lambda from lambda_hi until the optimum support set is unchanged
// across two consecutive halvings; returns that stabilized lambda. The
// penalty is quasi-MCP with the given delta.
double empirical_crossover_lambda(const CovarianceMatrix& sigma_hat, double delta, double lambda_hi,
                                  double eps, const ExactSearchOptions& opts = {});

// Off-diagonal support as a sorted edge list.
std::vector<std::pair<int, int>> support_edges(const Matrix& b, double eps);

// Minimum Frobenius distance from b_est to any member's B.
double distance_to_class(const std::vector<ClassMember>& members, const Matrix& b_est);

}  // namespace dagscore
