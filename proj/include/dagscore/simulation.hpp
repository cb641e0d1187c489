#pragma once

#include "dagscore/graph_equiv.hpp"
#include "dagscore/rng.hpp"
#include "dagscore/types.hpp"

#include <cstdint>
#include <string>

namespace dagscore {

enum class GraphKind { ER, SF };
enum class ModelKind { LinearGaussian, Logistic };

std::string to_string(GraphKind kind);
GraphKind graph_kind_from_string(const std::string& name);
std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct SimConfig {
    int p = 10;
    int k = 2;
    GraphKind graph_kind = GraphKind::ER;
    double weight_lo = 0.5;
    double weight_hi = 1.5;
    double noise_std_lo = 0.1;
    double noise_std_hi = 0.7;
    int n = 1000;
    ModelKind model = ModelKind::LinearGaussian;
    std::uint64_t seed = 0;

    void validate() const;
};

// ER: random node permutation, each pair kept with probability kp/(p(p-1)/2)
// and oriented along the permutation. SF: preferential attachment with k
// edges per new node, oriented new -> existing, labels randomly permuted.
DagStructure gen_graph(const SimConfig& cfg, Rng& rng);

// Uniform magnitudes in [weight_lo, weight_hi] with random signs on edges;
// noise standard deviations uniform in [noise_std_lo, noise_std_hi], stored
// as variances. For the logistic model omega is filled with ones.
SemParams assign_weights(const DagStructure& g, const SimConfig& cfg, Rng& rng);

// Ancestral sampling of X = B^T X + N, noise drawn column by column in
// topological order.
Dataset sample_gaussian(const SemParams& params, int n, Rng& rng);

// Binary ancestral sampling with a logistic link on the parents.
Dataset sample_logistic(const Matrix& b, int n, Rng& rng);

// Column-wise centering and scaling by sample standard deviations (divisor
// n - 1).
Dataset standardize(const Dataset& data);

// (1/n) X^T X, mean-centered by default. Warns on stderr when n < p + 1.
CovarianceMatrix sample_covariance(const Dataset& data, bool centered = true);

}  // namespace dagscore
