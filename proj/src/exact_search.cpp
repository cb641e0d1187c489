#include "dagscore/exact_search.hpp"

#include "dagscore/errors.hpp"
#include "dagscore/parallel.hpp"
#include "dagscore/sem_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace dagscore {

namespace {

void check_order(const std::vector<int>& order, int p, const std::string& context) {
    if (static_cast<int>(order.size()) != p) {
        throw validation_error(context + ": ordering length does not match dimension");
    }
    std::vector<bool> seen(p, false);
    for (int v : order) {
        if (v < 0 || v >= p || seen[v]) {
            throw validation_error(context + ": ordering is not a permutation of 0..p-1");
        }
        seen[v] = true;
    }
}

// Ordered OLS on the covariance: node order[k] is regressed on its
// predecessors order[0..k-1].
SemParams member_for_order(const Matrix& sigma, const std::vector<int>& order) {
    const int p = static_cast<int>(sigma.rows());
    Matrix b = Matrix::Zero(p, p);
    Vector omega(p);
    for (int k = 0; k < p; ++k) {
        const int j = order[k];
        if (k == 0) {
            omega[j] = sigma(j, j);
            continue;
        }
        Matrix sub(k, k);
        Vector rhs(k);
        for (int a = 0; a < k; ++a) {
            rhs[a] = sigma(order[a], j);
            for (int c = 0; c < k; ++c) sub(a, c) = sigma(order[a], order[c]);
        }
        const Vector beta = sub.llt().solve(rhs);
        omega[j] = sigma(j, j) - rhs.dot(beta);
        for (int a = 0; a < k; ++a) b(order[a], j) = beta[a];
    }
    if ((omega.array() <= 0.0).any()) {
        throw numerical_error("member_for_order: nonpositive residual variance");
    }
    return SemParams(std::move(b), std::move(omega));
}

Matrix sigma_from_theta(const PrecisionMatrix& theta, const std::string& context) {
    theta.require_positive_definite(context);
    const int p = theta.dim();
    Matrix sigma = theta.m().llt().solve(Matrix::Identity(p, p));
    return ((sigma + sigma.transpose()) / 2.0).eval();
}

// Lexicographic unranking: index -> permutation of 0..p-1.
std::vector<int> unrank_permutation(int p, std::int64_t index) {
    std::vector<std::int64_t> fact(p, 1);
    for (int i = 1; i < p; ++i) fact[i] = fact[i - 1] * i;
    std::vector<int> pool(p);
    for (int i = 0; i < p; ++i) pool[i] = i;
    std::vector<int> order;
    order.reserve(p);
    for (int k = p - 1; k >= 0; --k) {
        const std::int64_t f = fact[k];
        const int pos = static_cast<int>(index / f);
        index %= f;
        order.push_back(pool[pos]);
        pool.erase(pool.begin() + pos);
    }
    return order;
}

std::string support_key(const Matrix& b, double eps) {
    const int p = static_cast<int>(b.rows());
    std::string key(static_cast<std::size_t>(p * p), '0');
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (i != j && std::abs(b(i, j)) > eps) key[static_cast<std::size_t>(i * p + j)] = '1';
        }
    }
    return key;
}

int count_edges(const Matrix& b, double eps) {
    int count = 0;
    for (int i = 0; i < b.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            if (i != j && std::abs(b(i, j)) > eps) ++count;
        }
    }
    return count;
}

bool members_match(const SemParams& a, const SemParams& b, double eps) {
    return (a.b - b.b).cwiseAbs().maxCoeff() <= eps &&
           (a.omega - b.omega).cwiseAbs().maxCoeff() <= eps;
}

std::int64_t factorial(int p) {
    std::int64_t f = 1;
    for (int i = 2; i <= p; ++i) f *= i;
    return f;
}

}  // namespace

SemParams pair_for_permutation(const PrecisionMatrix& theta, const std::vector<int>& order) {
    check_order(order, theta.dim(), "pair_for_permutation");
    const Matrix sigma = sigma_from_theta(theta, "pair_for_permutation");
    return member_for_order(sigma, order);
}

SemParams pair_for_permutation_cholesky(const PrecisionMatrix& theta, const std::vector<int>& order) {
    const int p = theta.dim();
    check_order(order, p, "pair_for_permutation_cholesky");
    theta.require_positive_definite("pair_for_permutation_cholesky");
    // Permute Theta by the reversed ordering; its Cholesky factor then holds
    // the unit-lower factor of the UDU decomposition in the ordering basis.
    Matrix m(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            m(i, j) = theta.m()(order[p - 1 - i], order[p - 1 - j]);
        }
    }
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        throw numerical_error("pair_for_permutation_cholesky: factorization failed");
    }
    const Matrix c = llt.matrixL();
    Matrix b = Matrix::Zero(p, p);
    Vector omega(p);
    for (int k = 0; k < p; ++k) {
        const double d = c(p - 1 - k, p - 1 - k);
        omega[order[k]] = 1.0 / (d * d);
    }
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const double l = c(p - 1 - i, p - 1 - j) / c(p - 1 - j, p - 1 - j);
            b(order[i], order[j]) = -l;
        }
    }
    return SemParams(std::move(b), std::move(omega));
}

EquivalenceClass enumerate_class(const PrecisionMatrix& theta, double eps,
                                 const ExactSearchOptions& opts) {
    const int p = theta.dim();
    if (p > opts.cap) {
        throw capacity_error("enumerate_class: p = " + std::to_string(p) +
                             " exceeds the enumeration cap " + std::to_string(opts.cap));
    }
    if (eps < 0.0) {
        throw validation_error("enumerate_class requires eps >= 0");
    }
    const Matrix sigma = sigma_from_theta(theta, "enumerate_class");
    const std::int64_t total = factorial(p);

    EquivalenceClass ec;
    ec.eps = eps;
    std::map<std::string, std::vector<std::size_t>> by_support;

    constexpr std::int64_t kChunk = 4096;
    std::vector<SemParams> buffer;
    std::vector<std::vector<int>> orders(static_cast<std::size_t>(std::min(kChunk, total)));
    for (std::int64_t chunk_begin = 0; chunk_begin < total; chunk_begin += kChunk) {
        const std::int64_t chunk_size = std::min(kChunk, total - chunk_begin);
        buffer.clear();
        buffer.resize(static_cast<std::size_t>(chunk_size),
                      SemParams(Matrix::Zero(1, 1), Vector::Ones(1)));
        parallel_for_index(chunk_size, opts.threads, [&](std::int64_t i) {
            orders[static_cast<std::size_t>(i)] = unrank_permutation(p, chunk_begin + i);
            buffer[static_cast<std::size_t>(i)] =
                member_for_order(sigma, orders[static_cast<std::size_t>(i)]);
        });
        for (std::int64_t i = 0; i < chunk_size; ++i) {
            SemParams& candidate = buffer[static_cast<std::size_t>(i)];
            const std::string key = support_key(candidate.b, eps);
            auto& bucket = by_support[key];
            bool merged = false;
            for (std::size_t idx : bucket) {
                if (members_match(ec.members[idx].params, candidate, eps)) {
                    ec.members[idx].orderings.push_back(orders[static_cast<std::size_t>(i)]);
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                const int edges = count_edges(candidate.b, eps);
                ClassMember member{std::move(candidate), {orders[static_cast<std::size_t>(i)]}, edges};
                bucket.push_back(ec.members.size());
                ec.members.push_back(std::move(member));
            }
        }
    }
    return ec;
}

MinimalClass minimal_class(const EquivalenceClass& ec, double delta_margin) {
    if (ec.members.empty()) {
        throw validation_error("minimal_class: empty equivalence class");
    }
    if (!(delta_margin > 0.0)) {
        throw validation_error("minimal_class requires delta_margin > 0");
    }
    int min_edges = ec.members.front().edge_count;
    for (const auto& member : ec.members) min_edges = std::min(min_edges, member.edge_count);

    MinimalClass mc;
    double tau = std::numeric_limits<double>::infinity();
    for (const auto& member : ec.members) {
        if (member.edge_count == min_edges) mc.members.push_back(member);
        for (int i = 0; i < member.params.dim(); ++i) {
            for (int j = 0; j < member.params.dim(); ++j) {
                const double mag = std::abs(member.params.b(i, j));
                if (i != j && mag > ec.eps) tau = std::min(tau, mag);
            }
        }
    }
    mc.tau = tau;
    mc.delta0 = tau / (1.0 + delta_margin);
    return mc;
}

ExactOptimum exact_regularized_optimum(const CovarianceMatrix& sigma_hat, const PenaltySpec& penalty,
                                       double eps, const ExactSearchOptions& opts) {
    penalty.validate();
    const PrecisionMatrix theta = PrecisionMatrix::inverse_of(sigma_hat);
    const EquivalenceClass ec = enumerate_class(theta, eps, opts);
    constexpr double kTieTol = 1e-10;

    std::vector<double> scores(ec.members.size());
    for (std::size_t i = 0; i < ec.members.size(); ++i) {
        scores[i] = nll_full(ec.members[i].params, sigma_hat) +
                    penalty_matrix(penalty, ec.members[i].params.b);
    }
    const double best = *std::min_element(scores.begin(), scores.end());
    ExactOptimum opt;
    opt.score = best;
    for (std::size_t i = 0; i < ec.members.size(); ++i) {
        if (scores[i] <= best + kTieTol) opt.members.push_back(ec.members[i]);
    }
    return opt;
}

double empirical_crossover_lambda(const CovarianceMatrix& sigma_hat, double delta, double lambda_hi,
                                  double eps, const ExactSearchOptions& opts) {
    if (!(delta > 0.0) || !(lambda_hi > 0.0)) {
        throw validation_error("empirical_crossover_lambda requires delta > 0 and lambda_hi > 0");
    }
    const PrecisionMatrix theta = PrecisionMatrix::inverse_of(sigma_hat);
    const EquivalenceClass ec = enumerate_class(theta, eps, opts);
    constexpr double kTieTol = 1e-10;

    std::vector<double> nlls(ec.members.size());
    for (std::size_t i = 0; i < ec.members.size(); ++i) {
        nlls[i] = nll_full(ec.members[i].params, sigma_hat);
    }
    auto optimum_supports = [&](double lambda) {
        const PenaltySpec spec = PenaltySpec::quasi_mcp(lambda, delta);
        std::vector<double> scores(ec.members.size());
        for (std::size_t i = 0; i < ec.members.size(); ++i) {
            scores[i] = nlls[i] + penalty_matrix(spec, ec.members[i].params.b);
        }
        const double best = *std::min_element(scores.begin(), scores.end());
        std::set<std::string> supports;
        for (std::size_t i = 0; i < ec.members.size(); ++i) {
            if (scores[i] <= best + kTieTol) supports.insert(support_key(ec.members[i].params.b, eps));
        }
        return supports;
    };

    double lambda = lambda_hi;
    auto supports = optimum_supports(lambda);
    int stable = 0;
    for (int iter = 0; iter < 200; ++iter) {
        const double next = lambda / 2.0;
        auto next_supports = optimum_supports(next);
        stable = (next_supports == supports) ? stable + 1 : 0;
        lambda = next;
        supports = std::move(next_supports);
        if (stable >= 2) return lambda;
    }
    throw numerical_error("empirical_crossover_lambda: support set did not stabilize");
}

std::vector<std::pair<int, int>> support_edges(const Matrix& b, double eps) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < b.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            if (i != j && std::abs(b(i, j)) > eps) edges.emplace_back(i, j);
        }
    }
    return edges;
}

double distance_to_class(const std::vector<ClassMember>& members, const Matrix& b_est) {
    if (members.empty()) {
        throw validation_error("distance_to_class: empty member list");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& member : members) {
        if (member.params.b.rows() != b_est.rows() || member.params.b.cols() != b_est.cols()) {
            throw validation_error("distance_to_class: dimension mismatch");
        }
        best = std::min(best, (member.params.b - b_est).norm());
    }
    return best;
}

}  // namespace dagscore
