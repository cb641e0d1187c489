#include "dagscore/simulation.hpp"

#include "dagscore/acyclicity.hpp"
#include "dagscore/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace dagscore {

std::string to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::ER: return "ER";
        case GraphKind::SF: return "SF";
    }
    throw validation_error("unknown graph kind");
}

GraphKind graph_kind_from_string(const std::string& name) {
    if (name == "ER") return GraphKind::ER;
    if (name == "SF") return GraphKind::SF;
    throw validation_error("unknown graph kind '" + name + "'");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::LinearGaussian: return "linear_gaussian";
        case ModelKind::Logistic: return "logistic";
    }
    throw validation_error("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "linear_gaussian") return ModelKind::LinearGaussian;
    if (name == "logistic") return ModelKind::Logistic;
    throw validation_error("unknown model kind '" + name + "'");
}

void SimConfig::validate() const {
    if (p < 2) throw validation_error("SimConfig.p must be at least 2");
    if (k < 1) throw validation_error("SimConfig.k must be at least 1");
    if (static_cast<long>(k) * p > static_cast<long>(p) * (p - 1) / 2) {
        throw validation_error("SimConfig: kp exceeds p(p-1)/2, no such graph density");
    }
    if (!(weight_lo > 0.0) || !(weight_hi >= weight_lo)) {
        throw validation_error("SimConfig weight range must satisfy 0 < lo <= hi");
    }
    if (!(noise_std_lo > 0.0) || !(noise_std_hi >= noise_std_lo)) {
        throw validation_error("SimConfig noise std range must satisfy 0 < lo <= hi");
    }
    if (n < 1) throw validation_error("SimConfig.n must be at least 1");
}

namespace {

DagStructure gen_er(const SimConfig& cfg, Rng& rng) {
    const int p = cfg.p;
    std::vector<int> perm(p);
    for (int i = 0; i < p; ++i) perm[i] = i;
    rng.shuffle(perm);
    const double prob = static_cast<double>(cfg.k) * p / (static_cast<double>(p) * (p - 1) / 2.0);
    Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            if (rng.bernoulli(prob)) adj(perm[i], perm[j]) = 1;
        }
    }
    return DagStructure(std::move(adj));
}

DagStructure gen_sf(const SimConfig& cfg, Rng& rng) {
    const int p = cfg.p;
    const int k = cfg.k;
    if (k >= p) throw validation_error("SimConfig: SF graph needs k < p");
    // Barabasi-Albert: node k attaches to all initial nodes, later nodes to k
    // distinct targets drawn preferentially from edge endpoints.
    Eigen::MatrixXi adj = Eigen::MatrixXi::Zero(p, p);
    std::vector<int> repeated;
    std::vector<int> targets;
    for (int new_node = k; new_node < p; ++new_node) {
        targets.clear();
        if (new_node == k) {
            for (int t = 0; t < k; ++t) targets.push_back(t);
        } else {
            while (static_cast<int>(targets.size()) < k) {
                const int t = repeated[static_cast<std::size_t>(rng.uniform_int(repeated.size()))];
                if (std::find(targets.begin(), targets.end(), t) == targets.end()) {
                    targets.push_back(t);
                }
            }
        }
        for (int t : targets) {
            adj(new_node, t) = 1;
            repeated.push_back(t);
            repeated.push_back(new_node);
        }
    }
    std::vector<int> labels(p);
    for (int i = 0; i < p; ++i) labels[i] = i;
    rng.shuffle(labels);
    Eigen::MatrixXi relabeled = Eigen::MatrixXi::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (adj(i, j)) relabeled(labels[i], labels[j]) = 1;
        }
    }
    return DagStructure(std::move(relabeled));
}

}  // namespace

DagStructure gen_graph(const SimConfig& cfg, Rng& rng) {
    cfg.validate();
    return cfg.graph_kind == GraphKind::ER ? gen_er(cfg, rng) : gen_sf(cfg, rng);
}

SemParams assign_weights(const DagStructure& g, const SimConfig& cfg, Rng& rng) {
    cfg.validate();
    const int p = g.dim();
    Matrix b = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (!g.has_edge(i, j)) continue;
            const double magnitude = rng.uniform(cfg.weight_lo, cfg.weight_hi);
            b(i, j) = rng.bernoulli(0.5) ? magnitude : -magnitude;
        }
    }
    Vector omega = Vector::Ones(p);
    if (cfg.model == ModelKind::LinearGaussian) {
        for (int j = 0; j < p; ++j) {
            const double sd = rng.uniform(cfg.noise_std_lo, cfg.noise_std_hi);
            omega[j] = sd * sd;
        }
    }
    return SemParams(std::move(b), std::move(omega));
}

Dataset sample_gaussian(const SemParams& params, int n, Rng& rng) {
    if (n < 1) throw validation_error("sample_gaussian: n must be at least 1");
    if (!is_dag(params.b, 0.0)) {
        throw validation_error("sample_gaussian: support of B is cyclic");
    }
    const int p = params.dim();
    const std::vector<int> order = topological_sort(support_of(params.b, 0.0));
    Matrix x = Matrix::Zero(n, p);
    for (int j : order) {
        const Vector mean = x * params.b.col(j);
        const double sd = std::sqrt(params.omega[j]);
        for (int i = 0; i < n; ++i) x(i, j) = mean[i] + rng.normal(0.0, sd);
    }
    return Dataset(std::move(x));
}

Dataset sample_logistic(const Matrix& b, int n, Rng& rng) {
    if (n < 1) throw validation_error("sample_logistic: n must be at least 1");
    if (!is_dag(b, 0.0)) {
        throw validation_error("sample_logistic: support of B is cyclic");
    }
    const int p = static_cast<int>(b.rows());
    const std::vector<int> order = topological_sort(support_of(b, 0.0));
    Matrix x = Matrix::Zero(n, p);
    for (int j : order) {
        const Vector logit = x * b.col(j);
        for (int i = 0; i < n; ++i) {
            const double prob = 1.0 / (1.0 + std::exp(-logit[i]));
            x(i, j) = rng.bernoulli(prob) ? 1.0 : 0.0;
        }
    }
    return Dataset(std::move(x));
}

Dataset standardize(const Dataset& data) {
    if (data.n() < 2) {
        throw validation_error("standardize: need at least 2 samples");
    }
    const int n = data.n();
    const int p = data.p();
    Matrix z = data.x;
    for (int j = 0; j < p; ++j) {
        const double mean = z.col(j).mean();
        z.col(j).array() -= mean;
        const double var = z.col(j).squaredNorm() / (n - 1);
        if (!(var > 1e-30)) {
            const std::string name = data.column_names.empty()
                                         ? "column " + std::to_string(j)
                                         : "column '" + data.column_names[j] + "'";
            throw validation_error("standardize: " + name + " has zero sample variance");
        }
        z.col(j) /= std::sqrt(var);
    }
    return Dataset(std::move(z), data.column_names);
}

CovarianceMatrix sample_covariance(const Dataset& data, bool centered) {
    const int n = data.n();
    const int p = data.p();
    if (n < p + 1) {
        std::cerr << "warning: sample covariance from n = " << n << " samples of dimension p = "
                  << p << " is not guaranteed positive definite\n";
    }
    Matrix xc = data.x;
    if (centered) {
        for (int j = 0; j < p; ++j) xc.col(j).array() -= xc.col(j).mean();
    }
    Matrix s = Matrix::Zero(p, p);
    s.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose(), 1.0 / n);
    s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
    return CovarianceMatrix(std::move(s));
}

}  // namespace dagscore
