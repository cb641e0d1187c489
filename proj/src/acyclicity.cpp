#include "dagscore/acyclicity.hpp"

#include "dagscore/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <vector>

namespace dagscore {

std::string to_string(AcyclicityKind kind) {
    switch (kind) {
        case AcyclicityKind::TraceExpm: return "trace_expm";
        case AcyclicityKind::LogDet: return "log_det";
    }
    throw validation_error("unknown acyclicity kind");
}

AcyclicityKind acyclicity_kind_from_string(const std::string& name) {
    if (name == "trace_expm") return AcyclicityKind::TraceExpm;
    if (name == "log_det") return AcyclicityKind::LogDet;
    throw validation_error("unknown acyclicity kind '" + name + "'");
}

void AcyclicitySpec::validate() const {
    if (kind == AcyclicityKind::LogDet && (!(s > 0.0) || !std::isfinite(s))) {
        throw validation_error("log_det acyclicity requires s > 0");
    }
}

namespace {

struct LogDetFactor {
    Eigen::PartialPivLU<Matrix> lu;
    double log_abs_det;
};

LogDetFactor logdet_factor(const AcyclicitySpec& spec, const Matrix& b) {
    const int p = static_cast<int>(b.rows());
    const Matrix m = spec.s * Matrix::Identity(p, p) - b.cwiseProduct(b).eval();
    LogDetFactor f{Eigen::PartialPivLU<Matrix>(m), 0.0};
    double parity = static_cast<double>(f.lu.permutationP().determinant());
    for (int i = 0; i < p; ++i) {
        const double d = f.lu.matrixLU()(i, i);
        if (d == 0.0) {
            throw numerical_error("log_det acyclicity out of domain: det(sI - B o B) = 0");
        }
        if (d < 0.0) parity = -parity;
        f.log_abs_det += std::log(std::abs(d));
    }
    if (parity < 0.0) {
        throw numerical_error("log_det acyclicity out of domain: det(sI - B o B) < 0");
    }
    return f;
}

}  // namespace

double h_value(const AcyclicitySpec& spec, const Matrix& b) {
    detail::check_square(b, "h_value");
    spec.validate();
    const int p = static_cast<int>(b.rows());
    if (spec.kind == AcyclicityKind::TraceExpm) {
        const Matrix w = b.cwiseProduct(b);
        const Matrix e = w.exp();
        return e.trace() - p;
    }
    return -logdet_factor(spec, b).log_abs_det + p * std::log(spec.s);
}

Matrix h_grad(const AcyclicitySpec& spec, const Matrix& b) {
    detail::check_square(b, "h_grad");
    spec.validate();
    if (spec.kind == AcyclicityKind::TraceExpm) {
        const Matrix w = b.cwiseProduct(b);
        const Matrix e = w.exp();
        return 2.0 * e.transpose().cwiseProduct(b);
    }
    const Matrix inv_t = logdet_factor(spec, b).lu.inverse().transpose();
    return 2.0 * inv_t.cwiseProduct(b);
}

bool is_dag(const Matrix& b, double eps) {
    detail::check_square(b, "is_dag");
    if (eps < 0.0) {
        throw validation_error("is_dag requires eps >= 0");
    }
    const int p = static_cast<int>(b.rows());
    std::vector<int> in_degree(p, 0);
    std::vector<std::vector<int>> children(p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (i != j && std::abs(b(i, j)) > eps) {
                children[i].push_back(j);
                ++in_degree[j];
            }
        }
    }
    std::vector<int> stack;
    for (int j = 0; j < p; ++j) {
        if (in_degree[j] == 0) stack.push_back(j);
    }
    int removed = 0;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        ++removed;
        for (int v : children[u]) {
            if (--in_degree[v] == 0) stack.push_back(v);
        }
    }
    return removed == p;
}

}  // namespace dagscore
