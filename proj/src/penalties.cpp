#include "dagscore/penalties.hpp"

#include "dagscore/errors.hpp"

#include <cmath>

namespace dagscore {

std::string to_string(PenaltyFamily family) {
    switch (family) {
        case PenaltyFamily::QuasiMcp: return "quasi_mcp";
        case PenaltyFamily::Mcp: return "mcp";
        case PenaltyFamily::Scad: return "scad";
        case PenaltyFamily::L1: return "l1";
        case PenaltyFamily::L0: return "l0";
    }
    throw validation_error("unknown penalty family");
}

PenaltyFamily penalty_family_from_string(const std::string& name) {
    if (name == "quasi_mcp") return PenaltyFamily::QuasiMcp;
    if (name == "mcp") return PenaltyFamily::Mcp;
    if (name == "scad") return PenaltyFamily::Scad;
    if (name == "l1") return PenaltyFamily::L1;
    if (name == "l0") return PenaltyFamily::L0;
    throw validation_error("unknown penalty family '" + name + "'");
}

PenaltySpec PenaltySpec::quasi_mcp(double lambda, double delta) {
    PenaltySpec spec{PenaltyFamily::QuasiMcp, lambda, delta};
    spec.validate();
    return spec;
}

PenaltySpec PenaltySpec::mcp(double lambda, double a) {
    PenaltySpec spec{PenaltyFamily::Mcp, lambda, a};
    spec.validate();
    return spec;
}

PenaltySpec PenaltySpec::scad(double lambda, double a) {
    PenaltySpec spec{PenaltyFamily::Scad, lambda, a};
    spec.validate();
    return spec;
}

PenaltySpec PenaltySpec::l1(double lambda) {
    PenaltySpec spec{PenaltyFamily::L1, lambda, 1.0};
    spec.validate();
    return spec;
}

PenaltySpec PenaltySpec::l0(double lambda) {
    PenaltySpec spec{PenaltyFamily::L0, lambda, 1.0};
    spec.validate();
    return spec;
}

bool PenaltySpec::uses_shape() const {
    return family == PenaltyFamily::QuasiMcp || family == PenaltyFamily::Mcp ||
           family == PenaltyFamily::Scad;
}

void PenaltySpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw validation_error("penalty lambda must be a finite nonnegative number");
    }
    if (uses_shape() && (!(shape > 0.0) || !std::isfinite(shape))) {
        throw validation_error("penalty shape must be a finite positive number");
    }
    if (family == PenaltyFamily::Scad && !(shape > 1.0)) {
        throw validation_error("scad requires shape a > 1");
    }
}

double penalty_value(const PenaltySpec& spec, double t) {
    const double at = std::abs(t);
    const double lambda = spec.lambda;
    switch (spec.family) {
        case PenaltyFamily::QuasiMcp: {
            const double delta = spec.shape;
            if (at <= delta) return lambda * (at - t * t / (2.0 * delta));
            return lambda * delta / 2.0;
        }
        case PenaltyFamily::Mcp: {
            const double a = spec.shape;
            if (at < a * lambda) return lambda * at - t * t / (2.0 * a);
            return lambda * lambda * a / 2.0;
        }
        case PenaltyFamily::Scad: {
            const double a = spec.shape;
            if (at <= lambda) return lambda * at;
            if (at < a * lambda) {
                return (2.0 * a * lambda * at - t * t - lambda * lambda) / (2.0 * (a - 1.0));
            }
            return lambda * lambda * (a + 1.0) / 2.0;
        }
        case PenaltyFamily::L1:
            return lambda * at;
        case PenaltyFamily::L0:
            return t != 0.0 ? lambda : 0.0;
    }
    throw validation_error("unknown penalty family");
}

double penalty_grad(const PenaltySpec& spec, double t) {
    if (t == 0.0) return 0.0;
    const double at = std::abs(t);
    const double sign = t > 0.0 ? 1.0 : -1.0;
    const double lambda = spec.lambda;
    switch (spec.family) {
        case PenaltyFamily::QuasiMcp: {
            const double delta = spec.shape;
            if (at >= delta) return 0.0;
            return sign * lambda * (1.0 - at / delta);
        }
        case PenaltyFamily::Mcp: {
            const double a = spec.shape;
            if (at >= a * lambda) return 0.0;
            return sign * (lambda - at / a);
        }
        case PenaltyFamily::Scad: {
            const double a = spec.shape;
            if (at >= a * lambda) return 0.0;
            if (at <= lambda) return sign * lambda;
            return sign * (a * lambda - at) / (a - 1.0);
        }
        case PenaltyFamily::L1:
            return sign * lambda;
        case PenaltyFamily::L0:
            return 0.0;
    }
    throw validation_error("unknown penalty family");
}

double penalty_matrix(const PenaltySpec& spec, const Matrix& b) {
    detail::check_square(b, "penalty_matrix");
    double total = 0.0;
    for (int i = 0; i < b.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            if (i != j) total += penalty_value(spec, b(i, j));
        }
    }
    return total;
}

Matrix penalty_matrix_grad(const PenaltySpec& spec, const Matrix& b) {
    detail::check_square(b, "penalty_matrix_grad");
    Matrix grad = Matrix::Zero(b.rows(), b.cols());
    for (int i = 0; i < b.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            if (i != j) grad(i, j) = penalty_grad(spec, b(i, j));
        }
    }
    return grad;
}

bool mcp_reparam_check(double lambda, double a, const std::vector<double>& grid) {
    if (!(lambda > 0.0) || !(a > 0.0)) {
        throw validation_error("mcp_reparam_check requires lambda > 0 and a > 0");
    }
    const PenaltySpec quasi = PenaltySpec::quasi_mcp(lambda, a * lambda);
    const PenaltySpec mcp = PenaltySpec::mcp(lambda, a);
    for (double t : grid) {
        if (std::abs(penalty_value(quasi, t) - penalty_value(mcp, t)) > 1e-14) {
            return false;
        }
    }
    return true;
}

}  // namespace dagscore
