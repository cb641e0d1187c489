#include "dagscore/types.hpp"

#include "dagscore/errors.hpp"

#include <cmath>

namespace dagscore {

namespace detail {

void check_finite(const Matrix& m, const std::string& what) {
    if (!m.allFinite()) {
        throw validation_error(what + " contains non-finite entries");
    }
}

void check_square(const Matrix& m, const std::string& what) {
    if (m.rows() != m.cols()) {
        throw validation_error(what + " must be square, got " + std::to_string(m.rows()) +
                               "x" + std::to_string(m.cols()));
    }
}

bool symmetric_within(const Matrix& m, double tol) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace detail

SemParams::SemParams(Matrix b_in, Vector omega_in) : b(std::move(b_in)), omega(std::move(omega_in)) {
    detail::check_square(b, "SemParams.b");
    detail::check_finite(b, "SemParams.b");
    if (omega.size() != b.rows()) {
        throw validation_error("SemParams.omega length " + std::to_string(omega.size()) +
                               " does not match matrix dimension " + std::to_string(b.rows()));
    }
    for (int j = 0; j < omega.size(); ++j) {
        if (!std::isfinite(omega[j]) || omega[j] <= 0.0) {
            throw validation_error("SemParams.omega[" + std::to_string(j) +
                                   "] must be a positive finite variance");
        }
    }
    for (int j = 0; j < b.rows(); ++j) {
        if (b(j, j) != 0.0) {
            throw validation_error("SemParams.b has nonzero diagonal at index " + std::to_string(j));
        }
    }
}

namespace {

constexpr double kSymmetryTol = 1e-10;

bool spd_check(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Matrix sigma) : sigma_(std::move(sigma)) {
    detail::check_square(sigma_, "CovarianceMatrix");
    detail::check_finite(sigma_, "CovarianceMatrix");
    if (!detail::symmetric_within(sigma_, kSymmetryTol)) {
        throw validation_error("CovarianceMatrix is not symmetric within 1e-10");
    }
}

bool CovarianceMatrix::is_positive_definite() const { return spd_check(sigma_); }

void CovarianceMatrix::require_positive_definite(const std::string& context) const {
    if (!is_positive_definite()) {
        throw numerical_error(context + ": covariance matrix is not positive definite");
    }
}

PrecisionMatrix::PrecisionMatrix(Matrix theta) : theta_(std::move(theta)) {
    detail::check_square(theta_, "PrecisionMatrix");
    detail::check_finite(theta_, "PrecisionMatrix");
    if (!detail::symmetric_within(theta_, kSymmetryTol)) {
        throw validation_error("PrecisionMatrix is not symmetric within 1e-10");
    }
}

PrecisionMatrix PrecisionMatrix::inverse_of(const CovarianceMatrix& sigma) {
    sigma.require_positive_definite("PrecisionMatrix::inverse_of");
    const int p = sigma.dim();
    Matrix theta = sigma.m().llt().solve(Matrix::Identity(p, p));
    theta = ((theta + theta.transpose()) / 2.0).eval();
    return PrecisionMatrix(std::move(theta));
}

bool PrecisionMatrix::is_positive_definite() const { return spd_check(theta_); }

void PrecisionMatrix::require_positive_definite(const std::string& context) const {
    if (!is_positive_definite()) {
        throw numerical_error(context + ": precision matrix is not positive definite");
    }
}

Dataset::Dataset(Matrix x_in, std::vector<std::string> names)
    : x(std::move(x_in)), column_names(std::move(names)) {
    if (x.rows() < 1 || x.cols() < 1) {
        throw validation_error("Dataset must have at least one row and one column");
    }
    detail::check_finite(x, "Dataset");
    if (!column_names.empty() && static_cast<int>(column_names.size()) != x.cols()) {
        throw validation_error("Dataset column name count does not match column count");
    }
}

}  // namespace dagscore
