#include "dagscore/sem_core.hpp"

#include "dagscore/errors.hpp"

#include <cmath>
#include <numbers>

namespace dagscore {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kDetFloor = 1e-12;

Matrix i_minus(const Matrix& b) {
    return Matrix::Identity(b.rows(), b.cols()) - b;
}

// Diagonal of (I - B)^T Sigma (I - B), one entry per column.
Vector quadratic_diag(const Matrix& a, const Matrix& sigma) {
    return (sigma * a).cwiseProduct(a).colwise().sum().transpose();
}

}  // namespace

double log_abs_det_i_minus_b(const Matrix& b) {
    detail::check_square(b, "log_abs_det_i_minus_b");
    Eigen::PartialPivLU<Matrix> lu(i_minus(b));
    double log_abs_det = 0.0;
    for (int i = 0; i < b.rows(); ++i) {
        const double d = std::abs(lu.matrixLU()(i, i));
        if (d == 0.0) {
            throw numerical_error("det(I - B) is zero");
        }
        log_abs_det += std::log(d);
    }
    if (log_abs_det < std::log(kDetFloor)) {
        throw numerical_error("det(I - B) is below 1e-12 in magnitude");
    }
    return log_abs_det;
}

CovarianceMatrix covariance_of(const SemParams& params) {
    const Matrix a = i_minus(params.b);
    Eigen::PartialPivLU<Matrix> lu(a);
    if (std::abs(lu.determinant()) < kDetFloor) {
        throw numerical_error("covariance_of: degenerate parameters, det(I - B) near zero");
    }
    const Matrix inv = lu.inverse();
    Matrix sigma = inv.transpose() * params.omega.asDiagonal() * inv;
    sigma = ((sigma + sigma.transpose()) / 2.0).eval();
    return CovarianceMatrix(std::move(sigma));
}

PrecisionMatrix precision_of(const SemParams& params) {
    const Matrix a = i_minus(params.b);
    Matrix theta = a * params.omega.cwiseInverse().asDiagonal() * a.transpose();
    theta = ((theta + theta.transpose()) / 2.0).eval();
    return PrecisionMatrix(std::move(theta));
}

Vector profile_noise(const Matrix& b, const CovarianceMatrix& sigma_hat) {
    detail::check_square(b, "profile_noise");
    if (b.rows() != sigma_hat.dim()) {
        throw validation_error("profile_noise: dimension mismatch");
    }
    return quadratic_diag(i_minus(b), sigma_hat.m());
}

double nll_full(const SemParams& params, const CovarianceMatrix& sigma_hat) {
    if (params.dim() != sigma_hat.dim()) {
        throw validation_error("nll_full: dimension mismatch");
    }
    const int p = params.dim();
    const Vector v = quadratic_diag(i_minus(params.b), sigma_hat.m());
    double value = 0.5 * params.omega.array().log().sum();
    value -= log_abs_det_i_minus_b(params.b);
    value += 0.5 * (v.array() / params.omega.array()).sum();
    value += 0.5 * p * kLog2Pi;
    return value;
}

NllFullGrad nll_full_grad(const SemParams& params, const CovarianceMatrix& sigma_hat) {
    if (params.dim() != sigma_hat.dim()) {
        throw validation_error("nll_full_grad: dimension mismatch");
    }
    const Matrix a = i_minus(params.b);
    Eigen::PartialPivLU<Matrix> lu(a);
    if (std::abs(lu.determinant()) < kDetFloor) {
        throw numerical_error("nll_full_grad: det(I - B) near zero");
    }
    const Matrix inv_t = lu.inverse().transpose();
    NllFullGrad grad{Matrix(), Vector()};
    grad.b = inv_t - sigma_hat.m() * a * params.omega.cwiseInverse().asDiagonal();
    const Vector v = quadratic_diag(a, sigma_hat.m());
    grad.omega = (0.5 / params.omega.array() - 0.5 * v.array() / params.omega.array().square()).matrix();
    return grad;
}

double nll_profile(const Matrix& b, const CovarianceMatrix& sigma_hat) {
    const Vector v = profile_noise(b, sigma_hat);
    if ((v.array() <= 0.0).any()) {
        throw numerical_error("nll_profile: nonpositive profiled variance");
    }
    const int p = static_cast<int>(b.rows());
    return 0.5 * v.array().log().sum() - log_abs_det_i_minus_b(b) + 0.5 * p * (1.0 + kLog2Pi);
}

Matrix nll_profile_grad(const Matrix& b, const CovarianceMatrix& sigma_hat) {
    const Matrix a = i_minus(b);
    Eigen::PartialPivLU<Matrix> lu(a);
    if (std::abs(lu.determinant()) < kDetFloor) {
        throw numerical_error("nll_profile_grad: det(I - B) near zero");
    }
    const Vector v = quadratic_diag(a, sigma_hat.m());
    if ((v.array() <= 0.0).any()) {
        throw numerical_error("nll_profile_grad: nonpositive profiled variance");
    }
    return lu.inverse().transpose() - sigma_hat.m() * a * v.cwiseInverse().asDiagonal();
}

double ls_loss(const Matrix& b, const CovarianceMatrix& sigma_hat) {
    return 0.5 * ls_loss_unscaled(b, sigma_hat);
}

double ls_loss_unscaled(const Matrix& b, const CovarianceMatrix& sigma_hat) {
    detail::check_square(b, "ls_loss");
    if (b.rows() != sigma_hat.dim()) {
        throw validation_error("ls_loss: dimension mismatch");
    }
    return quadratic_diag(i_minus(b), sigma_hat.m()).sum();
}

Matrix ls_loss_grad(const Matrix& b, const CovarianceMatrix& sigma_hat) {
    return -(sigma_hat.m() * i_minus(b));
}

namespace {

void check_binary(const Dataset& data) {
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.p(); ++j) {
            const double x = data.x(i, j);
            if (x != 0.0 && x != 1.0) {
                throw validation_error("logistic_nll: data entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") is not in {0, 1}");
            }
        }
    }
}

double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

double logistic_nll(const Matrix& b, const Dataset& data) {
    detail::check_square(b, "logistic_nll");
    if (b.rows() != data.p()) {
        throw validation_error("logistic_nll: dimension mismatch");
    }
    check_binary(data);
    const Matrix logits = data.x * b;
    double total = 0.0;
    for (int i = 0; i < logits.rows(); ++i) {
        for (int j = 0; j < logits.cols(); ++j) {
            total += softplus(logits(i, j)) - data.x(i, j) * logits(i, j);
        }
    }
    return total / data.n();
}

Matrix logistic_nll_grad(const Matrix& b, const Dataset& data) {
    detail::check_square(b, "logistic_nll_grad");
    if (b.rows() != data.p()) {
        throw validation_error("logistic_nll_grad: dimension mismatch");
    }
    check_binary(data);
    const Matrix logits = data.x * b;
    const Matrix probs = (1.0 + (-logits.array()).exp()).inverse().matrix();
    return data.x.transpose() * (probs - data.x) / data.n();
}

}  // namespace dagscore
