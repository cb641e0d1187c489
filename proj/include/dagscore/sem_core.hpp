#pragma once

#include "dagscore/types.hpp"

namespace dagscore {

// Sigma_f(B, Omega) = (I - B)^{-T} Omega (I - B)^{-1}.
CovarianceMatrix covariance_of(const SemParams& params);

// Theta_f(B, Omega) = (I - B) Omega^{-1} (I - B)^T.
PrecisionMatrix precision_of(const SemParams& params);

// Closed-form noise optimum for fixed B: diag((I - B)^T Sigma (I - B)).
Vector profile_noise(const Matrix& b, const CovarianceMatrix& sigma_hat);

// Gaussian negative log-likelihood, absolute scale:
//   1/2 log det Omega - log|det(I - B)| + 1/2 Tr(Sigma Theta_f(B, Omega)) + (p/2) log 2pi.
double nll_full(const SemParams& params, const CovarianceMatrix& sigma_hat);

struct NllFullGrad {
    Matrix b;
    Vector omega;
};
NllFullGrad nll_full_grad(const SemParams& params, const CovarianceMatrix& sigma_hat);

// NLL with Omega profiled out:
//   1/2 sum_j log[(I - B)^T Sigma (I - B)]_jj - log|det(I - B)| + (p/2)(1 + log 2pi).
double nll_profile(const Matrix& b, const CovarianceMatrix& sigma_hat);

Matrix nll_profile_grad(const Matrix& b, const CovarianceMatrix& sigma_hat);

// Least-squares loss 1/2 Tr((I - B)^T Sigma (I - B)); the unscaled variant
// drops the 1/2.
double ls_loss(const Matrix& b, const CovarianceMatrix& sigma_hat);
double ls_loss_unscaled(const Matrix& b, const CovarianceMatrix& sigma_hat);
Matrix ls_loss_grad(const Matrix& b, const CovarianceMatrix& sigma_hat);

// Logistic autoregression score for binary data:
//   (1/n) sum over cells [softplus((XB)_ij) - X_ij (XB)_ij].
double logistic_nll(const Matrix& b, const Dataset& data);
Matrix logistic_nll_grad(const Matrix& b, const Dataset& data);

// log|det(I - B)|; throws numerical_error when |det| < 1e-12.
double log_abs_det_i_minus_b(const Matrix& b);

}  // namespace dagscore
