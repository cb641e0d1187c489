#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace dagscore {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Weighted adjacency plus noise variances for the linear SEM X = B^T X + N.
// B_ij is the coefficient of X_i in the equation for X_j (edge i -> j).
// omega stores the noise variances, not standard deviations.
struct SemParams {
    Matrix b;
    Vector omega;

    SemParams(Matrix b_in, Vector omega_in);

    int dim() const { return static_cast<int>(b.rows()); }
};

// Symmetric covariance matrix. Positive definiteness is not enforced at
// construction (sample covariances with n < p are legal inputs); callers that
// need it use require_positive_definite at the point of use.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(Matrix sigma);

    const Matrix& m() const { return sigma_; }
    int dim() const { return static_cast<int>(sigma_.rows()); }

    bool is_positive_definite() const;
    void require_positive_definite(const std::string& context) const;

private:
    Matrix sigma_;
};

class PrecisionMatrix {
public:
    explicit PrecisionMatrix(Matrix theta);

    static PrecisionMatrix inverse_of(const CovarianceMatrix& sigma);

    const Matrix& m() const { return theta_; }
    int dim() const { return static_cast<int>(theta_.rows()); }

    bool is_positive_definite() const;
    void require_positive_definite(const std::string& context) const;

private:
    Matrix theta_;
};

// n x p data matrix, rows are samples. Column names optional (empty vector
// means unnamed).
struct Dataset {
    Matrix x;
    std::vector<std::string> column_names;

    explicit Dataset(Matrix x_in, std::vector<std::string> names = {});

    int n() const { return static_cast<int>(x.rows()); }
    int p() const { return static_cast<int>(x.cols()); }
};

namespace detail {
void check_finite(const Matrix& m, const std::string& what);
void check_square(const Matrix& m, const std::string& what);
bool symmetric_within(const Matrix& m, double tol);
}  // namespace detail

}  // namespace dagscore
