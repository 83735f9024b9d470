#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace jkp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised for numerical failures: empty samples, rank-deficient designs,
/// leverage-one points, non-positive-definite covariances.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Condition number of X^T X above which a design counts as rank-deficient.
inline constexpr double kMaxGramCondition = 1e12;
// h_ii >= 1 - kLeverageTolerance is rejected.
inline constexpr double kLeverageTolerance = 1e-10;

struct QuantileRank {
    std::size_t k;  // 1-based order statistic
    bool clamped;   // alpha finer than 1/n resolves; k is the sample extreme
};

/// k = ceil(alpha * n) clamped to [1, n]. Products within 1e-9 (relative) of
/// an integer are taken as that integer. Flagged as clamped when alpha * n < 1
/// or alpha * n > n - 1, where the requested level lies beyond what n points
/// resolve.
QuantileRank quantile_rank(std::size_t n, double alpha);

/// k-th smallest of `values` with k from quantile_rank(). Throws
/// NumericError("empty sample") on empty input.
double order_stat_quantile(std::span<const double> values, double alpha);
double order_stat_quantile(const Vector& values, double alpha);

/// Same rule on an already ascending-sorted sample.
double sorted_quantile(std::span<const double> sorted, double alpha);

/// Orthogonal-decomposition least squares for a fixed design X (n x p).
/// Holds the QR factors so coefficients, leverages and cross leverages for
/// any number of query points come from one factorization.
class LeastSquares {
public:
    explicit LeastSquares(const Matrix& X);

    Vector solve(const Vector& y) const;

    /// Diagonal of the hat matrix X (X^T X)^{-1} X^T.
    const Vector& leverages() const { return leverage_; }

    /// Entries x_s^T (X^T X)^{-1} x_i for every row i.
    Vector cross_leverages(const Vector& x_s) const;

    /// Condition number of X^T X.
    double gram_condition() const { return gram_condition_; }

    Eigen::Index rows() const { return q_.rows(); }
    Eigen::Index cols() const { return q_.cols(); }

private:
    Eigen::ColPivHouseholderQR<Matrix> qr_;
    Matrix q_;  // thin Q, n x p, in pivoted order
    Vector leverage_;
    double gram_condition_ = 0.0;
};

/// beta minimizing ||y - X beta||^2. Throws NumericError("rank-deficient
/// design") when X^T X has condition number above kMaxGramCondition.
Vector ols_fit(const Matrix& X, const Vector& y);

struct HatValues {
    Vector diag;   // h_ii
    Vector cross;  // h_{i,s} = x_s^T (X^T X)^{-1} x_i
};

/// Throws NumericError("leverage-one point") when some h_ii >= 1 - 1e-10.
HatValues hat_values(const Matrix& X, const Vector& x_s);

/// Standard normal CDF.
double normal_cdf(double x);
/// Inverse standard normal CDF for p in (0, 1).
double normal_quantile(double p);

/// Lower-triangular L with L L^T = cov. Throws NumericError("covariance not
/// positive definite").
Matrix cholesky_lower(const Matrix& cov);

}  // namespace jkp
