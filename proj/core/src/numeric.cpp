#include "jkp/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <vector>

namespace jkp {

namespace {

void warn_clamped_once(std::size_t n, double alpha) {
    static std::atomic<bool> warned{false};
    if (!warned.exchange(true)) {
        std::clog << "jkplus: warning: quantile level " << alpha << " with n=" << n
                  << " clamped to an extreme order statistic\n";
    }
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("quantile level must lie in (0, 1)");
    }
}

}  // namespace

QuantileRank quantile_rank(std::size_t n, double alpha) {
    check_alpha(alpha);
    if (n == 0) throw NumericError("empty sample");
    double product = alpha * static_cast<double>(n);
    // alpha * n that is an integer in exact arithmetic can land one ulp above it.
    const double nearest = std::round(product);
    if (std::abs(product - nearest) <= 1e-9 * std::max(1.0, product)) product = nearest;
    const double count = static_cast<double>(n);
    const bool clamped = product < 1.0 || product > count - 1.0;
    const double raw = std::clamp(std::ceil(product), 1.0, count);
    return {static_cast<std::size_t>(raw), clamped};
}

double sorted_quantile(std::span<const double> sorted, double alpha) {
    const auto rank = quantile_rank(sorted.size(), alpha);
    if (rank.clamped) warn_clamped_once(sorted.size(), alpha);
    return sorted[rank.k - 1];
}

double order_stat_quantile(std::span<const double> values, double alpha) {
    if (values.empty()) throw NumericError("empty sample");
    const auto rank = quantile_rank(values.size(), alpha);
    if (rank.clamped) warn_clamped_once(values.size(), alpha);
    std::vector<double> work(values.begin(), values.end());
    auto kth = work.begin() + static_cast<std::ptrdiff_t>(rank.k - 1);
    std::nth_element(work.begin(), kth, work.end());
    return *kth;
}

double order_stat_quantile(const Vector& values, double alpha) {
    return order_stat_quantile(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())),
                               alpha);
}

LeastSquares::LeastSquares(const Matrix& X) {
    const auto n = X.rows();
    const auto p = X.cols();
    if (n < 1 || p < 1) throw std::invalid_argument("design matrix must be non-empty");
    if (!X.allFinite()) throw std::invalid_argument("design matrix has non-finite entries");
    if (n < p) throw NumericError("rank-deficient design");

    qr_.compute(X);
    const Matrix r = qr_.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Vector sv = Eigen::JacobiSVD<Matrix>(r).singularValues();
    const double smax = sv(0);
    const double smin = sv(p - 1);
    gram_condition_ = smin > 0.0 ? (smax / smin) * (smax / smin) : std::numeric_limits<double>::infinity();
    if (!(gram_condition_ <= kMaxGramCondition)) throw NumericError("rank-deficient design");

    q_ = qr_.householderQ() * Matrix::Identity(n, p);
    leverage_ = q_.rowwise().squaredNorm();
}

Vector LeastSquares::solve(const Vector& y) const {
    if (y.size() != q_.rows()) throw std::invalid_argument("response length does not match design rows");
    return qr_.solve(y);
}

Vector LeastSquares::cross_leverages(const Vector& x_s) const {
    const auto p = q_.cols();
    if (x_s.size() != p) throw std::invalid_argument("query point dimension does not match design columns");
    // t = R^{-T} P^T x_s, so that h_{i,s} = q_i . t
    const Vector permuted = qr_.colsPermutation().transpose() * x_s;
    const Vector t = qr_.matrixR()
                         .topLeftCorner(p, p)
                         .triangularView<Eigen::Upper>()
                         .transpose()
                         .solve(permuted);
    return q_ * t;
}

Vector ols_fit(const Matrix& X, const Vector& y) {
    return LeastSquares(X).solve(y);
}

HatValues hat_values(const Matrix& X, const Vector& x_s) {
    const LeastSquares ls(X);
    if ((ls.leverages().array() >= 1.0 - kLeverageTolerance).any()) {
        throw NumericError("leverage-one point");
    }
    return {ls.leverages(), ls.cross_leverages(x_s)};
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile requires p in (0, 1)");

    // Acklam's rational approximation, then one Halley step against erfc.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    for (int step = 0; step < 2; ++step) {
        const double e = normal_cdf(x) - p;
        const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
        x = x - u / (1.0 + 0.5 * x * u);
    }
    return x;
}

Matrix cholesky_lower(const Matrix& cov) {
    if (cov.rows() != cov.cols() || cov.rows() == 0) throw std::invalid_argument("covariance must be square");
    if (!cov.isApprox(cov.transpose(), 1e-12)) throw NumericError("covariance not positive definite");
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericError("covariance not positive definite");
    return llt.matrixL();
}

}  // namespace jkp
