#include <doctest.h>

#include "oracles.hpp"

#include <jkp/numeric.hpp>

#include <algorithm>
#include <numeric>
#include <vector>

using namespace jkp;

TEST_CASE("order statistic quantile picks the ceil(alpha n)-th smallest") {
    const std::vector<double> three{3, 1, 2};
    CHECK(order_stat_quantile(three, 0.5) == 2);
    CHECK(order_stat_quantile(std::vector<double>{5}, 0.01) == 5);
    CHECK(order_stat_quantile(std::vector<double>{5}, 0.99) == 5);

    std::vector<double> hundred(100);
    std::iota(hundred.begin(), hundred.end(), 1.0);
    std::reverse(hundred.begin(), hundred.end());
    CHECK(order_stat_quantile(hundred, 0.975) == 98);
    CHECK(order_stat_quantile(hundred, 0.2) == 20);
    CHECK(order_stat_quantile(hundred, 0.1) == 10);
    CHECK(order_stat_quantile(hundred, 0.9) == 90);
}

TEST_CASE("quantile rank clamps and flags") {
    const auto low = quantile_rank(10, 0.01);
    CHECK(low.k == 1);
    CHECK(low.clamped);
    const auto mid = quantile_rank(300, 0.025);
    CHECK(mid.k == 8);
    CHECK_FALSE(mid.clamped);
    CHECK(quantile_rank(300, 0.975).k == 293);
    CHECK(quantile_rank(100, 0.2).k == 20);
    CHECK_THROWS_AS(quantile_rank(10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(quantile_rank(10, 1.0), std::invalid_argument);
}

TEST_CASE("empty sample is an error") {
    const std::vector<double> empty;
    CHECK_THROWS_WITH_AS(order_stat_quantile(empty, 0.5), "empty sample", NumericError);
}

TEST_CASE("quantile is monotone in alpha and lands on a sample value") {
    RngStream rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = oracle::uniform_int(1, 60, rng);
        std::vector<double> v(n);
        // Coarse values so ties occur.
        for (auto& x : v) x = std::round(rng.normal() * 3.0);
        double a1 = rng.uniform();
        double a2 = rng.uniform();
        if (a1 > a2) std::swap(a1, a2);
        const double q1 = order_stat_quantile(v, a1);
        const double q2 = order_stat_quantile(v, a2);
        CHECK(q1 <= q2);
        CHECK(std::find(v.begin(), v.end(), q1) != v.end());
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted_quantile(sorted, a1) == q1);
    }
}

TEST_CASE("ols fit examples") {
    Matrix ones = Matrix::Ones(3, 1);
    Vector y(3);
    y << 2, 2, 2;
    CHECK(ols_fit(ones, y)(0) == doctest::Approx(2.0).epsilon(1e-14));

    Matrix line(4, 2);
    line << 1, -1, 1, 0, 1, 2, 1, 5;
    Vector yl = 1.0 + 3.0 * line.col(1).array();
    const Vector b = ols_fit(line, yl);
    CHECK(b(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b(1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("ols fit matches the 3x3 normal equations on random instances") {
    RngStream rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix X = oracle::intercept_design(20, 3, rng);
        const Vector y = oracle::gaussian_vector(20, rng);
        const Vector expected = oracle::invert3(X.transpose() * X) * (X.transpose() * y);
        const Vector b = ols_fit(X, y);
        CHECK((b - expected).cwiseAbs().maxCoeff() < 1e-10);
        // Residual orthogonality.
        const double lhs = (X.transpose() * (y - X * b)).cwiseAbs().maxCoeff();
        CHECK(lhs < 1e-8 * (1.0 + (X.transpose() * y).cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("rank-deficient designs are rejected") {
    RngStream rng(5);
    Matrix X = oracle::intercept_design(10, 3, rng);
    X.col(2) = 2.0 * X.col(1);
    const Vector y = oracle::gaussian_vector(10, rng);
    CHECK_THROWS_WITH_AS(ols_fit(X, y), "rank-deficient design", NumericError);

    Matrix nearly = oracle::intercept_design(10, 2, rng);
    nearly.col(1) = nearly.col(0) * 1.0;
    nearly(0, 1) += 1e-9;
    CHECK_THROWS_AS(ols_fit(nearly, y), NumericError);

    CHECK_THROWS_AS(ols_fit(Matrix::Ones(1, 2), Vector::Ones(1)), NumericError);
}

TEST_CASE("ols coefficients do not depend on row order") {
    RngStream rng(8);
    const Matrix X = oracle::intercept_design(25, 4, rng);
    const Vector y = oracle::gaussian_vector(25, rng);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(25);
    perm.setIdentity();
    for (Eigen::Index i = 24; i > 0; --i) {
        std::swap(perm.indices()(i), perm.indices()(static_cast<Eigen::Index>(rng.next_u64() % (i + 1))));
    }
    const Vector b1 = ols_fit(X, y);
    const Vector b2 = ols_fit(perm * X, perm * y);
    CHECK((b1 - b2).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hat values: trace, self-cross and mean-row identities") {
    RngStream rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const auto p = static_cast<Eigen::Index>(oracle::uniform_int(1, 5, rng));
        const auto n = static_cast<Eigen::Index>(oracle::uniform_int(static_cast<std::size_t>(p) + 2, 50, rng));
        const Matrix X = oracle::intercept_design(n, p, rng);
        const Vector xbar = X.colwise().mean().transpose();
        const auto hv = hat_values(X, xbar);

        CHECK(hv.diag.sum() == doctest::Approx(static_cast<double>(p)).epsilon(1e-10));
        CHECK(hv.diag.mean() == doctest::Approx(static_cast<double>(p) / static_cast<double>(n)).epsilon(1e-10));
        CHECK((hv.diag.array() >= 0.0).all());
        CHECK((hv.diag.array() < 1.0).all());
        CHECK((hv.cross.array() - 1.0 / static_cast<double>(n)).abs().maxCoeff() < 1e-10);

        const Matrix H = X * oracle::invert(X.transpose() * X) * X.transpose();
        CHECK((hv.diag - H.diagonal()).cwiseAbs().maxCoeff() < 1e-10);
        const auto j = static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(n));
        const auto at_j = hat_values(X, X.row(j).transpose());
        CHECK((at_j.cross - H.col(j)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(at_j.cross(j) == doctest::Approx(at_j.diag(j)).epsilon(1e-12));
    }
}

TEST_CASE("a leverage-one point is an error") {
    // Row 0 is the only one with a nonzero second coordinate.
    Matrix X(5, 2);
    X << 1, 1, 1, 0, 1, 0, 1, 0, 1, 0;
    CHECK_THROWS_WITH_AS(hat_values(X, X.row(0).transpose()), "leverage-one point", NumericError);
}

TEST_CASE("normal cdf and quantile") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
    CHECK(normal_cdf(-1.6448536269514722) == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(normal_cdf(-40.0) >= 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-11));
    for (double p = 0.001; p < 1.0; p += 0.0137) {
        CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) < 1e-12);
    }
    CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("cholesky factor") {
    Matrix cov(2, 2);
    cov << 0.5, 0.25, 0.25, 0.5;
    const Matrix L = cholesky_lower(cov);
    CHECK((L * L.transpose() - cov).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(L(0, 1) == 0.0);
    Matrix bad(2, 2);
    bad << 1, 2, 2, 1;
    CHECK_THROWS_WITH_AS(cholesky_lower(bad), "covariance not positive definite", NumericError);
}
