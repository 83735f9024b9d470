#include "jkp/scenarios.hpp"

#include <cmath>
#include <stdexcept>

namespace jkp {

std::string to_string(TestLaw law) {
    return law == TestLaw::Iid ? "iid" : "non-iid";
}

SimulatedData Scenario::generate(TestLaw law, std::size_t test_points, const RngStream& rng) const {
    if (n_train == 0) throw std::invalid_argument("training size must be positive");
    RngStream train_rng = rng.split(kTrainStream);
    Matrix train_x = draw_covariates(TestLaw::Iid, n_train, train_rng);
    Vector train_y = draw_responses(train_x, train_rng);

    RngStream test_rng = rng.split(law == TestLaw::Iid ? kIidTestStream : kShiftedTestStream);
    Matrix test_x = draw_covariates(law, test_points, test_rng);
    Vector test_y = draw_responses(test_x, test_rng);
    return {Dataset(std::move(train_x), std::move(train_y)), std::move(test_x), std::move(test_y)};
}

Vector Scenario::draw_responses(const Matrix& x, RngStream& rng) const {
    Vector y(x.rows());
    const double sd = noise_sd();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        y(i) = mean_response(x.row(i).transpose()) + sd * rng.normal();
    }
    return y;
}

Matrix ar1_half_covariance(std::size_t dim, double rho) {
    const auto d = static_cast<Eigen::Index>(dim);
    Matrix cov(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index l = 0; l < d; ++l) cov(k, l) = std::pow(rho, std::abs(k - l)) / 2.0;
    }
    return cov;
}

namespace {

Matrix draw_gaussian_rows(const Vector& mean, const Matrix& cov, std::size_t count, RngStream& rng) {
    const Matrix lower = cholesky_lower(cov);
    Matrix out(static_cast<Eigen::Index>(count), mean.size());
    for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = sample_mvn_factored(mean, lower, rng).transpose();
    return out;
}

}  // namespace

LinearScenario::LinearScenario() {
    beta << -1.0, 2.0, 2.0;
    sigma_x = ar1_half_covariance(2, 0.5);
    shifted_mu = mu_x + Vector::Constant(2, 2.0);
    shifted_sigma = ar1_half_covariance(2, 0.8);
}

double LinearScenario::mean_response(const Vector& x) const {
    if (x.size() != 2) throw std::invalid_argument("linear scenario covariates are (z, w)");
    return beta(0) + beta(1) * x(0) + beta(2) * x(1);
}

double LinearScenario::noise_sd() const {
    return std::sqrt(sigma2);
}

Matrix LinearScenario::draw_covariates(TestLaw law, std::size_t count, RngStream& rng) const {
    return law == TestLaw::Iid ? draw_gaussian_rows(mu_x, sigma_x, count, rng)
                               : draw_gaussian_rows(shifted_mu, shifted_sigma, count, rng);
}

NnScenario::NnScenario() {
    sigma_x = ar1_half_covariance(3, 0.5);
}

double NnScenario::mean_response(const Vector& x) const {
    return mlp_forward(truth, x);
}

double NnScenario::noise_sd() const {
    return std::sqrt(sigma2);
}

Matrix NnScenario::draw_covariates(TestLaw law, std::size_t count, RngStream& rng) const {
    if (law == TestLaw::Iid) return draw_gaussian_rows(mu_x, sigma_x, count, rng);
    Matrix out(static_cast<Eigen::Index>(count), 3);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index k = 0; k < 3; ++k) out(i, k) = sample_noncentral_t(shift_df, shift_ncp, rng);
    }
    return out;
}

SimulatedData gen_linear(const LinearScenario& scenario, TestLaw law, std::size_t test_points, const RngStream& rng) {
    return scenario.generate(law, test_points, rng);
}

SimulatedData gen_nn(const NnScenario& scenario, TestLaw law, std::size_t test_points, const RngStream& rng) {
    return scenario.generate(law, test_points, rng);
}

}  // namespace jkp
