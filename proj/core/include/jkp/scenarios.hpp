#pragma once

#include "jkp/dataset.hpp"
#include "jkp/mlp.hpp"
#include "jkp/numeric.hpp"
#include "jkp/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <string>

namespace jkp {

/// Law of the test covariates relative to the training covariates.
enum class TestLaw {
    Iid,      // same law as the training rows
    Shifted,  // covariate shift; the response law given x is unchanged
};

std::string to_string(TestLaw law);

struct SimulatedData {
    Dataset train;
    Matrix test_x;  // one row per test point
    Vector test_y;
};

// Substream ids below a generator's rng. The training sample does not depend
// on the test law, so IID and shifted studies with the same rng share it.
inline constexpr std::uint64_t kTrainStream = 0;
inline constexpr std::uint64_t kIidTestStream = 1;
inline constexpr std::uint64_t kShiftedTestStream = 2;

/// Data-generating model y = mean_response(x) + noise_sd * eps.
class Scenario {
public:
    virtual ~Scenario() = default;

    virtual std::string id() const = 0;
    virtual std::size_t covariate_dim() const = 0;
    virtual double mean_response(const Vector& x) const = 0;
    virtual double noise_sd() const = 0;
    virtual Matrix draw_covariates(TestLaw law, std::size_t count, RngStream& rng) const = 0;

    std::size_t n_train = 300;

    /// Training rows always come from the IID law via rng.split(kTrainStream);
    /// test rows from `law` via the matching test substream.
    SimulatedData generate(TestLaw law, std::size_t test_points, const RngStream& rng) const;

    /// Responses for given covariate rows.
    Vector draw_responses(const Matrix& x, RngStream& rng) const;
};

/// Linear model y = b0 + b1 z + b2 w + eps with Gaussian covariates.
class LinearScenario final : public Scenario {
public:
    LinearScenario();

    Vector beta{Vector::Zero(3)};  // (b0, b1, b2)
    double sigma2 = 1.0;
    Vector mu_x{Vector::Zero(2)};
    Matrix sigma_x;
    Vector shifted_mu{Vector::Zero(2)};
    Matrix shifted_sigma;

    std::string id() const override { return "linear"; }
    std::size_t covariate_dim() const override { return 2; }
    double mean_response(const Vector& x) const override;
    double noise_sd() const override;
    Matrix draw_covariates(TestLaw law, std::size_t count, RngStream& rng) const override;
};

/// Covariance with (k, k') entry rho^{|k-k'|} / 2.
Matrix ar1_half_covariance(std::size_t dim, double rho);

/// ReLU network truth y = max(0, max(0, z1 + z2) - max(0, w)) + eps.
/// Shifted covariates are three independent noncentral t draws.
class NnScenario final : public Scenario {
public:
    NnScenario();

    MlpParams truth = true_network_params();
    double sigma2 = 1.0;
    Vector mu_x{Vector::Zero(3)};
    Matrix sigma_x;
    double shift_df = 3.0;
    double shift_ncp = 1.0;

    std::string id() const override { return "nn"; }
    std::size_t covariate_dim() const override { return 3; }
    double mean_response(const Vector& x) const override;
    double noise_sd() const override;
    Matrix draw_covariates(TestLaw law, std::size_t count, RngStream& rng) const override;
};

SimulatedData gen_linear(const LinearScenario& scenario, TestLaw law, std::size_t test_points, const RngStream& rng);
SimulatedData gen_nn(const NnScenario& scenario, TestLaw law, std::size_t test_points, const RngStream& rng);

}  // namespace jkp
